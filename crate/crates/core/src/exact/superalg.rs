//! The graded-commutative algebra `SparsePoly ⊗ Λ[θ]`.
//!
//! Odd generators are identified by `u32` and multiplied in a single global
//! order: every odd word is stored sorted, and the sign of the sorting
//! permutation is folded into the coefficient. A repeated odd generator kills
//! the term.

use std::collections::BTreeMap;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

use super::poly::{int, Monomial, Rational, SparsePoly, Var};
use super::ExactError;

/// Odd generator identifier.
pub type OddVar = u32;

/// An even monomial times a strictly increasing odd word.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SuperMonomial {
    pub even: Monomial,
    pub odd: Vec<OddVar>,
}

impl SuperMonomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn degree(&self) -> usize {
        self.odd.len()
    }
}

/// Multiplies two sorted odd words. Returns `None` if they share a generator,
/// otherwise the merged word and the sign of the merge.
pub fn merge_odd(a: &[OddVar], b: &[OddVar]) -> Option<(Vec<OddVar>, bool)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    let mut swaps = 0usize;
    while i < a.len() && j < b.len() {
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else if a[i] > b[j] {
            // b[j] jumps over the a[i..] that remain
            swaps += a.len() - i;
            out.push(b[j]);
            j += 1;
        } else {
            return None;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some((out, swaps % 2 == 1))
}

/// Sorts an arbitrary odd word. `None` if it has a repeat; otherwise the sorted
/// word and whether the permutation was odd.
pub fn sort_odd(word: &[OddVar]) -> Option<(Vec<OddVar>, bool)> {
    let mut w = word.to_vec();
    let mut odd = false;
    // insertion sort keeps the parity bookkeeping obvious
    for i in 1..w.len() {
        let mut k = i;
        while k > 0 && w[k - 1] > w[k] {
            w.swap(k - 1, k);
            odd = !odd;
            k -= 1;
        }
    }
    if w.windows(2).any(|p| p[0] == p[1]) {
        return None;
    }
    Some((w, odd))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SuperElement {
    terms: BTreeMap<SuperMonomial, Rational>,
}

impl SuperElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_poly(&SparsePoly::one())
    }

    pub fn from_poly(p: &SparsePoly) -> Self {
        let mut out = SuperElement::zero();
        for (m, c) in p.terms() {
            out.add_term(
                SuperMonomial {
                    even: m.clone(),
                    odd: Vec::new(),
                },
                c.clone(),
            );
        }
        out
    }

    pub fn even_var(v: Var) -> Self {
        Self::from_poly(&SparsePoly::var(v))
    }

    pub fn odd_var(t: OddVar) -> Self {
        Self::term(
            Rational::one(),
            SuperMonomial {
                even: Monomial::one(),
                odd: vec![t],
            },
        )
    }

    pub fn term(c: Rational, m: SuperMonomial) -> Self {
        let mut out = SuperElement::zero();
        out.add_term(m, c);
        out
    }

    /// Builds `c · even · θ_{word}` for an unsorted odd word.
    pub fn monomial(c: Rational, even: Monomial, word: &[OddVar]) -> Self {
        match sort_odd(word) {
            None => SuperElement::zero(),
            Some((odd, flip)) => {
                let c = if flip { -c } else { c };
                Self::term(c, SuperMonomial { even, odd })
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SuperMonomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &SuperMonomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, m: SuperMonomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> SuperElement {
        if c.is_zero() {
            return SuperElement::zero();
        }
        SuperElement {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_poly(&self, p: &SparsePoly) -> SuperElement {
        self * &SuperElement::from_poly(p)
    }

    /// Keeps only the terms whose monomial satisfies `keep`.
    pub fn retain<F: FnMut(&SuperMonomial) -> bool>(&self, mut keep: F) -> SuperElement {
        SuperElement {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// The cohomological-degree-`n` component.
    pub fn degree_part(&self, n: usize) -> SuperElement {
        self.retain(|m| m.odd.len() == n)
    }

    /// The even part viewed as a plain polynomial (odd terms dropped).
    pub fn even_part(&self) -> SparsePoly {
        SparsePoly::from_terms(
            self.terms
                .iter()
                .filter(|(m, _)| m.odd.is_empty())
                .map(|(m, c)| (m.even.clone(), c.clone())),
        )
    }

    /// Coefficient polynomial of a fixed odd word.
    pub fn coefficient_of_word(&self, word: &[OddVar]) -> SparsePoly {
        SparsePoly::from_terms(
            self.terms
                .iter()
                .filter(|(m, _)| m.odd == word)
                .map(|(m, c)| (m.even.clone(), c.clone())),
        )
    }

    pub fn display(
        &self,
        even_names: &dyn Fn(Var) -> String,
        odd_names: &dyn Fn(OddVar) -> String,
    ) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c < &Rational::zero();
            let abs = if neg { -c.clone() } else { c.clone() };
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || (m.even.is_one() && m.odd.is_empty()) {
                factors.push(abs.to_string());
            }
            if !m.even.is_one() {
                factors.push(m.even.display(even_names));
            }
            if !m.odd.is_empty() {
                factors.push(
                    m.odd
                        .iter()
                        .map(|&t| odd_names(t))
                        .collect::<Vec<_>>()
                        .join("^"),
                );
            }
            s.push_str(&factors.join("*"));
        }
        s
    }
}

impl From<SparsePoly> for SuperElement {
    fn from(p: SparsePoly) -> Self {
        SuperElement::from_poly(&p)
    }
}

impl AddAssign<&SuperElement> for SuperElement {
    fn add_assign(&mut self, rhs: &SuperElement) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&SuperElement> for SuperElement {
    fn sub_assign(&mut self, rhs: &SuperElement) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl Add for &SuperElement {
    type Output = SuperElement;
    fn add(self, rhs: &SuperElement) -> SuperElement {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &SuperElement {
    type Output = SuperElement;
    fn sub(self, rhs: &SuperElement) -> SuperElement {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for &SuperElement {
    type Output = SuperElement;
    fn neg(self) -> SuperElement {
        self.scale(&int(-1))
    }
}

impl Mul for &SuperElement {
    type Output = SuperElement;
    fn mul(self, rhs: &SuperElement) -> SuperElement {
        let mut out = SuperElement::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                if let Some((odd, flip)) = merge_odd(&m1.odd, &m2.odd) {
                    let c = c1 * c2;
                    out.add_term(
                        SuperMonomial {
                            even: m1.even.mul(&m2.even),
                            odd,
                        },
                        if flip { -c } else { c },
                    );
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Images of the generators under a (super-)derivation.
#[derive(Clone, Debug, Default)]
pub struct DerivationTable {
    pub even: BTreeMap<Var, SuperElement>,
    pub odd: BTreeMap<OddVar, SuperElement>,
}

impl DerivationTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set_even(&mut self, v: Var, image: SuperElement) {
        self.even.insert(v, image);
    }

    pub fn set_odd(&mut self, t: OddVar, image: SuperElement) {
        self.odd.insert(t, image);
    }

    fn even_image(&self, v: Var) -> Result<&SuperElement, ExactError> {
        self.even
            .get(&v)
            .ok_or(ExactError::MissingGenerator { generator: format!("even {v}") })
    }

    fn odd_image(&self, t: OddVar) -> Result<&SuperElement, ExactError> {
        self.odd
            .get(&t)
            .ok_or(ExactError::MissingGenerator { generator: format!("odd {t}") })
    }

    /// Applies the derivation to one monomial, without the coefficient.
    pub fn apply_monomial(
        &self,
        m: &SuperMonomial,
        parity: Parity,
    ) -> Result<SuperElement, ExactError> {
        let mut out = SuperElement::zero();
        let tail = SuperElement::term(
            Rational::one(),
            SuperMonomial {
                even: Monomial::one(),
                odd: m.odd.clone(),
            },
        );
        for (v, e) in m.even.iter() {
            let image = self.even_image(v)?;
            if image.is_zero() {
                continue;
            }
            let rest = SuperElement::term(
                int(e as i64),
                SuperMonomial {
                    even: m.even.shift(v, -1),
                    odd: Vec::new(),
                },
            );
            out += &(&(&rest * image) * &tail);
        }
        for k in 0..m.odd.len() {
            let image = self.odd_image(m.odd[k])?;
            if image.is_zero() {
                continue;
            }
            let sign = if parity == Parity::Odd && k % 2 == 1 { -1 } else { 1 };
            let head = SuperElement::term(
                int(sign),
                SuperMonomial {
                    even: m.even.clone(),
                    odd: m.odd[..k].to_vec(),
                },
            );
            let after = SuperElement::term(
                Rational::one(),
                SuperMonomial {
                    even: Monomial::one(),
                    odd: m.odd[k + 1..].to_vec(),
                },
            );
            out += &(&(&head * image) * &after);
        }
        Ok(out)
    }
}

/// Extends a generator table to the whole algebra by the super-Leibniz rule:
/// an odd derivation picks up `-1` each time it moves past an odd generator.
pub fn super_derivation_apply(
    d: &DerivationTable,
    s: &SuperElement,
    parity: Parity,
) -> Result<SuperElement, ExactError> {
    let mut out = SuperElement::zero();
    for (m, c) in s.terms() {
        let image = d.apply_monomial(m, parity)?;
        out += &image.scale(c);
    }
    Ok(out)
}
