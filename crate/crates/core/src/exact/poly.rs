//! Sparse multivariate Laurent polynomials with exact rational coefficients.
//!
//! Variables are plain integer identifiers; which of them may carry negative
//! exponents is a property of the owning ring (see [`PolyRing`]), not of the
//! polynomial itself. Terms live in a `BTreeMap` keyed by [`Monomial`], so two
//! polynomials are equal exactly when they are structurally equal.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::ExactError;

pub type Rational = BigRational;

/// Variable identifier.
pub type Var = u32;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// A power product `Π v^e`, stored as `(variable, exponent)` pairs sorted by
/// variable with no zero exponents. The derived ordering is lexicographic on
/// those pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<(Var, i32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn pow_of(v: Var, e: i32) -> Self {
        if e == 0 {
            Self::one()
        } else {
            Monomial(vec![(v, e)])
        }
    }

    /// Builds a monomial from arbitrary pairs, merging repeated variables.
    pub fn from_pairs<I: IntoIterator<Item = (Var, i32)>>(pairs: I) -> Self {
        let mut map: BTreeMap<Var, i32> = BTreeMap::new();
        for (v, e) in pairs {
            *map.entry(v).or_insert(0) += e;
        }
        Monomial(map.into_iter().filter(|&(_, e)| e != 0).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, v: Var) -> i32 {
        match self.0.binary_search_by_key(&v, |&(w, _)| w) {
            Ok(i) => self.0[i].1,
            Err(_) => 0,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, i32)> + '_ {
        self.0.iter().copied()
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.0.iter().map(|&(v, _)| v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let e = a[i].1 + b[j].1;
                    if e != 0 {
                        out.push((a[i].0, e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    pub fn inverse(&self) -> Monomial {
        Monomial(self.0.iter().map(|&(v, e)| (v, -e)).collect())
    }

    /// Adds `delta` to the exponent of `v`.
    pub fn shift(&self, v: Var, delta: i32) -> Monomial {
        self.mul(&Monomial::pow_of(v, delta))
    }

    /// `∂/∂v` of the monomial as `(exponent, monomial / v)`, or `None` if `v`
    /// does not occur.
    pub fn partial(&self, v: Var) -> Option<(i32, Monomial)> {
        let e = self.exponent(v);
        if e == 0 {
            None
        } else {
            Some((e, self.shift(v, -1)))
        }
    }

    /// Sum of `weight(v) * exponent` over the support.
    pub fn weighted_degree<F: Fn(Var) -> i64>(&self, weight: F) -> i64 {
        self.0.iter().map(|&(v, e)| weight(v) * e as i64).sum()
    }

    pub fn has_negative_exponent(&self) -> Option<Var> {
        self.0.iter().find(|&&(_, e)| e < 0).map(|&(v, _)| v)
    }

    pub fn display(&self, names: &dyn Fn(Var) -> String) -> String {
        if self.0.is_empty() {
            return "1".to_string();
        }
        let mut s = String::new();
        for (k, &(v, e)) in self.0.iter().enumerate() {
            if k > 0 {
                s.push('*');
            }
            s.push_str(&names(v));
            if e != 1 {
                let _ = write!(s, "^{e}");
            }
        }
        s
    }
}

/// Exact sparse Laurent polynomial. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparsePoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl SparsePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn var(v: Var) -> Self {
        Self::term(Rational::one(), Monomial::var(v))
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        SparsePoly { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(iter: I) -> Self {
        let mut p = SparsePoly::zero();
        for (m, c) in iter {
            p.add_term(m, c);
        }
        p
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

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, Rational)> {
        self.terms.into_iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// The constant term.
    pub fn constant_term(&self) -> Rational {
        self.coefficient(&Monomial::one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
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

    pub fn scale(&self, c: &Rational) -> SparsePoly {
        if c.is_zero() {
            return SparsePoly::zero();
        }
        SparsePoly {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> SparsePoly {
        SparsePoly {
            terms: self.terms.iter().map(|(k, a)| (k.mul(m), a.clone())).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> SparsePoly {
        let mut acc = SparsePoly::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Formal partial derivative; `d(v^-1)/dv = -v^-2`.
    pub fn partial(&self, v: Var) -> SparsePoly {
        let mut out = SparsePoly::zero();
        for (m, c) in &self.terms {
            if let Some((e, rest)) = m.partial(v) {
                out.add_term(rest, c * int(e as i64));
            }
        }
        out
    }

    /// Keeps only the terms whose monomial satisfies `keep`.
    pub fn retain<F: FnMut(&Monomial) -> bool>(&self, mut keep: F) -> SparsePoly {
        SparsePoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Every variable occurring in the polynomial, sorted.
    pub fn variables(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self.terms.keys().flat_map(|m| m.vars()).collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    /// If the polynomial is a single nonzero term, its inverse.
    pub fn monomial_inverse(&self) -> Option<SparsePoly> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next().unwrap();
        Some(SparsePoly::term(c.recip(), m.inverse()))
    }

    /// Substitutes every variable by a polynomial. Negative powers require the
    /// image to be a single term (a unit).
    pub fn substitute<F>(&self, image: F) -> Result<SparsePoly, ExactError>
    where
        F: Fn(Var) -> SparsePoly,
    {
        let mut out = SparsePoly::zero();
        let mut cache: BTreeMap<(Var, i32), SparsePoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut t = SparsePoly::constant(c.clone());
            for (v, e) in m.iter() {
                let factor = match cache.get(&(v, e)) {
                    Some(f) => f.clone(),
                    None => {
                        let base = image(v);
                        let f = if e >= 0 {
                            base.pow(e as u32)
                        } else {
                            base.monomial_inverse()
                                .ok_or(ExactError::NotAUnit { var: v })?
                                .pow((-e) as u32)
                        };
                        cache.insert((v, e), f.clone());
                        f
                    }
                };
                t = &t * &factor;
            }
            out += &t;
        }
        Ok(out)
    }

    /// Renames variables through `f`; `f` must be injective on the support.
    pub fn rename<F: Fn(Var) -> Var>(&self, f: F) -> SparsePoly {
        SparsePoly::from_terms(
            self.terms
                .iter()
                .map(|(m, c)| (Monomial::from_pairs(m.iter().map(|(v, e)| (f(v), e))), c.clone())),
        )
    }

    /// Least common multiple of the coefficient denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.terms
            .values()
            .fold(BigInt::one(), |acc, c| num_integer::Integer::lcm(&acc, c.denom()))
    }

    pub fn display(&self, names: &dyn Fn(Var) -> String) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if m.is_one() {
                let _ = write!(s, "{abs}");
            } else if abs.is_one() {
                s.push_str(&m.display(names));
            } else {
                let _ = write!(s, "{abs}*{}", m.display(names));
            }
        }
        s
    }
}

impl From<Rational> for SparsePoly {
    fn from(c: Rational) -> Self {
        SparsePoly::constant(c)
    }
}

impl AddAssign<&SparsePoly> for SparsePoly {
    fn add_assign(&mut self, rhs: &SparsePoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&SparsePoly> for SparsePoly {
    fn sub_assign(&mut self, rhs: &SparsePoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl Add for &SparsePoly {
    type Output = SparsePoly;
    fn add(self, rhs: &SparsePoly) -> SparsePoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &SparsePoly {
    type Output = SparsePoly;
    fn sub(self, rhs: &SparsePoly) -> SparsePoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for &SparsePoly {
    type Output = SparsePoly;
    fn neg(self) -> SparsePoly {
        SparsePoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl Mul for &SparsePoly {
    type Output = SparsePoly;
    fn mul(self, rhs: &SparsePoly) -> SparsePoly {
        let mut out = SparsePoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

/// Variable bookkeeping for a ring of Laurent polynomials: names and which
/// variables may appear with negative exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyRing {
    names: Vec<String>,
    invertible: Vec<bool>,
}

impl PolyRing {
    pub fn new(names: Vec<String>, invertible: Vec<bool>) -> Self {
        assert_eq!(names.len(), invertible.len());
        PolyRing { names, invertible }
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, v: Var) -> String {
        self.names
            .get(v as usize)
            .cloned()
            .unwrap_or_else(|| format!("v{v}"))
    }

    pub fn is_invertible(&self, v: Var) -> bool {
        self.invertible.get(v as usize).copied().unwrap_or(false)
    }

    pub fn var(&self, v: Var) -> Result<SparsePoly, ExactError> {
        self.check_var(v)?;
        Ok(SparsePoly::var(v))
    }

    pub fn check_var(&self, v: Var) -> Result<(), ExactError> {
        if (v as usize) < self.names.len() {
            Ok(())
        } else {
            Err(ExactError::UnknownVariable { var: v })
        }
    }

    /// Verifies that every variable is known and that negative exponents only
    /// sit on invertible variables.
    pub fn check(&self, p: &SparsePoly) -> Result<(), ExactError> {
        for (m, _) in p.terms() {
            for (v, e) in m.iter() {
                self.check_var(v)?;
                if e < 0 && !self.is_invertible(v) {
                    return Err(ExactError::NegativeExponent { var: self.name(v) });
                }
            }
        }
        Ok(())
    }

    pub fn mul(&self, p: &SparsePoly, q: &SparsePoly) -> Result<SparsePoly, ExactError> {
        let r = p * q;
        self.check(&r)?;
        Ok(r)
    }

    pub fn partial(&self, p: &SparsePoly, v: Var) -> Result<SparsePoly, ExactError> {
        self.check_var(v)?;
        Ok(p.partial(v))
    }

    /// A Laurent polynomial is a unit iff it is one term supported on
    /// invertible variables.
    pub fn is_unit(&self, p: &SparsePoly) -> bool {
        p.len() == 1
            && p.terms()
                .all(|(m, _)| m.iter().all(|(v, _)| self.is_invertible(v)))
    }

    pub fn display(&self, p: &SparsePoly) -> String {
        p.display(&|v| self.name(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn x() -> SparsePoly {
        SparsePoly::var(0)
    }
    fn y() -> SparsePoly {
        SparsePoly::var(1)
    }

    #[test]
    fn difference_of_squares() {
        let p = &(&x() + &y()) * &(&x() - &y());
        let expect = &x().pow(2) - &y().pow(2);
        assert_eq!(p, expect);
    }

    #[test]
    fn laurent_unit_cancels() {
        let ring = PolyRing::new(vec!["x".into()], vec![true]);
        let inv = SparsePoly::term(int(1), Monomial::pow_of(0, -1));
        assert_eq!(ring.mul(&x(), &inv).unwrap(), SparsePoly::one());
    }

    #[test]
    fn negative_exponent_on_polynomial_variable_rejected() {
        let ring = PolyRing::new(vec!["x".into()], vec![false]);
        let inv = SparsePoly::term(int(1), Monomial::pow_of(0, -1));
        assert!(matches!(
            ring.mul(&x(), &inv.pow(2)),
            Err(ExactError::NegativeExponent { .. })
        ));
    }

    #[test]
    fn jet_difference_of_squares() {
        // (x0 + 2 x1)(x0 - 2 x1), expanded term by term
        let x0 = SparsePoly::var(0);
        let x1 = SparsePoly::var(1);
        let a = &x0 + &x1.scale(&int(2));
        let b = &x0 - &x1.scale(&int(2));
        let mut expect = SparsePoly::zero();
        for (ma, ca) in a.terms() {
            for (mb, cb) in b.terms() {
                expect.add_term(ma.mul(mb), ca * cb);
            }
        }
        assert_eq!(&a * &b, expect);
        assert_eq!(expect, &x0.pow(2) - &x1.pow(2).scale(&int(4)));
    }

    #[test]
    fn partials() {
        let p = &x().pow(2) * &y();
        assert_eq!(p.partial(0), (&x() * &y()).scale(&int(2)));
        let inv = SparsePoly::term(int(1), Monomial::pow_of(0, -1));
        assert_eq!(inv.partial(0), SparsePoly::term(int(-1), Monomial::pow_of(0, -2)));
        // x0*y1 + 3*x1 with x0=0, x1=1, y1=2
        let q = &(&SparsePoly::var(0) * &SparsePoly::var(2)) + &SparsePoly::var(1).scale(&int(3));
        assert_eq!(q.partial(1), SparsePoly::constant(int(3)));
    }

    #[test]
    fn unknown_variable_is_an_error() {
        let ring = PolyRing::new(vec!["x".into()], vec![false]);
        assert!(matches!(ring.partial(&x(), 5), Err(ExactError::UnknownVariable { var: 5 })));
    }

    #[test]
    fn display_is_fixed_order() {
        let p = &(&x().scale(&rat(1, 2)) - &y()) + &SparsePoly::constant(int(3));
        let names = |v: Var| ["x", "y"][v as usize].to_string();
        assert_eq!(p.display(&names), "3 + 1/2*x - y");
    }

    fn arb_poly() -> impl Strategy<Value = SparsePoly> {
        prop::collection::vec(((0u32..3, -2i32..3), (0u32..3, 0i32..3), -5i64..6), 0..5).prop_map(
            |ts| {
                SparsePoly::from_terms(
                    ts.into_iter()
                        .map(|(a, b, c)| (Monomial::from_pairs([a, b]), int(c))),
                )
            },
        )
    }

    proptest! {
        #[test]
        fn ring_axioms(p in arb_poly(), q in arb_poly(), r in arb_poly()) {
            prop_assert_eq!(&p * &q, &q * &p);
            prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
            prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        }

        #[test]
        fn equality_is_structural(p in arb_poly(), q in arb_poly()) {
            // p + q - q rebuilds the same canonical map as p
            let back = &(&p + &q) - &q;
            prop_assert_eq!(format!("{:?}", back), format!("{:?}", p));
        }

        #[test]
        fn partial_is_a_derivation(p in arb_poly(), q in arb_poly(), v in 0u32..3) {
            let lhs = (&p * &q).partial(v);
            let rhs = &(&p.partial(v) * &q) + &(&p * &q.partial(v));
            prop_assert_eq!(lhs, rhs);
        }
    }
}
