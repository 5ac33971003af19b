//! Lie conformal cochains of a Poisson vertex algebra restricted to
//! polyderivations, their differential, and the transport of loop de Rham–Lie
//! forms onto them.
//!
//! An `n`-cochain is stored by its values on ordered tuples of weight-0
//! generators `x_{a,0}`. Each value is a [`FormalPoly`] in `n` slot variables
//! with the last one eliminated by `λ_n = −λ_1 − … − λ_{n−1} − δ`. Values on
//! other arguments follow from sesquilinearity and the Leibniz rule in every
//! slot.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;
use rayon::prelude::*;

use crate::complex::{LoopCEComplex, Window};
use crate::exact::{int, BlockLabel, OddVar, RankAccumulator, Rational, SparsePoly, SparseVec, SuperElement, SuperMonomial};
use crate::jet::JetRing;
use crate::lambda::{FormalPoly, PVAStructure};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LcError {
    #[error("cochains of degree {0} are not supported")]
    Degree(usize),
    #[error("form and cochain data disagree on rank: {form} vs {ring}")]
    Rank { form: usize, ring: usize },
}

const MAX_DEGREE: usize = 3;

/// `p` with `λ_n ↦ −λ_1 − … − λ_{n−1} − δ`, δ acting on coefficients.
pub fn canonicalize_mod_delta_sum(ring: &JetRing, p: &FormalPoly) -> FormalPoly {
    let n = p.nvars();
    if n == 0 {
        return p.truncate(ring);
    }
    let mut lin = vec![-1; n];
    lin[n - 1] = 0;
    p.substitute(ring, n - 1, &lin, -1).truncate(ring)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LCCochain {
    degree: usize,
    values: BTreeMap<Vec<usize>, FormalPoly>,
}

impl LCCochain {
    pub fn zero(degree: usize) -> Self {
        LCCochain {
            degree,
            values: BTreeMap::new(),
        }
    }

    /// The degree-0 cochain given by the class of `f` modulo `δ`.
    pub fn class_of(f: &SparsePoly) -> Self {
        let mut c = Self::zero(0);
        c.add_value(vec![], &FormalPoly::constant(0, f.clone()));
        c
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn value(&self, tuple: &[usize]) -> FormalPoly {
        self.values.get(tuple).cloned().unwrap_or_else(|| FormalPoly::zero(self.degree))
    }

    pub fn values(&self) -> impl Iterator<Item = (&Vec<usize>, &FormalPoly)> {
        self.values.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    fn add_value(&mut self, tuple: Vec<usize>, v: &FormalPoly) {
        let e = self.values.entry(tuple.clone()).or_insert_with(|| FormalPoly::zero(v.nvars()));
        e.add_assign(v);
        if e.is_zero() {
            self.values.remove(&tuple);
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(self.degree);
        for (t, v) in &self.values {
            out.add_value(t.clone(), &v.scale(c));
        }
        out
    }

    pub fn plus(&self, other: &LCCochain) -> Self {
        let mut out = self.clone();
        for (t, v) in &other.values {
            out.add_value(t.clone(), v);
        }
        out
    }

    /// Coordinates `(tuple, λ-exponents, monomial)`, numbered through `index`.
    pub fn to_vector(&self, index: &mut BTreeMap<(Vec<usize>, Vec<u32>, String), usize>) -> SparseVec {
        let mut v = SparseVec::new();
        for (t, val) in &self.values {
            for (e, c) in val.terms() {
                for (m, q) in c.terms() {
                    let key = (t.clone(), e.clone(), format!("{m:?}"));
                    let n = index.len();
                    let i = *index.entry(key).or_insert(n);
                    v.insert(i, q.clone());
                }
            }
        }
        v
    }

    pub fn display(&self, ring: &JetRing) -> String {
        if self.values.is_empty() {
            return "0".into();
        }
        let names: Vec<String> = (1..=self.degree).map(|k| format!("l{k}")).collect();
        let names: Vec<&str> = names.iter().map(String::as_str).collect();
        self.values
            .iter()
            .map(|(t, v)| {
                let args: Vec<&str> = t.iter().map(|&a| ring.base().name(a)).collect();
                format!("({}) -> {}", args.join(","), v.display(ring, &names))
            })
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// Sign conventions for the differential, indices counted from 0:
/// `(−1)^{i + first}` on the bracket terms and `(−1)^{i + j + merged}` on the
/// terms where two arguments are merged into the first slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LcConvention {
    pub first: u8,
    pub merged: u8,
}

impl LcConvention {
    pub const ALL: [LcConvention; 4] = [
        LcConvention { first: 0, merged: 0 },
        LcConvention { first: 0, merged: 1 },
        LcConvention { first: 1, merged: 0 },
        LcConvention { first: 1, merged: 1 },
    ];

    pub const STANDARD: LcConvention = LcConvention { first: 0, merged: 0 };

    fn first_sign(self, i: usize) -> Rational {
        sign(i + self.first as usize)
    }

    fn merged_sign(self, i: usize, j: usize) -> Rational {
        sign(i + j + self.merged as usize)
    }
}

impl fmt::Display for LcConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = |s: &str, k: u8| if k == 0 { format!("(-1)^({s})") } else { format!("(-1)^({s}+1)") };
        write!(f, "bracket {} merge {}", p("i", self.first), p("i+j", self.merged))
    }
}

fn sign(k: usize) -> Rational {
    if k % 2 == 0 {
        Rational::one()
    } else {
        int(-1)
    }
}

fn unit_form(n: usize, k: usize) -> Vec<i64> {
    let mut v = vec![0; n];
    v[k] = 1;
    v
}

/// Replaces own variable `k` by the linear form `forms[k]` in `n` variables.
fn substitute_forms(ring: &JetRing, p: &FormalPoly, forms: &[Vec<i64>], n: usize) -> FormalPoly {
    let mut out = FormalPoly::zero(n);
    for (e, c) in p.terms() {
        let mut q = FormalPoly::constant(n, c.clone());
        for (k, &x) in e.iter().enumerate() {
            for _ in 0..x {
                q = q.apply_linear(ring, &forms[k], 0);
            }
        }
        out.add_assign(&q);
    }
    out
}

/// `∂^j/∂λ_k^j / j!`.
fn divided_derivative(p: &FormalPoly, k: usize, j: u32) -> FormalPoly {
    let mut out = FormalPoly::zero(p.nvars());
    for (e, c) in p.terms() {
        if e[k] < j {
            continue;
        }
        let mut binom = Rational::one();
        for t in 0..j {
            binom = binom * int((e[k] - t) as i64) / int(t as i64 + 1);
        }
        let mut ne = e.clone();
        ne[k] -= j;
        out.add_term(ne, &c.scale(&binom));
    }
    out
}

/// `Q(λ_k + δ_g) g = Σ_j ∂^{(j)}_{λ_k} Q · δ^j g`, δ acting on `g` alone.
fn shift_times(ring: &JetRing, q: &FormalPoly, k: usize, g: &SparsePoly) -> FormalPoly {
    let mut out = FormalPoly::zero(q.nvars());
    let mut dg = ring.truncate(g);
    let mut j = 0;
    while !dg.is_zero() {
        let dq = divided_derivative(q, k, j);
        if dq.is_zero() {
            break;
        }
        out.add_assign(&dq.mul_ring(ring, &dg));
        dg = ring.delta(&dg);
        j += 1;
    }
    out
}

/// `Y` evaluated on arbitrary arguments. Each argument is a formal
/// polynomial in the `n` ambient variables whose variables are inert; slot
/// `k` of `Y` carries the linear form `forms[k]`. The result is not
/// canonicalized.
pub fn evaluate(ring: &JetRing, y: &LCCochain, args: &[FormalPoly], forms: &[Vec<i64>], n: usize) -> FormalPoly {
    let deg = y.degree;
    assert_eq!(args.len(), deg);
    if deg == 0 {
        return y.value(&[]).embed(n, &[]);
    }
    // (base index, level, inert exponents, partial derivative) per slot
    let choices: Vec<Vec<(usize, usize, Vec<u32>, SparsePoly)>> = args
        .iter()
        .map(|arg| {
            let mut out = Vec::new();
            for (e, c) in arg.terms() {
                for v in c.variables() {
                    let g = c.partial(v);
                    if !g.is_zero() {
                        out.push((ring.index(v), ring.level(v), e.clone(), g));
                    }
                }
            }
            out
        })
        .collect();
    let mut out = FormalPoly::zero(n);
    let mut pick = vec![0usize; deg];
    if choices.iter().any(Vec::is_empty) {
        return out;
    }
    loop {
        let sel: Vec<_> = pick.iter().zip(&choices).map(|(&p, c)| &c[p]).collect();
        let tuple: Vec<usize> = sel.iter().map(|s| s.0).collect();
        let mut q = y.value(&tuple);
        if !q.is_zero() {
            for (k, s) in sel.iter().enumerate().take(deg - 1) {
                q = q.apply_linear_divided(ring, &unit_form(deg, k).iter().map(|x| -x).collect::<Vec<_>>(), 0, s.1 as u32);
                q = shift_times(ring, &q, k, &s.3);
            }
            let last = sel[deg - 1];
            let mut lin = vec![1; deg];
            lin[deg - 1] = 0;
            q = q.apply_linear_divided(ring, &lin, 1, last.1 as u32).mul_ring(ring, &last.3);
            let mut inert = vec![0u32; n];
            for s in &sel {
                for (l, x) in s.2.iter().enumerate() {
                    inert[l] += x;
                }
            }
            let q = substitute_forms(ring, &q, forms, n);
            out.add_assign(&q.mul(ring, &FormalPoly::monomial(n, inert, SparsePoly::one())));
        }
        let mut k = 0;
        loop {
            if k == deg {
                return out.truncate(ring);
            }
            pick[k] += 1;
            if pick[k] < choices[k].len() {
                break;
            }
            pick[k] = 0;
            k += 1;
        }
    }
}

fn tuples(m: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..m).map(move |a| {
                    let mut t = t.clone();
                    t.push(a);
                    t
                })
            })
            .collect();
    }
    out
}

fn generator_arg(ring: &JetRing, a: usize, n: usize) -> FormalPoly {
    FormalPoly::constant(n, ring.x(a, 0))
}

/// The differential on generator tuples, from degree `n <= 2`.
pub fn lc_differential(p: &PVAStructure, y: &LCCochain, conv: LcConvention) -> Result<LCCochain, LcError> {
    let n = y.degree;
    if n + 1 > MAX_DEGREE {
        return Err(LcError::Degree(n + 1));
    }
    let ring = &p.ring;
    let big = n + 1;
    let mut out = LCCochain::zero(big);
    for t in tuples(ring.m(), big) {
        let mut acc = FormalPoly::zero(big);
        for i in 0..big {
            let rest: Vec<usize> = (0..big).filter(|&k| k != i).collect();
            let args: Vec<FormalPoly> = rest.iter().map(|&k| generator_arg(ring, t[k], big)).collect();
            let forms: Vec<Vec<i64>> = rest.iter().map(|&k| unit_form(big, k)).collect();
            let w = evaluate(ring, y, &args, &forms, big);
            if w.is_zero() {
                continue;
            }
            let b = p.bracket_into(&ring.x(t[i], 0), &w, i);
            acc.add_assign(&b.scale(&conv.first_sign(i)));
        }
        for i in 0..big {
            for j in i + 1..big {
                let merged = p.bracket_at(&ring.x(t[i], 0), &ring.x(t[j], 0), big, i);
                if merged.is_zero() {
                    continue;
                }
                let rest: Vec<usize> = (0..big).filter(|&k| k != i && k != j).collect();
                let mut args = vec![merged];
                args.extend(rest.iter().map(|&k| generator_arg(ring, t[k], big)));
                let mut forms = vec![{
                    let mut f = unit_form(big, i);
                    f[j] = 1;
                    f
                }];
                forms.extend(rest.iter().map(|&k| unit_form(big, k)));
                let v = evaluate(ring, y, &args, &forms, big);
                acc.add_assign(&v.scale(&conv.merged_sign(i, j)));
            }
        }
        let v = canonicalize_mod_delta_sum(ring, &acc);
        if !v.is_zero() {
            out.add_value(t, &v);
        }
    }
    Ok(out)
}

/// The differential applied to general arguments directly from the defining
/// formula, brackets taken between arbitrary elements. Canonicalized.
pub fn lc_differential_at(p: &PVAStructure, y: &LCCochain, conv: LcConvention, args: &[SparsePoly]) -> FormalPoly {
    let ring = &p.ring;
    let big = y.degree + 1;
    assert_eq!(args.len(), big);
    let mut acc = FormalPoly::zero(big);
    for i in 0..big {
        let rest: Vec<usize> = (0..big).filter(|&k| k != i).collect();
        let a: Vec<FormalPoly> = rest.iter().map(|&k| FormalPoly::constant(big, args[k].clone())).collect();
        let forms: Vec<Vec<i64>> = rest.iter().map(|&k| unit_form(big, k)).collect();
        let w = evaluate(ring, y, &a, &forms, big);
        acc.add_assign(&p.bracket_into(&args[i], &w, i).scale(&conv.first_sign(i)));
    }
    for i in 0..big {
        for j in i + 1..big {
            let rest: Vec<usize> = (0..big).filter(|&k| k != i && k != j).collect();
            let mut a = vec![p.bracket_at(&args[i], &args[j], big, i)];
            a.extend(rest.iter().map(|&k| FormalPoly::constant(big, args[k].clone())));
            let mut f = unit_form(big, i);
            f[j] = 1;
            let mut forms = vec![f];
            forms.extend(rest.iter().map(|&k| unit_form(big, k)));
            acc.add_assign(&evaluate(ring, y, &a, &forms, big).scale(&conv.merged_sign(i, j)));
        }
    }
    canonicalize_mod_delta_sum(ring, &acc)
}

/// `Y` on general arguments in its own slot variables, canonicalized.
pub fn evaluate_canonical(ring: &JetRing, y: &LCCochain, args: &[SparsePoly]) -> FormalPoly {
    let n = y.degree;
    let a: Vec<FormalPoly> = args.iter().map(|f| FormalPoly::constant(n, f.clone())).collect();
    let forms: Vec<Vec<i64>> = (0..n).map(|k| unit_form(n, k)).collect();
    canonicalize_mod_delta_sum(ring, &evaluate(ring, y, &a, &forms, n))
}

fn permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    if n == 0 {
        return vec![(vec![], false)];
    }
    let mut out = Vec::new();
    for (p, odd) in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            // moving n−1 from the end to `pos` is a cycle of length n − pos
            out.push((q, odd ^ ((n - 1 - pos) % 2 == 1)));
        }
    }
    out
}

/// `ι`: `θ^a_i ↦ ∂_a ⊗ λ^{(i)}` in each slot, antisymmetrized, even factors
/// multiplying the value. Only defined for the cotangent loop complex.
pub fn iota_transport(lp: &LoopCEComplex, ring: &JetRing, form: &SuperElement) -> Result<LCCochain, LcError> {
    if lp.rank() != ring.m() {
        return Err(LcError::Rank {
            form: lp.rank(),
            ring: ring.m(),
        });
    }
    let mut degree = None;
    let mut out: Option<LCCochain> = None;
    for (mono, c) in form.terms() {
        let n = mono.odd.len();
        if n > MAX_DEGREE {
            return Err(LcError::Degree(n));
        }
        if *degree.get_or_insert(n) != n {
            continue;
        }
        let piece = iota_monomial(lp, ring, mono, c);
        out = Some(match out {
            Some(o) => o.plus(&piece),
            None => piece,
        });
    }
    Ok(out.unwrap_or_else(|| LCCochain::zero(degree.unwrap_or(0))))
}

fn iota_monomial(lp: &LoopCEComplex, ring: &JetRing, mono: &SuperMonomial, c: &Rational) -> LCCochain {
    let n = mono.odd.len();
    let f = SparsePoly::term(c.clone(), mono.even.clone());
    let mut out = LCCochain::zero(n);
    if n == 0 {
        out.add_value(vec![], &FormalPoly::constant(0, f));
        return out;
    }
    let word: Vec<(usize, usize)> = mono.odd.iter().map(|&t: &OddVar| (lp.odd_index(t), lp.odd_level(t))).collect();
    for (perm, odd) in permutations(n) {
        let tuple: Vec<usize> = perm.iter().map(|&s| word[s].0).collect();
        let mut v = FormalPoly::constant(n, f.clone());
        for (k, &s) in perm.iter().enumerate() {
            v = v.apply_linear_divided(ring, &unit_form(n, k), 0, word[s].1 as u32);
        }
        if odd {
            v = v.neg();
        }
        out.add_value(tuple, &canonicalize_mod_delta_sum(ring, &v));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConventionReport {
    pub convention: LcConvention,
    /// First basis element where `d∘d ≠ 0`.
    pub square: Option<String>,
    /// First weight-0 block element where `ι∘D ≠ d∘ι` from degree 0.
    pub degree_zero: Option<String>,
}

impl ConventionReport {
    pub fn admissible(&self) -> bool {
        self.square.is_none() && self.degree_zero.is_none()
    }
}

fn block_labels(window: &Window, degree: usize) -> Vec<BlockLabel> {
    (0..=window.weight)
        .flat_map(|w| window.multidegrees().into_iter().map(move |d| BlockLabel::new(degree, w as i64, d)))
        .collect()
}

fn unit(m: &SuperMonomial) -> SuperElement {
    SuperElement::term(Rational::one(), m.clone())
}

/// First transported basis element of degree `<= max_degree` where `d∘d`
/// is nonzero.
pub fn square_check(
    p: &PVAStructure,
    lp: &LoopCEComplex,
    conv: LcConvention,
    window: &Window,
    max_degree: usize,
) -> Result<Option<String>, LcError> {
    for n in 0..=max_degree {
        for lab in block_labels(window, n) {
            for b in lp.basis(&lab) {
                let y = iota_transport(lp, &p.ring, &unit(&b))?;
                let dd = lc_differential(p, &lc_differential(p, &y, conv)?, conv)?;
                if !dd.is_zero() {
                    return Ok(Some(format!("{lab}: {}", lp.display(&unit(&b)))));
                }
            }
        }
    }
    Ok(None)
}

/// Scores every sign convention on `d∘d = 0` and agreement with the loop
/// differential from degree 0.
pub fn select_convention(p: &PVAStructure, lp: &LoopCEComplex, window: &Window) -> Result<Vec<ConventionReport>, LcError> {
    LcConvention::ALL
        .iter()
        .map(|&conv| {
            let square = square_check(p, lp, conv, window, 1)?;
            let degree_zero = first_intertwine_failure(p, lp, conv, &window.with_weight(0), 0)?;
            Ok(ConventionReport {
                convention: conv,
                square,
                degree_zero,
            })
        })
        .collect()
}

fn first_intertwine_failure(
    p: &PVAStructure,
    lp: &LoopCEComplex,
    conv: LcConvention,
    window: &Window,
    degree: usize,
) -> Result<Option<String>, LcError> {
    let labels = block_labels(window, degree);
    let found: Vec<Option<String>> = labels
        .par_iter()
        .map(|lab| -> Result<Option<String>, LcError> {
            for b in lp.basis(lab) {
                let s = unit(&b);
                let lhs = iota_transport(lp, &p.ring, &lp.apply_d(&s))?;
                let lhs = if lhs.degree() == degree + 1 { lhs } else { LCCochain::zero(degree + 1) };
                let rhs = lc_differential(p, &iota_transport(lp, &p.ring, &s)?, conv)?;
                if lhs != rhs {
                    return Ok(Some(format!("{lab}: {}", lp.display(&s))));
                }
            }
            Ok(None)
        })
        .collect::<Result<_, _>>()?;
    Ok(found.into_iter().flatten().next())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BijectionBlock {
    pub label: BlockLabel,
    /// Dimension of the δ-reduced block of forms.
    pub forms: usize,
    /// Rank of the transported basis.
    pub image: usize,
    /// Dimension of the matching block of cochains.
    pub cochains: usize,
    /// Whether every δ-image in the block is sent to zero.
    pub kills_delta: bool,
}

impl BijectionBlock {
    pub fn bijective(&self) -> bool {
        self.kills_delta && self.forms == self.image && self.image == self.cochains
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntertwineReport {
    pub convention: LcConvention,
    /// Per degree `n`, the first basis element with `ι D ≠ d ι` from degree `n`.
    pub failures: BTreeMap<usize, Option<String>>,
    pub checked: BTreeMap<usize, usize>,
    pub square: Option<String>,
    pub bijection: Vec<BijectionBlock>,
}

impl IntertwineReport {
    pub fn passed(&self) -> bool {
        self.failures.values().all(Option::is_none)
            && self.square.is_none()
            && self.bijection.iter().all(BijectionBlock::bijective)
    }
}

/// Dimension of the space of antisymmetric cochains of degree `n` whose
/// value on `(x_{a_1},…,x_{a_n})` has weight `w` and multidegree
/// `d − Σ mdeg θ^{a_k}`.
pub fn cochain_block_dim(lp: &LoopCEComplex, ring: &JetRing, label: &BlockLabel) -> usize {
    let n = label.degree;
    let m = ring.m();
    let mut index = BTreeMap::new();
    let mut acc = RankAccumulator::new();
    for t in tuples(m, n) {
        let mut md = label.multidegree.clone();
        for &a in &t {
            for (x, y) in md.iter_mut().zip(&lp.grading().odd[&(a as OddVar)].multidegree) {
                *x -= y;
            }
        }
        for le in 0..=label.weight {
            let coeffs = lp.basis(&BlockLabel::new(0, label.weight - le, md.clone()));
            if coeffs.is_empty() {
                continue;
            }
            for e in exponent_vectors(n.saturating_sub(1), le as u32) {
                for c in &coeffs {
                    let mut exps = e.clone();
                    exps.push(0);
                    let val = FormalPoly::monomial(n, exps, SparsePoly::term(Rational::one(), c.even.clone()));
                    let y = antisymmetrize(ring, &t, &val);
                    acc.insert(&y.to_vector(&mut index));
                }
            }
        }
    }
    acc.rank()
}

fn exponent_vectors(k: usize, total: u32) -> Vec<Vec<u32>> {
    if k == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for x in 0..=total {
        for mut rest in exponent_vectors(k - 1, total - x) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

/// The antisymmetric cochain generated by the value `val` at `tuple`.
fn antisymmetrize(ring: &JetRing, tuple: &[usize], val: &FormalPoly) -> LCCochain {
    let n = tuple.len();
    let mut out = LCCochain::zero(n);
    for (perm, odd) in permutations(n) {
        // slot k of the new tuple holds old slot perm[k]
        let new_tuple: Vec<usize> = perm.iter().map(|&s| tuple[s]).collect();
        let mut map = vec![0; n];
        for (k, &s) in perm.iter().enumerate() {
            map[s] = k;
        }
        let mut v = canonicalize_mod_delta_sum(ring, &val.embed(n, &map));
        if odd {
            v = v.neg();
        }
        out.add_value(new_tuple, &v);
    }
    out
}

/// Block bijection of `ι` for degrees `1..=max_degree`.
pub fn bijection_check(p: &PVAStructure, lp: &LoopCEComplex, window: &Window, max_degree: usize) -> Result<Vec<BijectionBlock>, LcError> {
    let labels: Vec<BlockLabel> = (1..=max_degree).flat_map(|n| block_labels(window, n)).collect();
    let mut out: Vec<BijectionBlock> = labels
        .par_iter()
        .map(|lab| -> Result<Option<BijectionBlock>, LcError> {
            let basis = lp.basis(lab);
            let cochains = cochain_block_dim(lp, &p.ring, lab);
            if basis.is_empty() && cochains == 0 {
                return Ok(None);
            }
            let mut index = BTreeMap::new();
            let mut kills_delta = true;
            let mut delta_rank = RankAccumulator::new();
            let mut pos: BTreeMap<SuperMonomial, usize> = BTreeMap::new();
            for (i, b) in basis.iter().enumerate() {
                pos.insert(b.clone(), i);
            }
            if lab.weight > 0 {
                for b in lp.basis(&lab.with_weight(lab.weight - 1)) {
                    let img = lp.apply_delta(&unit(&b));
                    let mut v = SparseVec::new();
                    for (mono, c) in img.terms() {
                        v.insert(pos[mono], c.clone());
                    }
                    delta_rank.insert(&v);
                    if !iota_transport(lp, &p.ring, &img)?.is_zero() {
                        kills_delta = false;
                    }
                }
            }
            let mut image = RankAccumulator::new();
            for b in &basis {
                image.insert(&iota_transport(lp, &p.ring, &unit(b))?.to_vector(&mut index));
            }
            Ok(Some(BijectionBlock {
                label: lab.clone(),
                forms: basis.len() - delta_rank.rank(),
                image: image.rank(),
                cochains,
                kills_delta,
            }))
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    out.sort_by(|a, b| a.label.cmp(&b.label));
    Ok(out)
}

/// `ι∘D = d∘ι` and `d∘d = 0` from every degree below `top`, and the block
/// bijection in degrees `1..=top`.
pub fn intertwine_check(
    p: &PVAStructure,
    lp: &LoopCEComplex,
    conv: LcConvention,
    window: &Window,
    top: usize,
) -> Result<IntertwineReport, LcError> {
    if top > MAX_DEGREE - 1 {
        return Err(LcError::Degree(top + 1));
    }
    let mut failures = BTreeMap::new();
    let mut checked = BTreeMap::new();
    for n in 0..top {
        failures.insert(n, first_intertwine_failure(p, lp, conv, window, n)?);
        checked.insert(n, block_labels(window, n).iter().map(|l| lp.basis(l).len()).sum());
    }
    let square = if top > 0 { square_check(p, lp, conv, window, top - 1)? } else { None };
    Ok(IntertwineReport {
        convention: conv,
        failures,
        checked,
        square,
        bijection: bijection_check(p, lp, window, top)?,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureReport {
    /// First `(slot, factors)` where the Leibniz expansion fails.
    pub failure: Option<String>,
    pub checked: usize,
}

/// Checks that `dY` on a product `f g` in any slot equals its extension by
/// the Leibniz rule from generator values, with `dY` computed once from the
/// defining formula on the product and once from the stored generator values.
pub fn polyderivation_closure_check(
    p: &PVAStructure,
    y: &LCCochain,
    conv: LcConvention,
    factors: &[(SparsePoly, SparsePoly)],
) -> Result<ClosureReport, LcError> {
    let ring = &p.ring;
    let dy = lc_differential(p, y, conv)?;
    let big = dy.degree;
    let mut checked = 0;
    for (f, g) in factors {
        let prod = ring.mul(f, g);
        for slot in 0..big {
            for t in tuples(ring.m(), big) {
                let mut args: Vec<SparsePoly> = t.iter().map(|&a| ring.x(a, 0)).collect();
                args[slot] = prod.clone();
                let direct = lc_differential_at(p, y, conv, &args);
                let extended = evaluate_canonical(ring, &dy, &args);
                checked += 1;
                if direct != extended {
                    return Ok(ClosureReport {
                        failure: Some(format!("slot {slot} on {} * {}", ring.display(f), ring.display(g))),
                        checked,
                    });
                }
            }
        }
    }
    Ok(ClosureReport { failure: None, checked })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_loop_complex;
    use crate::jet::{build_jet_ring, BaseRing};
    use crate::poisson::{cotangent_algebroid, PoissonStructure};

    fn plane() -> PoissonStructure {
        PoissonStructure::new(BaseRing::polynomial(&["x", "y"]), &[(0, 1, SparsePoly::one())]).unwrap()
    }

    fn torus() -> PoissonStructure {
        PoissonStructure::new(
            BaseRing::laurent(&["x", "y"]),
            &[(0, 1, &SparsePoly::var(0) * &SparsePoly::var(1))],
        )
        .unwrap()
    }

    fn setup(pi: PoissonStructure, cutoff: usize) -> (PVAStructure, LoopCEComplex) {
        let lp = build_loop_complex(&cotangent_algebroid(&pi).unwrap(), cutoff).unwrap();
        let p = PVAStructure::new(build_jet_ring(pi.base().clone(), cutoff), pi).unwrap();
        (p, lp)
    }

    #[test]
    fn canonical_form_examples() {
        let ring = build_jet_ring(BaseRing::polynomial(&["x"]), 3);
        let x0 = ring.x(0, 0);
        let p = FormalPoly::var(1, 0).mul_ring(&ring, &x0);
        assert_eq!(canonicalize_mod_delta_sum(&ring, &p), FormalPoly::constant(1, ring.x(0, 1).scale(&int(-1))));
        let c = FormalPoly::constant(1, x0.clone());
        assert_eq!(canonicalize_mod_delta_sum(&ring, &c), c);
        let p = FormalPoly::var(2, 1).mul_ring(&ring, &x0);
        let want = FormalPoly::var(2, 0).mul_ring(&ring, &x0).neg().minus(&FormalPoly::constant(2, ring.x(0, 1)));
        assert_eq!(canonicalize_mod_delta_sum(&ring, &p), want);
        let once = canonicalize_mod_delta_sum(&ring, &p);
        assert_eq!(canonicalize_mod_delta_sum(&ring, &once), once);
    }

    #[test]
    fn transport_of_single_generators() {
        let (p, lp) = setup(plane(), 2);
        let ring = &p.ring;
        let t0 = iota_transport(&lp, ring, &SuperElement::odd_var(lp.theta(0, 0))).unwrap();
        assert_eq!(t0.value(&[0]), FormalPoly::one(1));
        assert!(t0.value(&[1]).is_zero());
        // λ ↦ −δ on the constant 1
        let t1 = iota_transport(&lp, ring, &SuperElement::odd_var(lp.theta(0, 1))).unwrap();
        assert!(t1.is_zero());
        let f = &SuperElement::even_var(lp.x(0, 0)) * &SuperElement::odd_var(lp.theta(0, 1));
        let t = iota_transport(&lp, ring, &f).unwrap();
        assert_eq!(t.value(&[0]), FormalPoly::constant(1, ring.x(0, 1).scale(&int(-1))));
    }

    #[test]
    fn degree_two_transport_is_antisymmetric() {
        let (p, lp) = setup(plane(), 2);
        let ring = &p.ring;
        let f = &(&SuperElement::even_var(lp.x(0, 0)) * &SuperElement::odd_var(lp.theta(0, 0)))
            * &SuperElement::odd_var(lp.theta(1, 1));
        let y = iota_transport(&lp, ring, &f).unwrap();
        let args = [ring.x(0, 0), ring.x(1, 0)];
        let a = evaluate(ring, &y, &args.clone().map(|a| FormalPoly::constant(2, a)), &[vec![1, 0], vec![0, 1]], 2);
        let b = evaluate(ring, &y, &[FormalPoly::constant(2, args[1].clone()), FormalPoly::constant(2, args[0].clone())], &[vec![0, 1], vec![1, 0]], 2);
        assert_eq!(canonicalize_mod_delta_sum(ring, &a), canonicalize_mod_delta_sum(ring, &b).neg());
    }

    #[test]
    fn sesquilinearity_from_stored_values() {
        let (p, lp) = setup(torus(), 3);
        let ring = &p.ring;
        let f = &(&SuperElement::even_var(lp.x(1, 0)) * &SuperElement::odd_var(lp.theta(0, 0)))
            * &SuperElement::odd_var(lp.theta(1, 1));
        let y = iota_transport(&lp, ring, &f).unwrap();
        let a = ring.mul(&ring.x(0, 0), &ring.x(1, 0));
        let b = ring.x(1, 0);
        for slot in 0..2 {
            let mut args = vec![a.clone(), b.clone()];
            let plain = evaluate_canonical(ring, &y, &args);
            args[slot] = ring.delta(&args[slot]);
            let moved = evaluate_canonical(ring, &y, &args);
            let expected = canonicalize_mod_delta_sum(ring, &plain.mul_var(slot).neg());
            assert_eq!(moved, expected, "slot {slot}");
        }
    }

    #[test]
    fn degree_zero_differential_is_the_bracket() {
        let (p, _) = setup(plane(), 2);
        let ring = &p.ring;
        let d = lc_differential(&p, &LCCochain::class_of(&ring.x(0, 0)), LcConvention::STANDARD).unwrap();
        // {y λ x} = −1
        assert_eq!(d.value(&[1]), FormalPoly::constant(1, SparsePoly::constant(int(-1))));
        assert!(d.value(&[0]).is_zero());
        let one = lc_differential(&p, &LCCochain::class_of(&SparsePoly::one()), LcConvention::STANDARD).unwrap();
        assert!(one.is_zero());
    }

    #[test]
    fn convention_selection() {
        let (p, lp) = setup(plane(), 2);
        let reports = select_convention(&p, &lp, &Window::new(1, vec![1, 1], None)).unwrap();
        let ok: Vec<_> = reports.iter().filter(|r| r.admissible()).map(|r| r.convention).collect();
        assert!(ok.contains(&LcConvention::STANDARD), "{reports:?}");
    }

    #[test]
    fn intertwining_on_the_plane() {
        let (p, lp) = setup(plane(), 2);
        let rep = intertwine_check(&p, &lp, LcConvention::STANDARD, &Window::new(1, vec![1, 1], None), 2).unwrap();
        assert!(rep.passed(), "{rep:?}");
    }

    #[test]
    fn closure_under_the_differential() {
        let (p, lp) = setup(torus(), 3);
        let ring = &p.ring;
        let y = iota_transport(&lp, ring, &(&SuperElement::even_var(lp.x(0, 0)) * &SuperElement::odd_var(lp.theta(0, 0)))).unwrap();
        let factors = vec![(ring.x(0, 0), ring.x(1, 0)), (ring.x(1, 0), ring.x(1, 1))];
        let rep = polyderivation_closure_check(&p, &y, LcConvention::STANDARD, &factors).unwrap();
        assert_eq!(rep.failure, None);
        assert!(rep.checked > 0);
        let z = polyderivation_closure_check(&p, &LCCochain::zero(1), LcConvention::STANDARD, &factors).unwrap();
        assert_eq!(z.failure, None);
    }

    #[test]
    fn permutation_signs() {
        let perms = permutations(3);
        assert_eq!(perms.len(), 6);
        for (p, odd) in perms {
            let mut inv = 0;
            for i in 0..3 {
                for j in i + 1..3 {
                    if p[i] > p[j] {
                        inv += 1;
                    }
                }
            }
            assert_eq!(odd, inv % 2 == 1, "{p:?}");
        }
    }
}
