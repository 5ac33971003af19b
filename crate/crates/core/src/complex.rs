//! Chevalley–Eilenberg complexes of Lie algebroids on the base and on the
//! loop space, their δ-reduction, and cohomology computed one homogeneous
//! block at a time.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::One;
use rayon::prelude::*;

use crate::exact::{
    int, BlockLabel, DerivationTable, ExactError, GradingVector, Monomial, OddVar, Parity,
    RankAccumulator, Rational, SparseVec, SuperElement, SuperMonomial, Var,
    super_derivation_apply,
};
use crate::jet::BaseRing;
use crate::poisson::{
    algebroid_axiom_check, cotangent_algebroid, pi_sharp_iso, tangent_algebroid,
    transport_to_tangent, AxiomReport, FrameMap, LieAlgebroidData, PoissonError,
    PoissonStructure,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ComplexError {
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Poisson(#[from] PoissonError),
    #[error("algebroid axiom {axiom} fails on generators {generators}")]
    Algebroid { axiom: String, generators: String },
    #[error("{identity} fails on generator {generator}")]
    Invariant { identity: String, generator: String },
    #[error("differential is not homogeneous on generator {generator}; cohomology refused")]
    Inhomogeneous { generator: String },
    #[error("Poisson structure is degenerate: det = {det}")]
    Degenerate { det: String },
    #[error("the Euler contraction is only built for the tangent algebroid")]
    NotTangent,
    #[error("weight window {window} exceeds cutoff {cutoff}")]
    Window { window: usize, cutoff: usize },
}

/// Which homogeneous blocks to compute: weights `0..=weight`, multidegrees
/// with `|d_a| <= bounds[a]` and, if set, `Σ|d_a| <= total`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    pub weight: usize,
    pub bounds: Vec<i64>,
    pub total: Option<i64>,
}

impl Window {
    pub fn new(weight: usize, bounds: Vec<i64>, total: Option<i64>) -> Self {
        Window {
            weight,
            bounds,
            total,
        }
    }

    pub fn with_weight(&self, weight: usize) -> Self {
        Window {
            weight,
            ..self.clone()
        }
    }

    pub fn multidegrees(&self) -> Vec<Vec<i64>> {
        let mut out = vec![vec![]];
        for &b in &self.bounds {
            let mut next = Vec::new();
            for d in &out {
                for x in -b..=b {
                    let mut e = d.clone();
                    e.push(x);
                    next.push(e);
                }
            }
            out = next;
        }
        if let Some(t) = self.total {
            out.retain(|d| d.iter().map(|x| x.abs()).sum::<i64>() <= t);
        }
        out
    }

    pub fn contains(&self, d: &[i64]) -> bool {
        d.iter().zip(&self.bounds).all(|(x, b)| x.abs() <= *b)
            && self.total.is_none_or(|t| d.iter().map(|x| x.abs()).sum::<i64>() <= t)
    }
}

/// A graded-commutative algebra on even generators `x_{a,i}` (id `i*m + a`)
/// and odd generators `θ^α_i` (id `i*r + α`), `i <= cutoff`, with an odd
/// differential `D` and the even derivation δ. The base complex is the case
/// `cutoff = 0`.
#[derive(Clone, Debug)]
pub struct CEComplex {
    algebroid: LieAlgebroidData,
    cutoff: usize,
    d: DerivationTable,
    delta: DerivationTable,
    grading: GradingVector,
    inhomogeneous: Option<String>,
}

pub type LoopCEComplex = CEComplex;

impl CEComplex {
    pub fn algebroid(&self) -> &LieAlgebroidData {
        &self.algebroid
    }

    pub fn base(&self) -> &BaseRing {
        &self.algebroid.base
    }

    pub fn m(&self) -> usize {
        self.algebroid.base.m()
    }

    pub fn rank(&self) -> usize {
        self.algebroid.rank
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn grading(&self) -> &GradingVector {
        &self.grading
    }

    pub fn x(&self, a: usize, i: usize) -> Var {
        (i * self.m() + a) as Var
    }

    pub fn theta(&self, alpha: usize, i: usize) -> OddVar {
        (i * self.rank() + alpha) as OddVar
    }

    pub fn even_level(&self, v: Var) -> usize {
        v as usize / self.m()
    }

    pub fn even_index(&self, v: Var) -> usize {
        v as usize % self.m()
    }

    pub fn odd_level(&self, t: OddVar) -> usize {
        t as usize / self.rank()
    }

    pub fn odd_index(&self, t: OddVar) -> usize {
        t as usize % self.rank()
    }

    pub fn even_name(&self, v: Var) -> String {
        format!("{}_{}", self.base().name(self.even_index(v)), self.even_level(v))
    }

    /// `t<frame>_<level>`, with the frame named after the base variable when
    /// the rank matches.
    pub fn odd_name(&self, t: OddVar) -> String {
        let alpha = self.odd_index(t);
        let frame = if self.rank() == self.m() {
            self.base().name(alpha).to_string()
        } else {
            alpha.to_string()
        };
        format!("t{}_{}", frame, self.odd_level(t))
    }

    pub fn display(&self, s: &SuperElement) -> String {
        s.display(&|v| self.even_name(v), &|t| self.odd_name(t))
    }

    pub fn monomial_weight(&self, m: &SuperMonomial) -> i64 {
        m.even.weighted_degree(|v| self.even_level(v) as i64)
            + m.odd.iter().map(|&t| self.odd_level(t) as i64).sum::<i64>()
    }

    pub fn truncate(&self, s: &SuperElement) -> SuperElement {
        s.retain(|m| self.monomial_weight(m) <= self.cutoff as i64)
    }

    pub fn apply_d(&self, s: &SuperElement) -> SuperElement {
        let out = super_derivation_apply(&self.d, s, Parity::Odd)
            .expect("differential is tabulated on every generator");
        self.truncate(&out)
    }

    pub fn apply_delta(&self, s: &SuperElement) -> SuperElement {
        let out = super_derivation_apply(&self.delta, s, Parity::Even)
            .expect("δ is tabulated on every generator");
        self.truncate(&out)
    }

    /// Multiplies each term by its conformal weight.
    pub fn apply_euler(&self, s: &SuperElement) -> SuperElement {
        let mut out = SuperElement::zero();
        for (m, c) in s.terms() {
            out.add_term(m.clone(), c * int(self.monomial_weight(m)));
        }
        out
    }

    /// Every generator with its printed name, even ones first.
    pub fn generators(&self) -> Vec<(String, SuperElement)> {
        let mut out = Vec::new();
        for i in 0..=self.cutoff {
            for a in 0..self.m() {
                let v = self.x(a, i);
                out.push((self.even_name(v), SuperElement::even_var(v)));
            }
        }
        for i in 0..=self.cutoff {
            for alpha in 0..self.rank() {
                let t = self.theta(alpha, i);
                out.push((self.odd_name(t), SuperElement::odd_var(t)));
            }
        }
        out
    }

    pub fn d_image(&self, name: &str) -> Option<SuperElement> {
        self.generators()
            .into_iter()
            .find(|(n, _)| n == name)
            .map(|(_, g)| self.apply_d(&g))
    }

    /// First generator on which `D² = 0` fails, if any.
    pub fn check_d_squared(&self) -> Option<String> {
        self.generators()
            .into_iter()
            .find(|(_, g)| !self.apply_d(&self.apply_d(g)).is_zero())
            .map(|(n, _)| n)
    }

    /// First generator on which `Dδ = δD` fails, if any.
    pub fn check_d_delta(&self) -> Option<String> {
        self.generators()
            .into_iter()
            .find(|(_, g)| self.apply_d(&self.apply_delta(g)) != self.apply_delta(&self.apply_d(g)))
            .map(|(n, _)| n)
    }

    /// First generator whose δ-image leaves its multidegree or does not
    /// raise weight by exactly one.
    pub fn check_delta_grading(&self) -> Option<String> {
        for (n, g) in self.generators() {
            let lab = self.grading.homogeneous_label(&g).ok().flatten();
            let img = self.apply_delta(&g);
            if img.is_zero() {
                continue;
            }
            let out = self.grading.homogeneous_label(&img).ok().flatten();
            match (lab, out) {
                (Some(l), Some(o)) if o.weight == l.weight + 1 && o.multidegree == l.multidegree => {}
                _ => return Some(n),
            }
        }
        None
    }

    /// The generator on which `D` is not homogeneous, if any.
    pub fn inhomogeneous_generator(&self) -> Option<&str> {
        self.inhomogeneous.as_deref()
    }

    fn find_inhomogeneous(&self) -> Option<String> {
        for (n, g) in self.generators() {
            let Ok(Some(l)) = self.grading.homogeneous_label(&g) else {
                return Some(n);
            };
            let img = self.apply_d(&g);
            if img.is_zero() {
                continue;
            }
            match self.grading.homogeneous_label(&img) {
                Ok(Some(o)) if o == l.with_degree(l.degree + 1) => {}
                _ => return Some(n),
            }
        }
        None
    }

    fn odd_subsets(&self, n: usize, max_weight: usize) -> Vec<Vec<OddVar>> {
        let gens: Vec<OddVar> = (0..=max_weight.min(self.cutoff))
            .flat_map(|i| (0..self.rank()).map(move |a| (i, a)))
            .map(|(i, a)| self.theta(a, i))
            .collect();
        let mut out = Vec::new();
        let mut cur = Vec::new();
        self.odd_rec(&gens, 0, n, max_weight, &mut cur, &mut out);
        out
    }

    fn odd_rec(
        &self,
        gens: &[OddVar],
        start: usize,
        n: usize,
        budget: usize,
        cur: &mut Vec<OddVar>,
        out: &mut Vec<Vec<OddVar>>,
    ) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for k in start..gens.len() {
            let l = self.odd_level(gens[k]);
            if l > budget {
                continue;
            }
            cur.push(gens[k]);
            self.odd_rec(gens, k + 1, n, budget - l, cur, out);
            cur.pop();
        }
    }

    /// Even monomials of the given weight and multidegree.
    fn even_monomials(&self, weight: usize, target: &[i64]) -> Vec<Monomial> {
        let vars: Vec<Var> = (1..=weight.min(self.cutoff))
            .flat_map(|i| (0..self.m()).map(move |a| (a, i)))
            .map(|(a, i)| self.x(a, i))
            .collect();
        let mut out = Vec::new();
        let mut cur: Vec<(Var, i32)> = Vec::new();
        self.even_rec(&vars, 0, weight, target, &mut cur, &mut out);
        out
    }

    fn even_rec(
        &self,
        vars: &[Var],
        start: usize,
        budget: usize,
        target: &[i64],
        cur: &mut Vec<(Var, i32)>,
        out: &mut Vec<Monomial>,
    ) {
        if budget == 0 {
            let mut level0 = target.to_vec();
            for &(v, e) in cur.iter() {
                level0[self.even_index(v)] -= e as i64;
            }
            for (a, &e) in level0.iter().enumerate() {
                if e < 0 && !self.base().is_invertible(a) {
                    return;
                }
            }
            let pairs = cur
                .iter()
                .copied()
                .chain(level0.iter().enumerate().map(|(a, &e)| (a as Var, e as i32)));
            out.push(Monomial::from_pairs(pairs));
            return;
        }
        for k in start..vars.len() {
            let l = self.even_level(vars[k]);
            let mut e = 1;
            while l * e <= budget {
                cur.push((vars[k], e as i32));
                self.even_rec(vars, k + 1, budget - l * e, target, cur, out);
                cur.pop();
                e += 1;
            }
        }
    }

    fn odd_multidegree(&self, word: &[OddVar]) -> Vec<i64> {
        let mut d = vec![0i64; self.m()];
        for t in word {
            let g = &self.grading.odd[t];
            for (acc, x) in d.iter_mut().zip(&g.multidegree) {
                *acc += x;
            }
        }
        d
    }

    /// Sorted monomial basis of one homogeneous block.
    pub fn basis(&self, label: &BlockLabel) -> Vec<SuperMonomial> {
        if label.weight < 0 || label.weight as usize > self.cutoff {
            return Vec::new();
        }
        let w = label.weight as usize;
        let mut out = Vec::new();
        for word in self.odd_subsets(label.degree, w) {
            let ws: usize = word.iter().map(|&t| self.odd_level(t)).sum();
            let md = self.odd_multidegree(&word);
            let target: Vec<i64> = label.multidegree.iter().zip(&md).map(|(d, s)| d - s).collect();
            for even in self.even_monomials(w - ws, &target) {
                out.push(SuperMonomial {
                    even,
                    odd: word.clone(),
                });
            }
        }
        out.sort();
        out
    }

    /// Largest cohomological degree with a nonempty block at weight `w`.
    pub fn max_degree(&self, w: usize) -> usize {
        let mut levels: Vec<usize> = (0..=w.min(self.cutoff))
            .flat_map(|i| std::iter::repeat_n(i, self.rank()))
            .collect();
        levels.sort();
        let mut total = 0;
        let mut n = 0;
        for l in levels {
            if total + l > w {
                break;
            }
            total += l;
            n += 1;
        }
        n
    }

    /// The block with its outgoing differential and incoming δ.
    pub fn block(&self, label: &BlockLabel) -> Result<ComplexBlock, ComplexError> {
        let basis = self.basis(label);
        let target = self.basis(&label.with_degree(label.degree + 1));
        let source = if label.weight > 0 {
            self.basis(&label.with_weight(label.weight - 1))
        } else {
            Vec::new()
        };
        let tindex = index_of(&target);
        let bindex = index_of(&basis);
        let d_columns = basis
            .iter()
            .map(|b| self.to_vector(&self.apply_d(&unit(b)), &tindex, b))
            .collect::<Result<Vec<_>, _>>()?;
        let delta_columns = source
            .iter()
            .map(|b| self.to_vector(&self.apply_delta(&unit(b)), &bindex, b))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ComplexBlock {
            label: label.clone(),
            basis,
            d_columns,
            delta_columns,
        })
    }

    fn to_vector(
        &self,
        s: &SuperElement,
        index: &BTreeMap<SuperMonomial, usize>,
        from: &SuperMonomial,
    ) -> Result<SparseVec, ComplexError> {
        let mut v = SparseVec::new();
        for (m, c) in s.terms() {
            match index.get(m) {
                Some(&i) => {
                    v.insert(i, c.clone());
                }
                None => {
                    return Err(ComplexError::Invariant {
                        identity: "block closure".into(),
                        generator: self.display(&unit(from)),
                    })
                }
            }
        }
        Ok(v)
    }
}

fn unit(m: &SuperMonomial) -> SuperElement {
    SuperElement::term(Rational::one(), m.clone())
}

fn index_of(basis: &[SuperMonomial]) -> BTreeMap<SuperMonomial, usize> {
    basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect()
}

/// One `(degree, weight, multidegree)` block: its basis, the columns of `D`
/// into the next degree, and the columns of δ from weight one lower.
#[derive(Clone, Debug)]
pub struct ComplexBlock {
    pub label: BlockLabel,
    pub basis: Vec<SuperMonomial>,
    pub d_columns: Vec<SparseVec>,
    pub delta_columns: Vec<SparseVec>,
}

fn check_axioms(l: &LieAlgebroidData) -> Result<(), ComplexError> {
    match algebroid_axiom_check(l) {
        AxiomReport::Pass => Ok(()),
        AxiomReport::Counterexample { axiom, generators, .. } => Err(ComplexError::Algebroid {
            axiom: axiom.to_string(),
            generators: generators.iter().map(usize::to_string).collect::<Vec<_>>().join(","),
        }),
    }
}

/// `d x_a = Σ_α ρ_α^a θ^α` and `d θ^γ = −Σ_{α<β} c_{αβ}^γ θ^α θ^β` on level 0.
fn base_images(l: &LieAlgebroidData, theta: impl Fn(usize) -> OddVar) -> (Vec<SuperElement>, Vec<SuperElement>) {
    let m = l.base.m();
    let r = l.rank;
    let even = (0..m)
        .map(|a| {
            let mut s = SuperElement::zero();
            for alpha in 0..r {
                let rho = &l.anchor[alpha][a];
                if !rho.is_zero() {
                    s += &SuperElement::from_poly(rho).mul_odd(theta(alpha));
                }
            }
            s
        })
        .collect();
    let odd = (0..r)
        .map(|gamma| {
            let mut s = SuperElement::zero();
            for alpha in 0..r {
                for beta in alpha + 1..r {
                    let c = &l.structure[alpha][beta][gamma];
                    if !c.is_zero() {
                        let word = &SuperElement::odd_var(theta(alpha)) * &SuperElement::odd_var(theta(beta));
                        s -= &(&SuperElement::from_poly(c) * &word);
                    }
                }
            }
            s
        })
        .collect();
    (even, odd)
}

trait MulOdd {
    fn mul_odd(&self, t: OddVar) -> SuperElement;
}

impl MulOdd for SuperElement {
    fn mul_odd(&self, t: OddVar) -> SuperElement {
        self * &SuperElement::odd_var(t)
    }
}

/// Multidegree of each odd generator, read off the anchor so that
/// `d x_a` is homogeneous; `e_α` when the anchor is silent.
fn infer_odd_multidegrees(l: &LieAlgebroidData) -> Vec<Vec<i64>> {
    let m = l.base.m();
    (0..l.rank)
        .map(|alpha| {
            for a in 0..m {
                if let Some((mono, _)) = l.anchor[alpha][a].terms().next() {
                    let mut d = vec![0i64; m];
                    d[a] += 1;
                    for (v, e) in mono.iter() {
                        d[v as usize] -= e as i64;
                    }
                    return d;
                }
            }
            let mut d = vec![0i64; m];
            if alpha < m {
                d[alpha] = 1;
            }
            d
        })
        .collect()
}

fn assemble(l: &LieAlgebroidData, cutoff: usize, d: DerivationTable) -> CEComplex {
    let m = l.base.m();
    let r = l.rank;
    let mut delta = DerivationTable::new();
    let mut grading = GradingVector::new(m);
    let odd_md = infer_odd_multidegrees(l);
    for i in 0..=cutoff {
        for a in 0..m {
            let v = (i * m + a) as Var;
            let img = if i < cutoff {
                SuperElement::even_var(((i + 1) * m + a) as Var).scale(&int(i as i64 + 1))
            } else {
                SuperElement::zero()
            };
            delta.set_even(v, img);
            let mut md = vec![0i64; m];
            md[a] = 1;
            grading.set_even(v, i as i64, md);
        }
        for alpha in 0..r {
            let t = (i * r + alpha) as OddVar;
            let img = if i < cutoff {
                SuperElement::odd_var(((i + 1) * r + alpha) as OddVar).scale(&int(i as i64 + 1))
            } else {
                SuperElement::zero()
            };
            delta.set_odd(t, img);
            grading.set_odd(t, i as i64, odd_md[alpha].clone());
        }
    }
    CEComplex {
        algebroid: l.clone(),
        cutoff,
        d,
        delta,
        grading,
        inhomogeneous: None,
    }
}

fn verify(c: &mut CEComplex) -> Result<(), ComplexError> {
    c.inhomogeneous = c.find_inhomogeneous();
    if let Some(g) = c.check_d_squared() {
        return Err(ComplexError::Invariant {
            identity: "D^2 = 0".into(),
            generator: g,
        });
    }
    if let Some(g) = c.check_d_delta() {
        return Err(ComplexError::Invariant {
            identity: "D delta = delta D".into(),
            generator: g,
        });
    }
    Ok(())
}

pub fn build_base_complex(l: &LieAlgebroidData) -> Result<CEComplex, ComplexError> {
    check_axioms(l)?;
    let (even, odd) = base_images(l, |alpha| alpha as OddVar);
    let mut d = DerivationTable::new();
    for (a, img) in even.into_iter().enumerate() {
        d.set_even(a as Var, img);
    }
    for (gamma, img) in odd.into_iter().enumerate() {
        d.set_odd(gamma as OddVar, img);
    }
    let mut c = assemble(l, 0, d);
    verify(&mut c)?;
    Ok(c)
}

/// Level-0 differential from the algebroid, higher levels by
/// `D(g_i) = δ^{(i)}(D g_0)`.
pub fn build_loop_complex(l: &LieAlgebroidData, cutoff: usize) -> Result<LoopCEComplex, ComplexError> {
    check_axioms(l)?;
    let m = l.base.m();
    let r = l.rank;
    let (even, odd) = base_images(l, |alpha| alpha as OddVar);
    // δ alone first, to propagate
    let skeleton = assemble(l, cutoff, DerivationTable::new());
    let mut d = DerivationTable::new();
    let mut propagate = |level0: SuperElement, id: &dyn Fn(usize) -> u32, odd_gen: bool| {
        let mut cur = level0;
        for i in 0..=cutoff {
            if odd_gen {
                d.set_odd(id(i), cur.clone());
            } else {
                d.set_even(id(i), cur.clone());
            }
            cur = skeleton.apply_delta(&cur).scale(&int(i as i64 + 1).recip());
        }
    };
    for (a, img) in even.into_iter().enumerate() {
        propagate(img, &|i| (i * m + a) as u32, false);
    }
    for (gamma, img) in odd.into_iter().enumerate() {
        propagate(img, &|i| (i * r + gamma) as u32, true);
    }
    let mut c = assemble(l, cutoff, d);
    verify(&mut c)?;
    Ok(c)
}

/// A block modulo the image of δ from weight one lower. Weight-0 blocks are
/// returned unchanged.
#[derive(Clone, Debug)]
pub struct ReducedBlock {
    pub block: ComplexBlock,
    pub delta_image_rank: usize,
    pub dim: usize,
}

pub fn delta_reduce(c: &CEComplex, label: &BlockLabel) -> Result<ReducedBlock, ComplexError> {
    let block = c.block(label)?;
    let mut acc = RankAccumulator::new();
    for v in &block.delta_columns {
        acc.insert(v);
    }
    let r = acc.rank();
    Ok(ReducedBlock {
        dim: block.basis.len() - r,
        delta_image_rank: r,
        block,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockResult {
    pub label: BlockLabel,
    /// Dimension before δ-reduction.
    pub ambient_dim: usize,
    /// Dimension of the block in the complex that was computed.
    pub dim: usize,
    pub rank_in: usize,
    pub rank_out: usize,
    pub h: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyReport {
    pub reduced: bool,
    pub window: Window,
    pub blocks: Vec<BlockResult>,
}

impl CohomologyReport {
    pub fn h(&self, label: &BlockLabel) -> usize {
        self.blocks.iter().find(|b| &b.label == label).map_or(0, |b| b.h)
    }

    /// Total cohomology per degree over blocks accepted by `keep`.
    pub fn totals<F: Fn(&BlockLabel) -> bool>(&self, keep: F) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        for b in &self.blocks {
            if keep(&b.label) {
                *out.entry(b.label.degree).or_insert(0) += b.h;
            }
        }
        out
    }

    pub fn nonzero(&self) -> impl Iterator<Item = &BlockResult> {
        self.blocks.iter().filter(|b| b.h > 0)
    }

    /// Per `(weight, multidegree)` column, `Σ(−1)^n dim = Σ(−1)^n h`.
    pub fn euler_consistent(&self) -> bool {
        let mut cols: BTreeMap<(i64, Vec<i64>), (i64, i64)> = BTreeMap::new();
        for b in &self.blocks {
            let s = if b.label.degree % 2 == 0 { 1 } else { -1 };
            let e = cols.entry((b.label.weight, b.label.multidegree.clone())).or_default();
            e.0 += s * b.dim as i64;
            e.1 += s * b.h as i64;
        }
        cols.values().all(|(a, b)| a == b)
    }
}

fn vectors_of(
    c: &CEComplex,
    elems: impl Iterator<Item = SuperElement>,
    index: &BTreeMap<SuperMonomial, usize>,
    what: &str,
) -> Result<Vec<SparseVec>, ComplexError> {
    elems
        .map(|s| {
            let mut v = SparseVec::new();
            for (m, coef) in s.terms() {
                let Some(&i) = index.get(m) else {
                    return Err(ComplexError::Invariant {
                        identity: format!("{what} block closure"),
                        generator: c.display(&unit(m)),
                    });
                };
                v.insert(i, coef.clone());
            }
            Ok(v)
        })
        .collect()
}

/// Cohomology of one `(weight, multidegree)` column in every degree.
fn column(c: &CEComplex, w: usize, d: &[i64], reduce: bool) -> Result<Vec<BlockResult>, ComplexError> {
    let top = c.max_degree(w);
    let lab = |n: usize, w: usize| BlockLabel::new(n, w as i64, d.to_vec());
    let bases: Vec<Vec<SuperMonomial>> = (0..=top + 1).map(|n| c.basis(&lab(n, w))).collect();
    if bases.iter().all(Vec::is_empty) {
        return Ok(Vec::new());
    }
    let indices: Vec<_> = bases.iter().map(|b| index_of(b)).collect();
    // δ-image inside each degree
    let mut images: Vec<RankAccumulator> = Vec::with_capacity(top + 2);
    for n in 0..=top + 1 {
        let mut acc = RankAccumulator::new();
        if reduce && w > 0 {
            let prev = c.basis(&lab(n, w - 1));
            let vs = vectors_of(c, prev.iter().map(|p| c.apply_delta(&unit(p))), &indices[n], "delta")?;
            for v in &vs {
                acc.insert(v);
            }
        }
        images.push(acc);
    }
    // rank of D from degree n, read in the quotient
    let mut rank_d = Vec::with_capacity(top + 1);
    for n in 0..=top {
        let vs = vectors_of(c, bases[n].iter().map(|b| c.apply_d(&unit(b))), &indices[n + 1], "D")?;
        let mut acc = images[n + 1].clone();
        for v in &vs {
            acc.insert(v);
        }
        rank_d.push(acc.rank() - images[n + 1].rank());
    }
    let mut out = Vec::new();
    for n in 0..=top {
        if bases[n].is_empty() {
            continue;
        }
        let dim = bases[n].len() - images[n].rank();
        let rank_in = if n > 0 { rank_d[n - 1] } else { 0 };
        out.push(BlockResult {
            label: lab(n, w),
            ambient_dim: bases[n].len(),
            dim,
            rank_in,
            rank_out: rank_d[n],
            h: dim - rank_d[n] - rank_in,
        });
    }
    Ok(out)
}

/// Cohomology of every block in the window, with or without the quotient by
/// the image of δ. Columns run in parallel; the result is sorted by label.
pub fn blockwise_cohomology(c: &CEComplex, reduce: bool, window: &Window) -> Result<CohomologyReport, ComplexError> {
    if let Some(g) = &c.inhomogeneous {
        return Err(ComplexError::Inhomogeneous { generator: g.clone() });
    }
    if window.weight > c.cutoff {
        return Err(ComplexError::Window {
            window: window.weight,
            cutoff: c.cutoff,
        });
    }
    let cols: Vec<(usize, Vec<i64>)> = (0..=window.weight)
        .flat_map(|w| window.multidegrees().into_iter().map(move |d| (w, d)))
        .collect();
    let results: Vec<Vec<BlockResult>> = cols
        .par_iter()
        .map(|(w, d)| column(c, *w, d, reduce))
        .collect::<Result<_, _>>()?;
    let mut blocks: Vec<BlockResult> = results.into_iter().flatten().collect();
    blocks.sort_by(|a, b| a.label.cmp(&b.label));
    Ok(CohomologyReport {
        reduced: reduce,
        window: window.clone(),
        blocks,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartanReport {
    /// First generator where `Dι_η + ι_ηD ≠ Lie_η`.
    pub homotopy: Option<String>,
    /// First generator where `[Lie_η, Lie_δ] ≠ Lie_δ`.
    pub euler_delta: Option<String>,
    /// First block basis element of positive weight `w` where the homotopy
    /// is not `w·Id`.
    pub block_homotopy: Option<String>,
    pub blocks_checked: usize,
    pub unreduced: CohomologyReport,
}

impl CartanReport {
    pub fn positive_weight_acyclic(&self) -> bool {
        self.unreduced.blocks.iter().all(|b| b.label.weight == 0 || b.h == 0)
    }

    pub fn passed(&self) -> bool {
        self.homotopy.is_none()
            && self.euler_delta.is_none()
            && self.block_homotopy.is_none()
            && self.positive_weight_acyclic()
    }
}

fn is_tangent(l: &LieAlgebroidData) -> bool {
    let t = tangent_algebroid(&l.base);
    l.rank == t.rank && l.anchor == t.anchor && l.structure == t.structure
}

/// `ι_η`: `θ^a_i ↦ i·x_{a,i}`, `x ↦ 0`, as an odd derivation.
pub fn euler_contraction(c: &CEComplex) -> Result<DerivationTable, ComplexError> {
    if !is_tangent(&c.algebroid) {
        return Err(ComplexError::NotTangent);
    }
    let mut iota = DerivationTable::new();
    for i in 0..=c.cutoff {
        for a in 0..c.m() {
            iota.set_even(c.x(a, i), SuperElement::zero());
            iota.set_odd(c.theta(a, i), SuperElement::even_var(c.x(a, i)).scale(&int(i as i64)));
        }
    }
    Ok(iota)
}

pub fn cartan_suite(c: &CEComplex, window: &Window) -> Result<CartanReport, ComplexError> {
    let iota = euler_contraction(c)?;
    let contract = |s: &SuperElement| {
        super_derivation_apply(&iota, s, Parity::Odd).expect("contraction covers every generator")
    };
    let homotopy = |s: &SuperElement| &c.apply_d(&contract(s)) + &contract(&c.apply_d(s));
    let gens = c.generators();
    let homotopy_fail = gens
        .iter()
        .find(|(_, g)| homotopy(g) != c.apply_euler(g))
        .map(|(n, _)| n.clone());
    let euler_delta = gens
        .iter()
        .find(|(_, g)| {
            let lhs = &c.apply_euler(&c.apply_delta(g)) - &c.apply_delta(&c.apply_euler(g));
            lhs != c.apply_delta(g)
        })
        .map(|(n, _)| n.clone());
    let mut block_fail = None;
    let mut checked = 0;
    'outer: for w in 1..=window.weight {
        for d in window.multidegrees() {
            for n in 0..=c.max_degree(w) {
                for b in c.basis(&BlockLabel::new(n, w as i64, d.clone())) {
                    checked += 1;
                    let s = unit(&b);
                    if homotopy(&s) != s.scale(&int(w as i64)) {
                        block_fail = Some(c.display(&s));
                        break 'outer;
                    }
                }
            }
        }
    }
    let unreduced = blockwise_cohomology(c, false, window)?;
    Ok(CartanReport {
        homotopy: homotopy_fail,
        euler_delta,
        block_homotopy: block_fail,
        blocks_checked: checked,
        unreduced,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightZeroComparison {
    /// First weight-0 block whose basis or differential differs from the
    /// base complex.
    pub mismatch: Option<String>,
    pub blocks_compared: usize,
    pub reduced: CohomologyReport,
    /// Reduced blocks of positive weight with nonzero cohomology.
    pub positive_failures: Vec<BlockResult>,
}

impl WeightZeroComparison {
    pub fn passed(&self) -> bool {
        self.mismatch.is_none() && self.positive_failures.is_empty()
    }
}

pub fn compare_weight_zero(
    lp: &LoopCEComplex,
    base: &CEComplex,
    window: &Window,
) -> Result<WeightZeroComparison, ComplexError> {
    let mut mismatch = None;
    let mut compared = 0;
    'outer: for d in window.multidegrees() {
        for n in 0..=lp.max_degree(0).max(base.max_degree(0)) {
            let lab = BlockLabel::new(n, 0, d.clone());
            let (bl, bb) = (lp.basis(&lab), base.basis(&lab));
            if bl.is_empty() && bb.is_empty() {
                continue;
            }
            compared += 1;
            if bl != bb {
                mismatch = Some(format!("basis {lab}"));
                break 'outer;
            }
            for m in &bl {
                if lp.apply_d(&unit(m)) != base.apply_d(&unit(m)) {
                    mismatch = Some(format!("differential {lab} on {}", lp.display(&unit(m))));
                    break 'outer;
                }
            }
        }
    }
    let reduced = blockwise_cohomology(lp, true, window)?;
    let positive_failures = reduced
        .blocks
        .iter()
        .filter(|b| b.label.weight > 0 && b.h > 0)
        .cloned()
        .collect();
    Ok(WeightZeroComparison {
        mismatch,
        blocks_compared: compared,
        reduced,
        positive_failures,
    })
}

/// Substitutes odd generators in a form by the given images; even
/// generators are fixed.
fn substitute_odd(s: &SuperElement, image: &dyn Fn(OddVar) -> SuperElement) -> SuperElement {
    let mut out = SuperElement::zero();
    for (m, coef) in s.terms() {
        let mut t = SuperElement::term(coef.clone(), SuperMonomial { even: m.even.clone(), odd: vec![] });
        for &o in &m.odd {
            t = &t * &image(o);
        }
        out += &t;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransportReport {
    /// First generator where `Φ D_tan ≠ D_cot Φ`.
    pub chain_map: Option<String>,
    /// First `(b, α)` where the diagonal of `Φ` differs from `π^{αb}`.
    pub diagonal: Option<String>,
    /// Whether conjugating the cotangent data by `π♯` gives the tangent data.
    pub frame_change: bool,
}

impl TransportReport {
    pub fn passed(&self) -> bool {
        self.chain_map.is_none() && self.diagonal.is_none() && self.frame_change
    }
}

/// Checks the chain map `Φ`: `x_{a,i} ↦ x_{a,i}`, `θ^b_i ↦ D_cot x_{b,i}`
/// from the tangent loop complex to the cotangent one.
pub fn transport_check(pi: &PoissonStructure, tan: &LoopCEComplex, cot: &LoopCEComplex) -> TransportReport {
    let phi_odd = |t: OddVar| {
        let b = tan.odd_index(t);
        let i = tan.odd_level(t);
        cot.apply_d(&SuperElement::even_var(cot.x(b, i)))
    };
    let phi = |s: &SuperElement| cot.truncate(&substitute_odd(s, &phi_odd));
    let chain_map = tan
        .generators()
        .into_iter()
        .find(|(_, g)| phi(&tan.apply_d(g)) != cot.apply_d(&phi(g)))
        .map(|(n, _)| n);
    let mut diagonal = None;
    'outer: for i in 0..=tan.cutoff() {
        for b in 0..tan.m() {
            let img = phi_odd(tan.theta(b, i));
            for alpha in 0..cot.rank() {
                let coeff = img.coefficient_of_word(&[cot.theta(alpha, i)]);
                if coeff != *pi.entry(alpha, b) {
                    diagonal = Some(format!("{} {}", tan.odd_name(tan.theta(b, i)), cot.odd_name(cot.theta(alpha, i))));
                    break 'outer;
                }
            }
        }
    }
    let frame_change = match transport_to_tangent(pi) {
        Some(moved) => {
            let t = tangent_algebroid(pi.base());
            moved.anchor == t.anchor && moved.structure == t.structure
        }
        None => false,
    };
    TransportReport {
        chain_map,
        diagonal,
        frame_change,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoremReport {
    pub comparison: WeightZeroComparison,
    pub derham: CohomologyReport,
    /// First `(degree, multidegree)` where weight-0 reduced cohomology and
    /// de Rham cohomology of the base differ.
    pub derham_mismatch: Option<String>,
    pub transport: TransportReport,
}

impl TheoremReport {
    pub fn verdict(&self) -> bool {
        self.comparison.passed() && self.derham_mismatch.is_none() && self.transport.passed()
    }

    pub fn weight_zero_totals(&self) -> BTreeMap<usize, usize> {
        self.comparison.reduced.totals(|l| l.weight == 0)
    }
}

/// Reduced cotangent loop cohomology against base de Rham cohomology.
pub fn theorem_symplectic_check(
    pi: &PoissonStructure,
    cutoff: usize,
    window: &Window,
) -> Result<TheoremReport, ComplexError> {
    if let FrameMap::Degenerate { det } = pi_sharp_iso(pi) {
        return Err(ComplexError::Degenerate {
            det: pi.base().display(&det),
        });
    }
    let cot = cotangent_algebroid(pi)?;
    let lp = build_loop_complex(&cot, cutoff)?;
    let base = build_base_complex(&cot)?;
    let comparison = compare_weight_zero(&lp, &base, window)?;
    let tan = tangent_algebroid(pi.base());
    let derham = blockwise_cohomology(&build_base_complex(&tan)?, false, &window.with_weight(0))?;
    let mut keys: BTreeSet<(usize, Vec<i64>)> = BTreeSet::new();
    for b in comparison.reduced.blocks.iter().filter(|b| b.label.weight == 0).chain(&derham.blocks) {
        keys.insert((b.label.degree, b.label.multidegree.clone()));
    }
    let derham_mismatch = keys.into_iter().find_map(|(n, d)| {
        let lab = BlockLabel::new(n, 0, d);
        let (a, b) = (comparison.reduced.h(&lab), derham.h(&lab));
        (a != b).then(|| format!("{lab}: loop {a}, de Rham {b}"))
    });
    let tan_loop = build_loop_complex(&tan, cutoff)?;
    let transport = transport_check(pi, &tan_loop, &lp);
    Ok(TheoremReport {
        comparison,
        derham,
        derham_mismatch,
        transport,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{Monomial, SparsePoly};

    fn v(i: u32) -> SparsePoly {
        SparsePoly::var(i)
    }

    fn plane() -> PoissonStructure {
        PoissonStructure::new(BaseRing::polynomial(&["x", "y"]), &[(0, 1, SparsePoly::one())]).unwrap()
    }

    fn torus() -> PoissonStructure {
        PoissonStructure::new(BaseRing::laurent(&["x", "y"]), &[(0, 1, &v(0) * &v(1))]).unwrap()
    }

    fn theta(t: OddVar) -> SuperElement {
        SuperElement::odd_var(t)
    }

    #[test]
    fn base_de_rham_differential() {
        let c = build_base_complex(&tangent_algebroid(&BaseRing::polynomial(&["x", "y"]))).unwrap();
        assert_eq!(c.d_image("x_0").unwrap(), theta(0));
        assert!(c.d_image("tx_0").unwrap().is_zero());
    }

    #[test]
    fn base_cotangent_differential() {
        let c = build_base_complex(&cotangent_algebroid(&plane()).unwrap()).unwrap();
        assert_eq!(c.d_image("x_0").unwrap(), -&theta(1));
        assert_eq!(c.d_image("y_0").unwrap(), theta(0));
        let z = PoissonStructure::new(BaseRing::polynomial(&["x", "y"]), &[]).unwrap();
        let c = build_base_complex(&cotangent_algebroid(&z).unwrap()).unwrap();
        assert!(c.generators().iter().all(|(_, g)| c.apply_d(g).is_zero()));
    }

    #[test]
    fn propagated_differential() {
        let c = build_loop_complex(&cotangent_algebroid(&plane()).unwrap(), 1).unwrap();
        assert_eq!(c.d_image("x_1").unwrap(), -&theta(c.theta(1, 1)));
        let t = build_loop_complex(&tangent_algebroid(&BaseRing::polynomial(&["x", "y"])), 3).unwrap();
        for i in 0..=3 {
            assert_eq!(t.apply_d(&SuperElement::even_var(t.x(1, i))), theta(t.theta(1, i)));
        }
    }

    #[test]
    fn identities_on_generators() {
        for p in [plane(), torus()] {
            let c = build_loop_complex(&cotangent_algebroid(&p).unwrap(), 3).unwrap();
            assert_eq!(c.check_d_squared(), None);
            assert_eq!(c.check_d_delta(), None);
            assert_eq!(c.check_delta_grading(), None);
            assert_eq!(c.inhomogeneous_generator(), None);
        }
    }

    #[test]
    fn odd_multidegrees_follow_the_anchor() {
        let c = build_loop_complex(&cotangent_algebroid(&plane()).unwrap(), 0).unwrap();
        assert_eq!(c.grading().odd[&0].multidegree, vec![0, 1]);
        assert_eq!(c.grading().odd[&1].multidegree, vec![1, 0]);
        let t = build_loop_complex(&cotangent_algebroid(&torus()).unwrap(), 0).unwrap();
        assert_eq!(t.grading().odd[&0].multidegree, vec![-1, 0]);
    }

    #[test]
    fn inhomogeneous_input_is_refused() {
        // {x,y} = 1 + x has no multidegree
        let p = PoissonStructure::new(
            BaseRing::polynomial(&["x", "y"]),
            &[(0, 1, &SparsePoly::one() + &v(0))],
        )
        .unwrap();
        let c = build_loop_complex(&cotangent_algebroid(&p).unwrap(), 1).unwrap();
        let err = blockwise_cohomology(&c, true, &Window::new(1, vec![1, 1], None)).unwrap_err();
        assert!(matches!(err, ComplexError::Inhomogeneous { .. }));
    }

    #[test]
    fn weight_zero_blocks_are_unchanged_by_reduction() {
        let c = build_loop_complex(&cotangent_algebroid(&plane()).unwrap(), 2).unwrap();
        let lab = BlockLabel::new(0, 0, vec![1, 1]);
        let r = delta_reduce(&c, &lab).unwrap();
        assert_eq!(r.delta_image_rank, 0);
        assert_eq!(r.dim, r.block.basis.len());
    }

    #[test]
    fn reduction_of_a_weight_one_block() {
        // (0, 1, (1,0)) on k[x,y]: span {x_1}, and δ(x_0) = x_1
        let c = build_loop_complex(&tangent_algebroid(&BaseRing::polynomial(&["x", "y"])), 2).unwrap();
        let r = delta_reduce(&c, &BlockLabel::new(0, 1, vec![1, 0])).unwrap();
        assert_eq!(r.block.basis.len(), 1);
        assert_eq!(r.dim, 0);
        let r = delta_reduce(&c, &BlockLabel::new(0, 1, vec![2, 1])).unwrap();
        // x0 y0 x1, x0^2 y1 against δ(x0^2 y0)
        assert_eq!((r.block.basis.len(), r.delta_image_rank, r.dim), (2, 1, 1));
    }

    #[test]
    fn de_rham_of_the_plane() {
        let c = build_base_complex(&tangent_algebroid(&BaseRing::polynomial(&["x", "y"]))).unwrap();
        let rep = blockwise_cohomology(&c, false, &Window::new(0, vec![2, 2], None)).unwrap();
        assert_eq!(rep.totals(|_| true), BTreeMap::from([(0, 1), (1, 0), (2, 0)]));
        assert_eq!(rep.h(&BlockLabel::new(0, 0, vec![0, 0])), 1);
        assert!(rep.euler_consistent());
    }

    #[test]
    fn de_rham_of_the_torus() {
        let c = build_base_complex(&tangent_algebroid(&BaseRing::laurent(&["x", "y"]))).unwrap();
        let rep = blockwise_cohomology(&c, true, &Window::new(0, vec![2, 2], None)).unwrap();
        assert_eq!(rep.totals(|_| true), BTreeMap::from([(0, 1), (1, 2), (2, 1)]));
    }

    #[test]
    fn cartan_identities() {
        let c = build_loop_complex(&tangent_algebroid(&BaseRing::polynomial(&["x", "y"])), 3).unwrap();
        let rep = cartan_suite(&c, &Window::new(2, vec![2, 2], None)).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert!(rep.blocks_checked > 0);
        let cot = build_loop_complex(&cotangent_algebroid(&plane()).unwrap(), 1).unwrap();
        assert_eq!(cartan_suite(&cot, &Window::new(1, vec![1, 1], None)).unwrap_err(), ComplexError::NotTangent);
    }

    #[test]
    fn homotopy_on_single_generators() {
        let c = build_loop_complex(&tangent_algebroid(&BaseRing::polynomial(&["x"])), 2).unwrap();
        let iota = euler_contraction(&c).unwrap();
        let h = |s: &SuperElement| {
            &c.apply_d(&super_derivation_apply(&iota, s, Parity::Odd).unwrap())
                + &super_derivation_apply(&iota, &c.apply_d(s), Parity::Odd).unwrap()
        };
        let x1 = SuperElement::even_var(c.x(0, 1));
        assert_eq!(h(&x1), x1);
        assert!(h(&SuperElement::even_var(c.x(0, 0))).is_zero());
        let t2 = theta(c.theta(0, 2));
        assert_eq!(h(&t2), t2.scale(&int(2)));
    }

    #[test]
    fn plane_theorem_small() {
        let rep = theorem_symplectic_check(&plane(), 2, &Window::new(2, vec![3, 3], Some(3))).unwrap();
        assert!(rep.verdict(), "{:?}", rep.comparison.positive_failures);
        assert_eq!(rep.weight_zero_totals().get(&0), Some(&1));
    }

    #[test]
    fn degenerate_bracket_is_rejected() {
        let p = PoissonStructure::new(BaseRing::polynomial(&["x", "y"]), &[(0, 1, v(0))]).unwrap();
        assert!(matches!(
            theorem_symplectic_check(&p, 1, &Window::new(1, vec![1, 1], None)),
            Err(ComplexError::Degenerate { .. })
        ));
    }

    #[test]
    fn frame_change_preserves_cohomology() {
        // the cotangent complex of the torus and the tangent one agree blockwise
        let w = Window::new(1, vec![1, 1], None);
        let cot = build_loop_complex(&cotangent_algebroid(&torus()).unwrap(), 1).unwrap();
        let tan = build_loop_complex(&tangent_algebroid(torus().base()), 1).unwrap();
        for reduce in [false, true] {
            let a = blockwise_cohomology(&cot, reduce, &w).unwrap();
            let b = blockwise_cohomology(&tan, reduce, &w).unwrap();
            let strip = |r: &CohomologyReport| -> Vec<(BlockLabel, usize, usize)> {
                r.blocks.iter().map(|b| (b.label.clone(), b.dim, b.h)).collect()
            };
            assert_eq!(strip(&a), strip(&b));
        }
    }

    #[test]
    fn truncation_stability_of_blocks() {
        let w = Window::new(2, vec![2, 2], Some(2));
        let a = blockwise_cohomology(&build_loop_complex(&cotangent_algebroid(&plane()).unwrap(), 2).unwrap(), true, &w).unwrap();
        let b = blockwise_cohomology(&build_loop_complex(&cotangent_algebroid(&plane()).unwrap(), 3).unwrap(), true, &w).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn monomial_basis_counts() {
        let c = build_loop_complex(&tangent_algebroid(&BaseRing::polynomial(&["x"])), 2).unwrap();
        // weight 2, degree 0, multidegree 2: x0 x2, x1^2
        assert_eq!(c.basis(&BlockLabel::new(0, 2, vec![2])).len(), 2);
        // weight 1, degree 1, multidegree 2: x1 t0, x0 t1
        let b = c.basis(&BlockLabel::new(1, 1, vec![2]));
        assert_eq!(b.len(), 2);
        assert!(b.contains(&SuperMonomial { even: Monomial::var(c.x(0, 1)), odd: vec![c.theta(0, 0)] }));
    }
}
