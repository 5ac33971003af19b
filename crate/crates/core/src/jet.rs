//! Truncated jet rings `L⁺A` of a coordinatized base, the derivation δ, the
//! free jet modules `L⁺M`, their pro-truncated duals `∫M^∨ mod z^{n+1}`, and
//! the pairing between the two.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::One;

use crate::exact::{
    exact_kernel_and_rank, int, ExactError, Matrix, Monomial, PolyRing, Rational, SparsePoly, Var,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum JetError {
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("duplicate variable name {0}")]
    DuplicateName(String),
    #[error("invalid variable name {0:?}: expected letters and digits starting with a letter")]
    InvalidName(String),
    #[error("{names} names but {flags} invertibility flags")]
    FlagCount { names: usize, flags: usize },
    #[error("image of invertible variable {var} is not a unit")]
    NotAUnit { var: String },
    #[error("no image given for base variable {var}")]
    MissingImage { var: String },
    #[error("rank mismatch: {left} against {right}")]
    RankMismatch { left: usize, right: usize },
}

/// `k[x_1..x_m]` with the flagged variables inverted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseRing {
    names: Vec<String>,
    invertible: Vec<bool>,
}

fn valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric())
}

impl BaseRing {
    pub fn new(names: Vec<String>, invertible: Vec<bool>) -> Result<Self, JetError> {
        if names.len() != invertible.len() {
            return Err(JetError::FlagCount {
                names: names.len(),
                flags: invertible.len(),
            });
        }
        let mut seen = BTreeSet::new();
        for n in &names {
            if !valid_name(n) {
                return Err(JetError::InvalidName(n.clone()));
            }
            if !seen.insert(n.as_str()) {
                return Err(JetError::DuplicateName(n.clone()));
            }
        }
        Ok(BaseRing { names, invertible })
    }

    /// Polynomial ring, nothing inverted.
    pub fn polynomial(names: &[&str]) -> Self {
        Self::new(names.iter().map(|s| s.to_string()).collect(), vec![false; names.len()])
            .expect("valid names")
    }

    /// Laurent polynomial ring, every variable inverted.
    pub fn laurent(names: &[&str]) -> Self {
        Self::new(names.iter().map(|s| s.to_string()).collect(), vec![true; names.len()])
            .expect("valid names")
    }

    pub fn m(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn is_invertible(&self, a: usize) -> bool {
        self.invertible[a]
    }

    pub fn poly_ring(&self) -> PolyRing {
        PolyRing::new(self.names.clone(), self.invertible.clone())
    }

    pub fn display(&self, p: &SparsePoly) -> String {
        p.display(&|v| self.names[v as usize].clone())
    }
}

/// Jet ring truncated at conformal weight `cutoff`: variables `x_{a,i}` for
/// `i <= cutoff`, monomials of weight above the cutoff identified with zero.
/// The variable id of `x_{a,i}` is `i*m + a`, so ids do not depend on the
/// cutoff and `x_{a,0}` shares its id with the base variable `x_a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetRing {
    base: BaseRing,
    cutoff: usize,
}

pub fn build_jet_ring(base: BaseRing, cutoff: usize) -> JetRing {
    JetRing { base, cutoff }
}

impl JetRing {
    pub fn base(&self) -> &BaseRing {
        &self.base
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn m(&self) -> usize {
        self.base.m()
    }

    /// Same base, different cutoff.
    pub fn with_cutoff(&self, cutoff: usize) -> JetRing {
        build_jet_ring(self.base.clone(), cutoff)
    }

    pub fn var(&self, a: usize, i: usize) -> Var {
        (i * self.m() + a) as Var
    }

    pub fn level(&self, v: Var) -> usize {
        v as usize / self.m()
    }

    pub fn index(&self, v: Var) -> usize {
        v as usize % self.m()
    }

    pub fn nvars(&self) -> usize {
        self.m() * (self.cutoff + 1)
    }

    pub fn variables(&self) -> impl Iterator<Item = Var> {
        0..self.nvars() as Var
    }

    pub fn x(&self, a: usize, i: usize) -> SparsePoly {
        SparsePoly::var(self.var(a, i))
    }

    pub fn var_name(&self, v: Var) -> String {
        format!("{}_{}", self.base.name(self.index(v)), self.level(v))
    }

    /// Inverse of `var_name`.
    pub fn parse_var(&self, s: &str) -> Option<Var> {
        let (name, level) = s.split_once('_')?;
        let a = self.base.index_of(name)?;
        let i: usize = level.parse().ok()?;
        (i <= self.cutoff).then(|| self.var(a, i))
    }

    pub fn is_invertible(&self, v: Var) -> bool {
        self.level(v) == 0 && self.base.is_invertible(self.index(v))
    }

    pub fn poly_ring(&self) -> PolyRing {
        let vars: Vec<Var> = self.variables().collect();
        PolyRing::new(
            vars.iter().map(|&v| self.var_name(v)).collect(),
            vars.iter().map(|&v| self.is_invertible(v)).collect(),
        )
    }

    pub fn check(&self, p: &SparsePoly) -> Result<(), ExactError> {
        self.poly_ring().check(p)
    }

    pub fn weight(&self, m: &Monomial) -> i64 {
        m.weighted_degree(|v| self.level(v) as i64)
    }

    pub fn multidegree(&self, m: &Monomial) -> Vec<i64> {
        let mut d = vec![0i64; self.m()];
        for (v, e) in m.iter() {
            d[self.index(v)] += e as i64;
        }
        d
    }

    /// Drops every monomial of weight above the cutoff.
    pub fn truncate(&self, p: &SparsePoly) -> SparsePoly {
        p.retain(|m| self.weight(m) <= self.cutoff as i64)
    }

    pub fn mul(&self, p: &SparsePoly, q: &SparsePoly) -> SparsePoly {
        self.truncate(&(p * q))
    }

    /// δ(x_{a,i}) = (i+1) x_{a,i+1}, extended as a derivation.
    pub fn delta(&self, p: &SparsePoly) -> SparsePoly {
        let mut out = SparsePoly::zero();
        let top = self.cutoff as i64;
        for (m, c) in p.terms() {
            if self.weight(m) + 1 > top {
                continue;
            }
            for (v, e) in m.iter() {
                let i = self.level(v);
                let up = self.var(self.index(v), i + 1);
                let coeff = c * int(e as i64 * (i as i64 + 1));
                out.add_term(m.shift(v, -1).shift(up, 1), coeff);
            }
        }
        out
    }

    /// Divided power δ^{(k)} = δ^k / k!.
    pub fn delta_divided(&self, p: &SparsePoly, k: usize) -> SparsePoly {
        let mut q = self.truncate(p);
        let mut fact = Rational::one();
        for j in 1..=k {
            q = self.delta(&q);
            fact *= int(j as i64);
        }
        q.scale(&fact.recip())
    }

    /// `δ^{(k)}` for `k >= 1`; `k = 0` is the identity.
    pub fn delta_apply(&self, p: &SparsePoly, k: usize) -> SparsePoly {
        self.delta_divided(p, k)
    }

    /// The base element `a` read in the jet ring as `a_0`.
    pub fn embed_base(&self, a: &SparsePoly) -> SparsePoly {
        a.clone()
    }

    /// The `i`-th jet component `a_i = δ^{(i)}(a_0)` of a base element.
    pub fn jet_component(&self, a: &SparsePoly, i: usize) -> SparsePoly {
        self.delta_divided(a, i)
    }

    pub fn display(&self, p: &SparsePoly) -> String {
        p.display(&|v| self.var_name(v))
    }
}

/// A commutative ring with a derivation, as a target for prolongation.
pub trait DeltaRing {
    fn delta(&self, p: &SparsePoly) -> SparsePoly;
    fn is_unit(&self, p: &SparsePoly) -> bool;
    fn reduce(&self, p: &SparsePoly) -> SparsePoly {
        p.clone()
    }
}

impl DeltaRing for JetRing {
    fn delta(&self, p: &SparsePoly) -> SparsePoly {
        JetRing::delta(self, p)
    }

    fn is_unit(&self, p: &SparsePoly) -> bool {
        self.poly_ring().is_unit(p)
    }

    fn reduce(&self, p: &SparsePoly) -> SparsePoly {
        self.truncate(p)
    }
}

/// A Laurent polynomial ring whose derivation is given on the variables.
#[derive(Clone, Debug)]
pub struct DerivationRing {
    pub ring: PolyRing,
    pub images: BTreeMap<Var, SparsePoly>,
}

impl DerivationRing {
    /// `k[t]` with `δ = d/dt`.
    pub fn line() -> Self {
        DerivationRing {
            ring: PolyRing::new(vec!["t".into()], vec![false]),
            images: BTreeMap::from([(0, SparsePoly::one())]),
        }
    }
}

impl DeltaRing for DerivationRing {
    fn delta(&self, p: &SparsePoly) -> SparsePoly {
        let mut out = SparsePoly::zero();
        for v in p.variables() {
            if let Some(img) = self.images.get(&v) {
                out += &(&p.partial(v) * img);
            }
        }
        out
    }

    fn is_unit(&self, p: &SparsePoly) -> bool {
        self.ring.is_unit(p)
    }
}

/// Ring morphism out of a jet ring, given by the images of all jet variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetMorphism {
    pub images: BTreeMap<Var, SparsePoly>,
}

impl JetMorphism {
    pub fn apply(&self, p: &SparsePoly) -> Result<SparsePoly, ExactError> {
        p.substitute(|v| self.images.get(&v).cloned().unwrap_or_default())
    }

    pub fn image(&self, v: Var) -> &SparsePoly {
        &self.images[&v]
    }
}

/// The unique δ-compatible extension `x_{a,i} ↦ δ^{(i)}(f(x_a))`.
pub fn prolong_algebra_map<T: DeltaRing>(
    source: &JetRing,
    f: &[SparsePoly],
    target: &T,
) -> Result<JetMorphism, JetError> {
    let base = source.base();
    if f.len() != base.m() {
        let missing = base.name(f.len().min(base.m().saturating_sub(1)));
        return Err(JetError::MissingImage { var: missing.to_string() });
    }
    let mut images = BTreeMap::new();
    for (a, fa) in f.iter().enumerate() {
        if base.is_invertible(a) && !target.is_unit(fa) {
            return Err(JetError::NotAUnit { var: base.name(a).to_string() });
        }
        let mut cur = target.reduce(fa);
        for i in 0..=source.cutoff() {
            images.insert(source.var(a, i), cur.clone());
            cur = target.reduce(&target.delta(&cur).scale(&int(i as i64 + 1).recip()));
        }
    }
    Ok(JetMorphism { images })
}

/// Element of the free module `L⁺M` on `(e_k)_i`, `k < rank`, `i <= cutoff`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FreeJetElem {
    pub comps: BTreeMap<(usize, usize), SparsePoly>,
}

impl FreeJetElem {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(k: usize, i: usize) -> Self {
        Self::term(SparsePoly::one(), k, i)
    }

    pub fn term(c: SparsePoly, k: usize, i: usize) -> Self {
        let mut e = Self::zero();
        e.add(k, i, &c);
        e
    }

    pub fn add(&mut self, k: usize, i: usize, c: &SparsePoly) {
        let slot = self.comps.entry((k, i)).or_default();
        *slot += c;
        if slot.is_zero() {
            self.comps.remove(&(k, i));
        }
    }

    pub fn plus(&self, other: &FreeJetElem) -> FreeJetElem {
        let mut out = self.clone();
        for (&(k, i), c) in &other.comps {
            out.add(k, i, c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn coefficient(&self, k: usize, i: usize) -> SparsePoly {
        self.comps.get(&(k, i)).cloned().unwrap_or_default()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeJetModule {
    pub ring: JetRing,
    pub rank: usize,
}

impl FreeJetModule {
    pub fn new(ring: JetRing, rank: usize) -> Self {
        FreeJetModule { ring, rank }
    }

    fn truncate(&self, v: &FreeJetElem) -> FreeJetElem {
        let w = self.ring.cutoff() as i64;
        let mut out = FreeJetElem::zero();
        for (&(k, i), c) in &v.comps {
            let c = c.retain(|m| self.ring.weight(m) + i as i64 <= w);
            out.add(k, i, &c);
        }
        out
    }

    pub fn scale(&self, a: &SparsePoly, v: &FreeJetElem) -> FreeJetElem {
        let mut out = FreeJetElem::zero();
        for (&(k, i), c) in &v.comps {
            out.add(k, i, &(a * c));
        }
        self.truncate(&out)
    }

    /// `δ(b (e_k)_i) = δ(b) (e_k)_i + (i+1) b (e_k)_{i+1}`.
    pub fn delta(&self, v: &FreeJetElem) -> FreeJetElem {
        let mut out = FreeJetElem::zero();
        for (&(k, i), c) in &self.truncate(v).comps {
            out.add(k, i, &self.ring.delta(c));
            if i < self.ring.cutoff() {
                out.add(k, i + 1, &c.scale(&int(i as i64 + 1)));
            }
        }
        self.truncate(&out)
    }

    pub fn delta_apply(&self, v: &FreeJetElem, k: usize) -> FreeJetElem {
        let mut q = self.truncate(v);
        let mut fact = Rational::one();
        for j in 1..=k {
            q = self.delta(&q);
            fact *= int(j as i64);
        }
        self.scale(&SparsePoly::constant(fact.recip()), &q)
    }

    /// The image `(b e_k)_i = Σ_p b_p (e_k)_{i-p}` of a base section.
    pub fn jet_of_section(&self, b: &SparsePoly, k: usize, i: usize) -> FreeJetElem {
        let mut out = FreeJetElem::zero();
        for p in 0..=i {
            out.add(k, i - p, &self.ring.jet_component(b, p));
        }
        self.truncate(&out)
    }
}

/// Exterior differential of the jet ring in the basis `(dx_a)_i`.
pub fn jet_of_differential(ring: &JetRing, p: &SparsePoly) -> FreeJetElem {
    let mut out = FreeJetElem::zero();
    for v in p.variables() {
        out.add(ring.index(v), ring.level(v), &p.partial(v));
    }
    FreeJetModule::new(ring.clone(), ring.m()).truncate(&out)
}

/// Element of `∫M^∨ mod z^{n+1}` on `e_k^∨ ⊗ z^j`, `j <= n`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProTruncElem {
    pub comps: BTreeMap<(usize, usize), SparsePoly>,
}

impl ProTruncElem {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(k: usize, j: usize) -> Self {
        Self::term(SparsePoly::one(), k, j)
    }

    pub fn term(c: SparsePoly, k: usize, j: usize) -> Self {
        let mut e = Self::zero();
        e.add(k, j, &c);
        e
    }

    pub fn add(&mut self, k: usize, j: usize, c: &SparsePoly) {
        let slot = self.comps.entry((k, j)).or_default();
        *slot += c;
        if slot.is_zero() {
            self.comps.remove(&(k, j));
        }
    }

    pub fn plus(&self, other: &ProTruncElem) -> ProTruncElem {
        let mut out = self.clone();
        for (&(k, j), c) in &other.comps {
            out.add(k, j, c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn coefficient(&self, k: usize, j: usize) -> SparsePoly {
        self.comps.get(&(k, j)).cloned().unwrap_or_default()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProTruncModule {
    pub ring: JetRing,
    pub rank: usize,
    pub order: usize,
}

/// How a ring element acts on the pro-truncated module: a base element goes
/// through `a ↦ Σ a_i z^i`; a jet ring element scales coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scalar {
    Base(SparsePoly),
    Jet(SparsePoly),
}

impl ProTruncModule {
    pub fn new(ring: JetRing, rank: usize, order: usize) -> Self {
        ProTruncModule { ring, rank, order }
    }

    fn clean(&self, v: ProTruncElem) -> ProTruncElem {
        let mut out = ProTruncElem::zero();
        for ((k, j), c) in v.comps {
            if j <= self.order {
                out.add(k, j, &self.ring.truncate(&c));
            }
        }
        out
    }

    /// `δ = δ_X − ∂_z`: `δ(c e^∨ z^j) = δ(c) e^∨ z^j − j c e^∨ z^{j−1}`.
    pub fn delta(&self, v: &ProTruncElem) -> ProTruncElem {
        let mut out = ProTruncElem::zero();
        for (&(k, j), c) in &v.comps {
            out.add(k, j, &self.ring.delta(c));
            if j > 0 {
                out.add(k, j - 1, &c.scale(&int(-(j as i64))));
            }
        }
        self.clean(out)
    }
}

pub fn int_module_action(module: &ProTruncModule, a: &Scalar, v: &ProTruncElem) -> ProTruncElem {
    let mut out = ProTruncElem::zero();
    match a {
        Scalar::Jet(a) => {
            for (&(k, j), c) in &v.comps {
                out.add(k, j, &(a * c));
            }
        }
        Scalar::Base(a) => {
            let ring = &module.ring;
            let parts: Vec<SparsePoly> =
                (0..=module.order).map(|i| ring.jet_component(a, i)).collect();
            for (&(k, j), c) in &v.comps {
                for (i, ai) in parts.iter().enumerate() {
                    if i + j > module.order {
                        break;
                    }
                    out.add(k, j + i, &(ai * c));
                }
            }
        }
    }
    module.clean(out)
}

/// `⟨c e_k^∨ z^j, b (e_l)_i⟩ = c b δ^{(i−j)}(δ_{kl})`, which is `c b` when
/// `k = l, i = j` and zero otherwise.
pub fn duality_pairing(
    dual: &ProTruncModule,
    w: &ProTruncElem,
    free: &FreeJetModule,
    v: &FreeJetElem,
) -> Result<SparsePoly, JetError> {
    if dual.rank != free.rank {
        return Err(JetError::RankMismatch {
            left: dual.rank,
            right: free.rank,
        });
    }
    let mut out = SparsePoly::zero();
    for (&(k, j), c) in &w.comps {
        if let Some(b) = v.comps.get(&(k, j)) {
            out += &(c * b);
        }
    }
    Ok(free.ring.truncate(&out))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramBlock {
    pub weight: usize,
    pub multidegree: Vec<i64>,
    pub size: usize,
    pub rank: usize,
}

impl GramBlock {
    pub fn full_rank(&self) -> bool {
        self.rank == self.size
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramReport {
    pub blocks: Vec<GramBlock>,
    /// The square Gram matrix on all levels `0..=min(n, w_max)` at once.
    pub total: GramBlock,
}

impl GramReport {
    pub fn all_full_rank(&self) -> bool {
        self.total.full_rank() && self.blocks.iter().all(GramBlock::full_rank)
    }
}

fn gram_rank(
    dual: &ProTruncModule,
    free: &FreeJetModule,
    rows: &[(usize, usize)],
    cols: &[(usize, usize)],
) -> Result<usize, JetError> {
    let mut data = Vec::with_capacity(rows.len());
    for &(k, j) in rows {
        let w = ProTruncElem::basis(k, j);
        let mut row = Vec::with_capacity(cols.len());
        for &(l, i) in cols {
            let p = duality_pairing(dual, &w, free, &FreeJetElem::basis(l, i))?;
            row.push(p.constant_term());
        }
        data.push(row);
    }
    if data.is_empty() {
        return Ok(0);
    }
    Ok(exact_kernel_and_rank(&Matrix::from_rows(data)).0)
}

/// Gram matrices of the pairing between `e_k^∨ z^j` and `(e_l)_i` on the
/// constant basis, one block per level `s <= min(n, w_max)` plus the full
/// matrix over all those levels.
pub fn pairing_gram_rank(n: usize, r: usize, w_max: usize) -> Result<GramReport, JetError> {
    let top = n.min(w_max);
    let ring = build_jet_ring(BaseRing::polynomial(&[]), w_max);
    let dual = ProTruncModule::new(ring.clone(), r, n);
    let free = FreeJetModule::new(ring, r);
    let mut blocks = Vec::new();
    let mut all = Vec::new();
    for s in 0..=top {
        let idx: Vec<(usize, usize)> = (0..r).map(|k| (k, s)).collect();
        let rank = gram_rank(&dual, &free, &idx, &idx)?;
        blocks.push(GramBlock {
            weight: s,
            multidegree: vec![],
            size: r,
            rank,
        });
        all.extend(idx);
    }
    let rank = gram_rank(&dual, &free, &all, &all)?;
    Ok(GramReport {
        blocks,
        total: GramBlock {
            weight: top,
            multidegree: vec![],
            size: all.len(),
            rank,
        },
    })
}

/// `Σ_k δ^{(k)}(p) δ^{(n−k)}(q)`.
pub fn divided_leibniz(ring: &JetRing, p: &SparsePoly, q: &SparsePoly, n: usize) -> SparsePoly {
    let mut out = SparsePoly::zero();
    for k in 0..=n {
        out += &ring.mul(&ring.delta_divided(p, k), &ring.delta_divided(q, n - k));
    }
    out
}
