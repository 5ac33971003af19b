//! Poisson bivectors on a coordinatized base, Lie algebroid data in a fixed
//! frame, and the frame change `π♯ : Ω¹ → Θ` for non-degenerate brackets.

use crate::exact::{int, SparsePoly};
use crate::jet::BaseRing;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PoissonError {
    #[error("index {index} out of range for {m} variables")]
    IndexOutOfRange { index: usize, m: usize },
    #[error("bracket of {a} with itself must vanish")]
    Diagonal { a: String },
    #[error("bracket {{{a},{b}}} given twice with inconsistent values")]
    Inconsistent { a: String, b: String },
    #[error("Jacobi identity fails on ({0}, {1}, {2}): {3}")]
    Jacobi(String, String, String, String),
}

/// Antisymmetric matrix `π^{ab} = {x_a, x_b}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoissonStructure {
    base: BaseRing,
    pi: Vec<Vec<SparsePoly>>,
}

impl PoissonStructure {
    /// Builds `π` from the brackets `{x_a, x_b}`; unlisted pairs are zero and
    /// the opposite order is filled in by antisymmetry.
    pub fn new(
        base: BaseRing,
        brackets: &[(usize, usize, SparsePoly)],
    ) -> Result<Self, PoissonError> {
        let m = base.m();
        let mut pi = vec![vec![SparsePoly::zero(); m]; m];
        let mut set = vec![vec![false; m]; m];
        for (a, b, p) in brackets {
            for &i in [a, b] {
                if i >= m {
                    return Err(PoissonError::IndexOutOfRange { index: i, m });
                }
            }
            let (a, b) = (*a, *b);
            if a == b {
                if p.is_zero() {
                    continue;
                }
                return Err(PoissonError::Diagonal { a: base.name(a).into() });
            }
            if set[a][b] && pi[a][b] != *p {
                return Err(PoissonError::Inconsistent {
                    a: base.name(a).into(),
                    b: base.name(b).into(),
                });
            }
            pi[a][b] = p.clone();
            pi[b][a] = -p;
            set[a][b] = true;
            set[b][a] = true;
        }
        Ok(PoissonStructure { base, pi })
    }

    pub fn base(&self) -> &BaseRing {
        &self.base
    }

    pub fn m(&self) -> usize {
        self.base.m()
    }

    pub fn entry(&self, a: usize, b: usize) -> &SparsePoly {
        &self.pi[a][b]
    }

    pub fn matrix(&self) -> &[Vec<SparsePoly>] {
        &self.pi
    }

    /// `{f, g} = Σ π^{ab} ∂_a f ∂_b g`.
    pub fn bracket(&self, f: &SparsePoly, g: &SparsePoly) -> SparsePoly {
        let m = self.m();
        let df: Vec<SparsePoly> = (0..m).map(|a| f.partial(a as u32)).collect();
        let dg: Vec<SparsePoly> = (0..m).map(|b| g.partial(b as u32)).collect();
        let mut out = SparsePoly::zero();
        for a in 0..m {
            if df[a].is_zero() {
                continue;
            }
            for b in 0..m {
                if !dg[b].is_zero() && !self.pi[a][b].is_zero() {
                    out += &(&(&self.pi[a][b] * &df[a]) * &dg[b]);
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JacobiReport {
    Pass,
    /// Smallest `a < b < c` in lexicographic order with nonzero cyclic sum.
    Counterexample {
        triple: (usize, usize, usize),
        value: SparsePoly,
    },
}

impl JacobiReport {
    pub fn passed(&self) -> bool {
        matches!(self, JacobiReport::Pass)
    }
}

/// `Σ_d (π^{da}∂_dπ^{bc} + π^{db}∂_dπ^{ca} + π^{dc}∂_dπ^{ab})`.
pub fn schouten_component(pi: &PoissonStructure, a: usize, b: usize, c: usize) -> SparsePoly {
    let p = &pi.pi;
    let mut out = SparsePoly::zero();
    for d in 0..pi.m() {
        let dv = d as u32;
        out += &(&p[d][a] * &p[b][c].partial(dv));
        out += &(&p[d][b] * &p[c][a].partial(dv));
        out += &(&p[d][c] * &p[a][b].partial(dv));
    }
    out
}

pub fn schouten_jacobi_check(pi: &PoissonStructure) -> JacobiReport {
    let m = pi.m();
    for a in 0..m {
        for b in a + 1..m {
            for c in b + 1..m {
                let v = schouten_component(pi, a, b, c);
                if !v.is_zero() {
                    return JacobiReport::Counterexample {
                        triple: (a, b, c),
                        value: v,
                    };
                }
            }
        }
    }
    JacobiReport::Pass
}

/// Anchor `ρ_α^a` (`ρ(e_α) = Σ_a ρ_α^a ∂_a`) and structure functions
/// `c_{αβ}^γ` (`[e_α, e_β] = Σ_γ c_{αβ}^γ e_γ`) in a fixed frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebroidData {
    pub base: BaseRing,
    pub rank: usize,
    pub anchor: Vec<Vec<SparsePoly>>,
    pub structure: Vec<Vec<Vec<SparsePoly>>>,
    pub frame_names: Vec<String>,
}

/// A section `Σ_α s_α e_α`.
pub type Section = Vec<SparsePoly>;

/// A vector field `Σ_a v^a ∂_a`.
pub type VectorField = Vec<SparsePoly>;

impl LieAlgebroidData {
    pub fn m(&self) -> usize {
        self.base.m()
    }

    pub fn generator(&self, alpha: usize) -> Section {
        let mut s = vec![SparsePoly::zero(); self.rank];
        s[alpha] = SparsePoly::one();
        s
    }

    /// `ρ(e_α)(f)`.
    pub fn anchor_apply(&self, alpha: usize, f: &SparsePoly) -> SparsePoly {
        apply_field(&self.anchor[alpha], f)
    }

    pub fn anchor_of(&self, s: &Section) -> VectorField {
        let mut v = vec![SparsePoly::zero(); self.m()];
        for (alpha, sa) in s.iter().enumerate() {
            if sa.is_zero() {
                continue;
            }
            for (a, va) in v.iter_mut().enumerate() {
                *va += &(sa * &self.anchor[alpha][a]);
            }
        }
        v
    }

    /// `[Σ f_α e_α, Σ g_β e_β]` by the structure functions, the anchor and
    /// the Leibniz rule in both slots.
    pub fn section_bracket(&self, f: &Section, g: &Section) -> Section {
        let r = self.rank;
        let mut out = vec![SparsePoly::zero(); r];
        for alpha in 0..r {
            if f[alpha].is_zero() {
                continue;
            }
            for beta in 0..r {
                if g[beta].is_zero() {
                    continue;
                }
                let fg = &f[alpha] * &g[beta];
                for (gamma, o) in out.iter_mut().enumerate() {
                    let c = &self.structure[alpha][beta][gamma];
                    if !c.is_zero() {
                        *o += &(&fg * c);
                    }
                }
            }
        }
        for alpha in 0..r {
            if f[alpha].is_zero() {
                continue;
            }
            for (beta, o) in out.iter_mut().enumerate() {
                *o += &(&f[alpha] * &self.anchor_apply(alpha, &g[beta]));
            }
        }
        for beta in 0..r {
            if g[beta].is_zero() {
                continue;
            }
            for (alpha, o) in out.iter_mut().enumerate() {
                *o -= &(&g[beta] * &self.anchor_apply(beta, &f[alpha]));
            }
        }
        out
    }
}

pub fn apply_field(v: &VectorField, f: &SparsePoly) -> SparsePoly {
    let mut out = SparsePoly::zero();
    for (a, va) in v.iter().enumerate() {
        if !va.is_zero() {
            out += &(va * &f.partial(a as u32));
        }
    }
    out
}

pub fn field_bracket(v: &VectorField, w: &VectorField) -> VectorField {
    v.iter()
        .zip(w)
        .map(|(va, wa)| &apply_field(v, wa) - &apply_field(w, va))
        .collect()
}

/// Koszul bracket on `Ω¹` in the coframe `dx_α`, without checking Jacobi.
pub fn cotangent_algebroid_unchecked(pi: &PoissonStructure) -> LieAlgebroidData {
    let m = pi.m();
    let anchor = (0..m).map(|alpha| (0..m).map(|a| pi.pi[alpha][a].clone()).collect()).collect();
    let structure = (0..m)
        .map(|alpha| {
            (0..m)
                .map(|beta| (0..m).map(|gamma| pi.pi[alpha][beta].partial(gamma as u32)).collect())
                .collect()
        })
        .collect();
    LieAlgebroidData {
        base: pi.base.clone(),
        rank: m,
        anchor,
        structure,
        frame_names: pi.base.names().iter().map(|n| format!("d{n}")).collect(),
    }
}

pub fn cotangent_algebroid(pi: &PoissonStructure) -> Result<LieAlgebroidData, PoissonError> {
    if let JacobiReport::Counterexample { triple: (a, b, c), value } = schouten_jacobi_check(pi) {
        let n = |i: usize| pi.base.name(i).to_string();
        return Err(PoissonError::Jacobi(n(a), n(b), n(c), pi.base.display(&value)));
    }
    Ok(cotangent_algebroid_unchecked(pi))
}

/// The tautological algebroid in the coordinate frame `∂_a`.
pub fn tangent_algebroid(base: &BaseRing) -> LieAlgebroidData {
    let m = base.m();
    let anchor = (0..m)
        .map(|a| {
            (0..m)
                .map(|b| if a == b { SparsePoly::one() } else { SparsePoly::zero() })
                .collect()
        })
        .collect();
    LieAlgebroidData {
        base: base.clone(),
        rank: m,
        anchor,
        structure: vec![vec![vec![SparsePoly::zero(); m]; m]; m],
        frame_names: base.names().iter().map(|n| format!("d/d{n}")).collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axiom {
    Jacobi,
    AnchorMorphism,
    Leibniz,
}

impl std::fmt::Display for Axiom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Axiom::Jacobi => "jacobi",
            Axiom::AnchorMorphism => "anchor-morphism",
            Axiom::Leibniz => "leibniz",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomReport {
    Pass,
    /// `generators` are frame indices, plus the base variable for Leibniz.
    Counterexample {
        axiom: Axiom,
        generators: Vec<usize>,
        detail: String,
    },
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        matches!(self, AxiomReport::Pass)
    }
}

fn section_is_zero(s: &[SparsePoly]) -> bool {
    s.iter().all(SparsePoly::is_zero)
}

fn add_sections(a: &Section, b: &Section) -> Section {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn scale_section(f: &SparsePoly, s: &Section) -> Section {
    s.iter().map(|x| f * x).collect()
}

/// Checks, on frame generators: the Jacobi identity of the bracket, that the
/// anchor is a bracket morphism, and the Leibniz rule together with
/// antisymmetry against every coordinate function.
pub fn algebroid_axiom_check(l: &LieAlgebroidData) -> AxiomReport {
    let r = l.rank;
    let e: Vec<Section> = (0..r).map(|a| l.generator(a)).collect();
    let show = |s: &Section| {
        s.iter().map(|p| l.base.display(p)).collect::<Vec<_>>().join(", ")
    };
    for a in 0..r {
        for b in a + 1..r {
            for c in b + 1..r {
                let j1 = l.section_bracket(&l.section_bracket(&e[a], &e[b]), &e[c]);
                let j2 = l.section_bracket(&l.section_bracket(&e[b], &e[c]), &e[a]);
                let j3 = l.section_bracket(&l.section_bracket(&e[c], &e[a]), &e[b]);
                let sum = add_sections(&add_sections(&j1, &j2), &j3);
                if !section_is_zero(&sum) {
                    return AxiomReport::Counterexample {
                        axiom: Axiom::Jacobi,
                        generators: vec![a, b, c],
                        detail: show(&sum),
                    };
                }
            }
        }
    }
    for a in 0..r {
        for b in a + 1..r {
            let lhs = l.anchor_of(&l.section_bracket(&e[a], &e[b]));
            let rhs = field_bracket(&l.anchor[a], &l.anchor[b]);
            let diff: VectorField = lhs.iter().zip(&rhs).map(|(x, y)| x - y).collect();
            if !section_is_zero(&diff) {
                return AxiomReport::Counterexample {
                    axiom: Axiom::AnchorMorphism,
                    generators: vec![a, b],
                    detail: show(&diff),
                };
            }
        }
    }
    for a in 0..r {
        for b in 0..r {
            for x in 0..l.m() {
                let f = SparsePoly::var(x as u32);
                let fb = scale_section(&f, &e[b]);
                // [e_a, f e_b] = f [e_a, e_b] + ρ(e_a)(f) e_b
                let lhs = l.section_bracket(&e[a], &fb);
                let mut rhs = scale_section(&f, &l.section_bracket(&e[a], &e[b]));
                rhs[b] += &l.anchor_apply(a, &f);
                // [f e_b, e_a] = −[e_a, f e_b]
                let swapped = l.section_bracket(&fb, &e[a]);
                let skew = add_sections(&swapped, &lhs);
                let diff: Section = lhs.iter().zip(&rhs).map(|(x, y)| x - y).collect();
                for bad in [diff, skew] {
                    if !section_is_zero(&bad) {
                        return AxiomReport::Counterexample {
                            axiom: Axiom::Leibniz,
                            generators: vec![a, b, x],
                            detail: show(&bad),
                        };
                    }
                }
            }
        }
    }
    AxiomReport::Pass
}

/// Square matrix determinant by cofactor expansion along the first row.
pub fn determinant(mat: &[Vec<SparsePoly>]) -> SparsePoly {
    let n = mat.len();
    match n {
        0 => SparsePoly::one(),
        1 => mat[0][0].clone(),
        _ => {
            let mut out = SparsePoly::zero();
            for j in 0..n {
                if mat[0][j].is_zero() {
                    continue;
                }
                let minor = minor(mat, 0, j);
                let t = &mat[0][j] * &determinant(&minor);
                if j % 2 == 0 {
                    out += &t;
                } else {
                    out -= &t;
                }
            }
            out
        }
    }
}

fn minor(mat: &[Vec<SparsePoly>], i: usize, j: usize) -> Vec<Vec<SparsePoly>> {
    mat.iter()
        .enumerate()
        .filter(|(r, _)| *r != i)
        .map(|(_, row)| {
            row.iter()
                .enumerate()
                .filter(|(c, _)| *c != j)
                .map(|(_, x)| x.clone())
                .collect()
        })
        .collect()
}

pub fn mat_mul(a: &[Vec<SparsePoly>], b: &[Vec<SparsePoly>]) -> Vec<Vec<SparsePoly>> {
    let n = a.len();
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    let mut out = vec![vec![SparsePoly::zero(); m]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] += &(&a[i][l] * &b[l][j]);
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FrameMap {
    /// `dx_a ↦ Σ_b matrix[a][b] ∂_b`, with `inverse` its exact inverse.
    Invertible {
        matrix: Vec<Vec<SparsePoly>>,
        inverse: Vec<Vec<SparsePoly>>,
        det: SparsePoly,
    },
    Degenerate {
        det: SparsePoly,
    },
}

pub fn pi_sharp_iso(pi: &PoissonStructure) -> FrameMap {
    let det = determinant(&pi.pi);
    let ring = pi.base.poly_ring();
    if !ring.is_unit(&det) {
        return FrameMap::Degenerate { det };
    }
    let inv_det = det.monomial_inverse().expect("units are single terms");
    let m = pi.m();
    let mut inverse = vec![vec![SparsePoly::zero(); m]; m];
    for (i, row) in inverse.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            // adj[i][j] = (−1)^{i+j} det(minor(j, i))
            let c = determinant(&minor(&pi.pi, j, i));
            let c = if (i + j) % 2 == 0 { c } else { -&c };
            *slot = &c * &inv_det;
        }
    }
    FrameMap::Invertible {
        matrix: pi.pi.clone(),
        inverse,
        det,
    }
}

/// Rewrites the algebroid in the new frame `s_b = Σ_α q[b][α] e_α`, where
/// `q` is invertible with inverse `q_inv`.
pub fn change_frame(
    l: &LieAlgebroidData,
    q: &[Vec<SparsePoly>],
    q_inv: &[Vec<SparsePoly>],
    frame_names: Vec<String>,
) -> LieAlgebroidData {
    let r = l.rank;
    let s: Vec<Section> = q.to_vec();
    let anchor = s.iter().map(|sb| l.anchor_of(sb)).collect();
    let mut structure = vec![vec![vec![SparsePoly::zero(); r]; r]; r];
    for a in 0..r {
        for b in 0..r {
            let h = l.section_bracket(&s[a], &s[b]);
            // coefficients k with Σ_γ k_γ s_γ = h, i.e. k = h · q_inv
            for gamma in 0..r {
                let mut k = SparsePoly::zero();
                for (alpha, ha) in h.iter().enumerate() {
                    k += &(ha * &q_inv[alpha][gamma]);
                }
                structure[a][b][gamma] = k;
            }
        }
    }
    LieAlgebroidData {
        base: l.base.clone(),
        rank: r,
        anchor,
        structure,
        frame_names,
    }
}

/// Transports the cotangent algebroid along `π♯` to the frame of sections
/// anchored to `∂_a`. `None` when `π` is degenerate.
pub fn transport_to_tangent(pi: &PoissonStructure) -> Option<LieAlgebroidData> {
    match pi_sharp_iso(pi) {
        FrameMap::Degenerate { .. } => None,
        FrameMap::Invertible { matrix, inverse, .. } => {
            let cot = cotangent_algebroid_unchecked(pi);
            let names = pi.base.names().iter().map(|n| format!("d/d{n}")).collect();
            Some(change_frame(&cot, &inverse, &matrix, names))
        }
    }
}

/// Scales one entry of the structure table, leaving its antisymmetric
/// partner alone.
pub fn mutate_structure(l: &LieAlgebroidData, a: usize, b: usize, gamma: usize, factor: i64) -> LieAlgebroidData {
    let mut out = l.clone();
    out.structure[a][b][gamma] = out.structure[a][b][gamma].scale(&int(factor));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, Monomial};

    fn v(i: u32) -> SparsePoly {
        SparsePoly::var(i)
    }

    pub(crate) fn plane() -> PoissonStructure {
        PoissonStructure::new(BaseRing::polynomial(&["x", "y"]), &[(0, 1, SparsePoly::one())]).unwrap()
    }

    pub(crate) fn torus() -> PoissonStructure {
        PoissonStructure::new(BaseRing::laurent(&["x", "y"]), &[(0, 1, &v(0) * &v(1))]).unwrap()
    }

    fn so3() -> PoissonStructure {
        PoissonStructure::new(
            BaseRing::polynomial(&["x", "y", "z"]),
            &[(0, 1, v(2)), (1, 2, v(0)), (2, 0, v(1))],
        )
        .unwrap()
    }

    #[test]
    fn antisymmetry_is_filled_in() {
        let t = torus();
        assert_eq!(t.entry(1, 0), &-&(&v(0) * &v(1)));
        assert!(t.entry(0, 0).is_zero());
    }

    #[test]
    fn jacobi_examples() {
        assert!(schouten_jacobi_check(&plane()).passed());
        assert!(schouten_jacobi_check(&torus()).passed());
        assert!(schouten_jacobi_check(&so3()).passed());
        let bad = PoissonStructure::new(
            BaseRing::polynomial(&["x", "y", "z"]),
            &[(0, 1, v(2)), (1, 2, &v(1) * &v(1))],
        )
        .unwrap();
        // independent expansion: π^{yx}∂_y π^{yz} + π^{zx}∂_z π^{xy}... = −2yz
        let expect = SparsePoly::term(int(-2), Monomial::from_pairs([(1, 1), (2, 1)]));
        assert_eq!(
            schouten_jacobi_check(&bad),
            JacobiReport::Counterexample { triple: (0, 1, 2), value: expect }
        );
        assert!(cotangent_algebroid(&bad).is_err());
    }

    #[test]
    fn jacobi_matches_bracket_jacobiator() {
        let cases = [so3(), PoissonStructure::new(
            BaseRing::polynomial(&["x", "y", "z"]),
            &[(0, 1, v(2)), (1, 2, &v(1) * &v(1))],
        ).unwrap()];
        for p in cases {
            let (x, y, z) = (v(0), v(1), v(2));
            let jac = &(&p.bracket(&x, &p.bracket(&y, &z)) + &p.bracket(&y, &p.bracket(&z, &x)))
                + &p.bracket(&z, &p.bracket(&x, &y));
            assert_eq!(jac.is_zero(), schouten_jacobi_check(&p).passed());
        }
    }

    #[test]
    fn cotangent_data() {
        let c = cotangent_algebroid(&plane()).unwrap();
        assert_eq!(c.anchor[0], vec![SparsePoly::zero(), SparsePoly::one()]);
        assert_eq!(c.anchor[1], vec![-&SparsePoly::one(), SparsePoly::zero()]);
        assert!(c.structure.iter().flatten().flatten().all(SparsePoly::is_zero));

        let t = cotangent_algebroid(&torus()).unwrap();
        let xy = &v(0) * &v(1);
        assert_eq!(t.anchor[0], vec![SparsePoly::zero(), xy.clone()]);
        assert_eq!(t.anchor[1], vec![-&xy, SparsePoly::zero()]);
        assert_eq!(t.structure[0][1], vec![v(1), v(0)]);

        let z = PoissonStructure::new(BaseRing::polynomial(&["x", "y"]), &[]).unwrap();
        let c = cotangent_algebroid(&z).unwrap();
        assert!(c.anchor.iter().flatten().all(SparsePoly::is_zero));
    }

    #[test]
    fn tangent_data() {
        let t = tangent_algebroid(&BaseRing::polynomial(&["x"]));
        assert_eq!(t.rank, 1);
        assert_eq!(t.anchor, vec![vec![SparsePoly::one()]]);
        assert_eq!(tangent_algebroid(&BaseRing::laurent(&["x", "y"])).anchor[1][1], SparsePoly::one());
    }

    #[test]
    fn axioms_hold_for_koszul_brackets() {
        for p in [plane(), torus(), so3()] {
            assert!(algebroid_axiom_check(&cotangent_algebroid(&p).unwrap()).passed());
        }
        assert!(algebroid_axiom_check(&tangent_algebroid(&BaseRing::polynomial(&["x", "y", "z"]))).passed());
    }

    #[test]
    fn corrupted_structure_is_caught() {
        let t = cotangent_algebroid(&torus()).unwrap();
        let bad = mutate_structure(&t, 0, 1, 0, -1);
        assert!(!algebroid_axiom_check(&bad).passed());
    }

    #[test]
    fn anchor_morphism_tracks_jacobi() {
        let bad = PoissonStructure::new(
            BaseRing::polynomial(&["x", "y", "z"]),
            &[(0, 1, v(2)), (1, 2, &v(1) * &v(1))],
        )
        .unwrap();
        for p in [so3(), bad] {
            let l = cotangent_algebroid_unchecked(&p);
            let anchor_ok = !matches!(
                algebroid_axiom_check(&l),
                AxiomReport::Counterexample { axiom: Axiom::AnchorMorphism, .. }
            );
            let jac_fails = matches!(
                algebroid_axiom_check(&l),
                AxiomReport::Counterexample { axiom: Axiom::Jacobi, .. }
            );
            assert_eq!(schouten_jacobi_check(&p).passed(), anchor_ok && !jac_fails);
        }
    }

    #[test]
    fn frame_maps() {
        assert!(matches!(pi_sharp_iso(&plane()), FrameMap::Invertible { .. }));
        match pi_sharp_iso(&torus()) {
            FrameMap::Invertible { det, .. } => {
                assert_eq!(det, SparsePoly::term(int(1), Monomial::from_pairs([(0, 2), (1, 2)])))
            }
            _ => panic!("torus bracket is non-degenerate"),
        }
        let deg = PoissonStructure::new(BaseRing::polynomial(&["x", "y"]), &[(0, 1, v(0))]).unwrap();
        assert_eq!(
            pi_sharp_iso(&deg),
            FrameMap::Degenerate { det: SparsePoly::term(int(1), Monomial::pow_of(0, 2)) }
        );
    }

    #[test]
    fn transport_gives_tangent_algebroid() {
        for p in [plane(), torus()] {
            let moved = transport_to_tangent(&p).unwrap();
            let tan = tangent_algebroid(p.base());
            assert_eq!(moved.anchor, tan.anchor);
            assert_eq!(moved.structure, tan.structure);
        }
    }
}
