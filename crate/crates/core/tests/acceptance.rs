//! End-to-end acceptance: one line per criterion, exact arithmetic throughout.
//!
//! Run with `cargo test -p loopcoh --test acceptance -- --nocapture` to see
//! the report lines.

use std::collections::BTreeMap;

use loopcoh::complex::{
    blockwise_cohomology, build_loop_complex, cartan_suite, theorem_symplectic_check, BlockResult, TheoremReport,
    Window,
};
use loopcoh::exact::{SparsePoly, Var};
use loopcoh::jet::{
    build_jet_ring, duality_pairing, pairing_gram_rank, BaseRing, FreeJetElem, FreeJetModule, ProTruncElem,
    ProTruncModule,
};
use loopcoh::lambda::{arakawa_closed_form, pva_axiom_suite, ArakawaReading, FormalPoly, PVAStructure};
use loopcoh::lc::{intertwine_check, select_convention, LcConvention};
use loopcoh::poisson::{cotangent_algebroid, tangent_algebroid, PoissonStructure};

fn v(i: u32) -> SparsePoly {
    SparsePoly::var(i)
}

fn plane() -> PoissonStructure {
    PoissonStructure::new(BaseRing::polynomial(&["x", "y"]), &[(0, 1, SparsePoly::one())]).unwrap()
}

fn torus() -> PoissonStructure {
    PoissonStructure::new(BaseRing::laurent(&["x", "y"]), &[(0, 1, &v(0) * &v(1))]).unwrap()
}

fn so3() -> PoissonStructure {
    PoissonStructure::new(
        BaseRing::polynomial(&["x", "y", "z"]),
        &[(0, 1, v(2)), (1, 2, v(0)), (2, 0, v(1))],
    )
    .unwrap()
}

fn examples() -> [(&'static str, PoissonStructure); 3] {
    [("plane", plane()), ("torus", torus()), ("so3", so3())]
}

fn plane_window(weight: usize) -> Window {
    Window::new(weight, vec![4, 4], Some(4))
}

fn torus_window(weight: usize) -> Window {
    Window::new(weight, vec![2, 2], None)
}

fn report(n: usize, failure: Option<String>) {
    match &failure {
        None => println!("criterion {n}: pass"),
        Some(why) => println!("criterion {n}: fail ({why})"),
    }
    assert!(failure.is_none(), "criterion {n}: {}", failure.unwrap());
}

fn nonzero(t: &BTreeMap<usize, usize>) -> BTreeMap<usize, usize> {
    t.iter().filter(|(_, &h)| h > 0).map(|(&n, &h)| (n, h)).collect()
}

fn theorem_failure(rep: &TheoremReport, expected: &[(usize, usize)]) -> Option<String> {
    let mut why = Vec::new();
    let got = nonzero(&rep.weight_zero_totals());
    let want: BTreeMap<usize, usize> = expected.iter().copied().collect();
    if got != want {
        why.push(format!("weight-0 totals {got:?}, expected {want:?}"));
    }
    if let Some(m) = &rep.comparison.mismatch {
        why.push(format!("weight-0 complex: {m}"));
    }
    if let Some(m) = &rep.derham_mismatch {
        why.push(format!("de Rham: {m}"));
    }
    let bad: Vec<String> =
        rep.comparison.positive_failures.iter().map(|b| format!("{} h={}", b.label, b.h)).collect();
    if !bad.is_empty() {
        why.push(format!("{} positive-weight blocks not acyclic, first {}", bad.len(), bad[0]));
    }
    if !rep.transport.passed() {
        why.push(format!("transport {:?}", rep.transport));
    }
    (!why.is_empty() || !rep.verdict()).then(|| why.join("; "))
}

#[test]
fn criterion_1_symplectic_plane() {
    let rep = theorem_symplectic_check(&plane(), 3, &plane_window(3)).unwrap();
    let mut failure = theorem_failure(&rep, &[(0, 1)]);
    // de Rham cohomology of the affine plane is k in degree 0
    let all = nonzero(&rep.comparison.reduced.totals(|_| true));
    if all != BTreeMap::from([(0, 1)]) {
        failure.get_or_insert(format!("all weights {all:?}"));
    }
    let origin = rep.comparison.reduced.blocks.iter().find(|b| b.h > 0).map(|b| b.label.clone());
    if origin.as_ref().is_some_and(|l| l.degree != 0 || l.weight != 0 || l.multidegree != [0, 0]) {
        failure.get_or_insert(format!("class sits at {}", origin.unwrap()));
    }
    report(1, failure);
}

#[test]
fn criterion_2_algebraic_torus() {
    let rep = theorem_symplectic_check(&torus(), 2, &torus_window(2)).unwrap();
    report(2, theorem_failure(&rep, &[(0, 1), (1, 2), (2, 1)]));
}

fn flip_one_term(value: &FormalPoly) -> Vec<FormalPoly> {
    value
        .terms()
        .map(|(exps, c)| {
            let term = FormalPoly::monomial(value.nvars(), exps.clone(), c.clone());
            value.minus(&term).minus(&term)
        })
        .collect()
}

#[test]
fn criterion_3_pva_axioms_and_mutations() {
    let mut failure = None;
    for (name, pi) in examples() {
        let p = PVAStructure::new(build_jet_ring(pi.base().clone(), 5), pi.clone()).unwrap();
        let rep = pva_axiom_suite(&p, 4);
        if let Some(o) = rep.outcomes.iter().find(|o| !o.passed()) {
            failure.get_or_insert(format!("{name}: {} fails on {:?}", o.axiom, o.failure));
        }
        // every single sign flip of a generator value with levels summing to
        // at most 2 must be caught
        let p = PVAStructure::new(build_jet_ring(pi.base().clone(), 3), pi).unwrap();
        let entries: Vec<((Var, Var), FormalPoly)> = p
            .table
            .iter()
            .filter(|((u, w), val)| p.ring.level(*u) + p.ring.level(*w) <= 2 && !val.is_zero())
            .map(|(k, val)| (*k, val.clone()))
            .collect();
        let mut mutants = 0;
        for ((u, w), val) in entries {
            for bad in flip_one_term(&val) {
                mutants += 1;
                if pva_axiom_suite(&p.with_entry(u, w, bad), 2).all_pass() {
                    failure.get_or_insert(format!(
                        "{name}: flip in {{{} lambda {}}} undetected",
                        p.ring.var_name(u),
                        p.ring.var_name(w)
                    ));
                }
            }
        }
        if mutants == 0 {
            failure.get_or_insert(format!("{name}: no mutants"));
        }
    }
    report(3, failure);
}

#[test]
fn criterion_4_closed_form_oracle() {
    let mut failure = None;
    let mut winners: Vec<ArakawaReading> = ArakawaReading::ALL.to_vec();
    for (name, pi) in examples() {
        let m = pi.m();
        let p = PVAStructure::new(build_jet_ring(pi.base().clone(), 4), pi).unwrap();
        for i in 0..=4 {
            for j in 0..=4 - i {
                for a in 0..m {
                    for b in 0..m {
                        match arakawa_closed_form(&p, i, j, a, b) {
                            Ok(found) => winners.retain(|r| found.readings.contains(r)),
                            Err(e) => {
                                failure.get_or_insert(format!("{name}: {e}"));
                            }
                        }
                    }
                }
            }
        }
    }
    match winners.as_slice() {
        [only] => println!("winning reading: {only}"),
        other => {
            failure.get_or_insert(format!("readings left: {other:?}"));
        }
    }
    report(4, failure);
}

#[test]
fn criterion_5_structural_identities() {
    let mut failure = None;
    for (name, pi, window) in [("plane", plane(), plane_window(3)), ("torus", torus(), torus_window(3))] {
        let c = build_loop_complex(&tangent_algebroid(pi.base()), 3).unwrap();
        let checks = [
            ("d squared", c.check_d_squared()),
            ("d delta", c.check_d_delta()),
            ("delta grading", c.check_delta_grading()),
        ];
        for (what, bad) in checks {
            if let Some(g) = bad {
                failure.get_or_insert(format!("{name}: {what} on {g}"));
            }
        }
        let cs = cartan_suite(&c, &window).unwrap();
        for (what, bad) in [
            ("cartan", &cs.homotopy),
            ("euler delta", &cs.euler_delta),
            ("block homotopy", &cs.block_homotopy),
        ] {
            if let Some(g) = bad {
                failure.get_or_insert(format!("{name}: {what} on {g}"));
            }
        }
        if cs.blocks_checked == 0 {
            failure.get_or_insert(format!("{name}: no blocks checked"));
        }
        if !cs.positive_weight_acyclic() {
            failure.get_or_insert(format!("{name}: unreduced positive weight not acyclic"));
        }
    }
    report(5, failure);
}

#[test]
fn criterion_6_iota_intertwines() {
    let mut failure = None;
    for (name, pi, window) in [("plane", plane(), plane_window(2)), ("torus", torus(), torus_window(2))] {
        let lp = build_loop_complex(&cotangent_algebroid(&pi).unwrap(), 2).unwrap();
        let p = PVAStructure::new(build_jet_ring(pi.base().clone(), 2), pi).unwrap();
        let scores = select_convention(&p, &lp, &window).unwrap();
        let standard = scores.iter().find(|s| s.convention == LcConvention::STANDARD).unwrap();
        if !standard.admissible() {
            failure.get_or_insert(format!("{name}: {standard:?}"));
        }
        let rep = intertwine_check(&p, &lp, LcConvention::STANDARD, &window, 2).unwrap();
        for (n, f) in &rep.failures {
            if let Some(f) = f {
                failure.get_or_insert(format!("{name}: iota D != d iota from degree {n} on {f}"));
            }
        }
        if rep.failures.keys().copied().collect::<Vec<_>>() != [0, 1] {
            failure.get_or_insert(format!("{name}: degrees checked {:?}", rep.failures.keys()));
        }
        if let Some(s) = &rep.square {
            failure.get_or_insert(format!("{name}: d_LC squared on {s}"));
        }
        if let Some(b) = rep.bijection.iter().find(|b| !b.bijective()) {
            failure.get_or_insert(format!(
                "{name}: iota on {} forms={} image={} cochains={}",
                b.label, b.forms, b.image, b.cochains
            ));
        }
        if rep.bijection.is_empty() {
            failure.get_or_insert(format!("{name}: no bijection blocks"));
        }
    }
    report(6, failure);
}

#[test]
fn criterion_7_duality_pairing() {
    let mut failure = None;
    for r in 1..=2 {
        for n in 0..=3 {
            for w in 0..=3 {
                let g = pairing_gram_rank(n, r, w).unwrap();
                if !g.all_full_rank() {
                    failure.get_or_insert(format!("gram r={r} n={n} w={w}: {g:?}"));
                }
            }
        }
    }
    // ⟨δw, v⟩ + ⟨w, δv⟩ = δ⟨w, v⟩ on basis pairs with jet coefficients
    let ring = build_jet_ring(BaseRing::polynomial(&["x"]), 12);
    let coeffs = [SparsePoly::one(), ring.x(0, 0), ring.x(0, 1), ring.mul(&ring.x(0, 0), &ring.x(0, 2))];
    let mut pairs = 0;
    for r in 1..=2 {
        let free = FreeJetModule::new(ring.clone(), r);
        for n in 0..=3 {
            let dual = ProTruncModule::new(ring.clone(), r, n);
            for k in 0..r {
                for j in 0..=n {
                    for l in 0..r {
                        for i in 0..=3 {
                            for (c, b) in coeffs.iter().flat_map(|c| coeffs.iter().map(move |b| (c, b))) {
                                let wv = ProTruncElem::term(c.clone(), k, j);
                                let vv = FreeJetElem::term(b.clone(), l, i);
                                let pair = |x: &ProTruncElem, y: &FreeJetElem| duality_pairing(&dual, x, &free, y).unwrap();
                                let lhs = &pair(&dual.delta(&wv), &vv) + &pair(&wv, &free.delta(&vv));
                                let rhs = ring.delta(&pair(&wv, &vv));
                                pairs += 1;
                                if lhs != rhs {
                                    failure.get_or_insert(format!("delta invariance r={r} n={n} k={k} j={j} l={l} i={i}"));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    assert!(pairs > 0);
    report(7, failure);
}

fn spot(blocks: &[BlockResult], weight: usize) -> Vec<(String, usize, usize, usize)> {
    blocks
        .iter()
        .filter(|b| b.label.weight <= weight as i64)
        .map(|b| (b.label.to_string(), b.ambient_dim, b.dim, b.h))
        .collect()
}

#[test]
fn criterion_8_truncation_stability() {
    let mut failure = None;
    for (name, pi, w, window) in [("plane", plane(), 3, plane_window(3)), ("torus", torus(), 2, torus_window(2))] {
        let cot = cotangent_algebroid(&pi).unwrap();
        let at = |cutoff| {
            let c = build_loop_complex(&cot, cutoff).unwrap();
            blockwise_cohomology(&c, true, &window).unwrap()
        };
        let (low, high) = (at(w), at(w + 1));
        let (a, b) = (spot(&low.blocks, w), spot(&high.blocks, w));
        if a.is_empty() {
            failure.get_or_insert(format!("{name}: no blocks"));
        }
        if let Some((x, y)) = a.iter().zip(&b).find(|(x, y)| x != y) {
            failure.get_or_insert(format!("{name}: cutoff {w} gives {x:?}, cutoff {} gives {y:?}", w + 1));
        }
        if a.len() != b.len() {
            failure.get_or_insert(format!("{name}: {} blocks against {}", a.len(), b.len()));
        }
        let (t0, t1) = (
            theorem_symplectic_check(&pi, w, &window).unwrap(),
            theorem_symplectic_check(&pi, w + 1, &window).unwrap(),
        );
        if t0.weight_zero_totals() != t1.weight_zero_totals() || t0.verdict() != t1.verdict() {
            failure.get_or_insert(format!("{name}: theorem report moves with the cutoff"));
        }
    }
    report(8, failure);
}
