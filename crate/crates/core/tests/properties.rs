use loopcoh::complex::{blockwise_cohomology, build_loop_complex, Window};
use loopcoh::exact::{int, Monomial, Rational, SparsePoly, SuperElement};
use loopcoh::jet::{build_jet_ring, BaseRing, JetRing};
use loopcoh::lambda::{lambda_substitute, PVAStructure};
use loopcoh::poisson::{cotangent_algebroid, PoissonStructure};
use proptest::prelude::*;

fn torus() -> PoissonStructure {
    PoissonStructure::new(BaseRing::laurent(&["x", "y"]), &[(0, 1, &SparsePoly::var(0) * &SparsePoly::var(1))]).unwrap()
}

/// Polynomials in `x_{a,i}` with `i <= 1`, exponents possibly negative on
/// level 0 of the torus.
fn low_jet_poly(ring: JetRing) -> impl Strategy<Value = SparsePoly> {
    let gens: Vec<u32> = (0..2).flat_map(|i| (0..2).map(move |a| (a, i))).map(|(a, i)| ring.var(a, i)).collect();
    let n = gens.len();
    prop::collection::vec((prop::collection::vec(0i32..3, n), prop::collection::vec(-1i32..2, 2), -3i64..4), 1..4)
        .prop_map(move |terms| {
            let mut p = SparsePoly::zero();
            for (exps, inv, c) in terms {
                let mut pairs: Vec<(u32, i32)> = gens.iter().zip(&exps).map(|(&v, &e)| (v, e)).collect();
                pairs[0].1 += inv[0];
                pairs[1].1 += inv[1];
                p.add_term(Monomial::from_pairs(pairs), int(c));
            }
            p
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn lambda_bracket_is_skew(
        (f, g) in low_jet_poly(build_jet_ring(BaseRing::laurent(&["x", "y"]), 6))
            .prop_flat_map(|f| (Just(f), low_jet_poly(build_jet_ring(BaseRing::laurent(&["x", "y"]), 6))))
    ) {
        let p = PVAStructure::new(build_jet_ring(BaseRing::laurent(&["x", "y"]), 6), torus()).unwrap();
        let lhs = p.lambda_bracket(&f, &g);
        let rhs = lambda_substitute(&p.ring, &p.lambda_bracket(&g, &f)).neg();
        prop_assert_eq!(lhs.truncate(&p.ring), rhs.truncate(&p.ring));
    }

    #[test]
    fn loop_differential_squares_to_zero_and_commutes_with_delta(
        picks in prop::collection::vec(prop::collection::vec(any::<prop::sample::Index>(), 1..4), 1..4),
    ) {
        let c = build_loop_complex(&cotangent_algebroid(&torus()).unwrap(), 3).unwrap();
        let gens: Vec<SuperElement> = c.generators().into_iter().map(|(_, g)| g).collect();
        let mut s = SuperElement::zero();
        for word in &picks {
            let mut t = SuperElement::one();
            for i in word {
                t = &t * &gens[i.index(gens.len())];
            }
            s += &t;
        }
        let s = c.truncate(&s);
        prop_assert!(c.apply_d(&c.apply_d(&s)).is_zero());
        prop_assert_eq!(c.apply_d(&c.apply_delta(&s)), c.apply_delta(&c.apply_d(&s)));
    }

    #[test]
    fn rescaled_torus_has_the_same_blocks(num in 1i64..5, den in 1i64..4, neg in any::<bool>()) {
        let scaled = |c: Rational| {
            let xy = (&SparsePoly::var(0) * &SparsePoly::var(1)).scale(&c);
            PoissonStructure::new(BaseRing::laurent(&["x", "y"]), &[(0, 1, xy)]).unwrap()
        };
        let c = int(if neg { -num } else { num }) / int(den);
        let blocks = |pi: &PoissonStructure| {
            let c = build_loop_complex(&cotangent_algebroid(pi).unwrap(), 1).unwrap();
            let rep = blockwise_cohomology(&c, true, &Window::new(1, vec![1, 1], None)).unwrap();
            assert!(rep.euler_consistent());
            rep.blocks.iter().map(|b| (b.label.clone(), b.dim, b.h)).collect::<Vec<_>>()
        };
        prop_assert_eq!(blocks(&scaled(c)), blocks(&scaled(int(1))));
    }
}
