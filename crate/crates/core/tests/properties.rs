use lca_core::annihilation::{ann_bracket_closed, ann_bracket_derived, AnnGen};
use lca_core::cohomology::{
    coboundary, cocycle_residual, module_action, trivialize, CochainMap, ModuleParam, RankOneModule, TwoCocycle,
};
use lca_core::conformal::GenIndex;
use lca_core::derivations::ConformalDerivation;
use lca_core::linalg::{dot, in_span, kernel, Membership, QMatrix, Subspace};
use lca_core::poly::{v, Monomial};
use lca_core::rat::frac;
use lca_core::{AlgebraParams, BlockAlgebra, LambdaElement, Poly, Rat, Var};
use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;

fn small_rat() -> impl Strategy<Value = Rat> {
    (-6i64..=6, 1i64..=3).prop_map(|(n, d)| frac(n, d))
}

fn nonzero_rat() -> impl Strategy<Value = Rat> {
    small_rat().prop_filter("nonzero", |q| !q.is_zero())
}

fn params() -> impl Strategy<Value = AlgebraParams> {
    nonzero_rat().prop_map(|q| AlgebraParams::rational(q).unwrap())
}

fn poly_in(vars: &'static [Var], max_deg: u8, max_terms: usize) -> impl Strategy<Value = Poly> {
    let mono = proptest::collection::vec(0..=max_deg, vars.len()).prop_map(move |es| {
        vars.iter()
            .zip(es)
            .fold(Monomial::default(), |m, (&var, e)| m.with_exponent(var, e))
    });
    proptest::collection::vec((mono, small_rat()), 0..=max_terms).prop_map(Poly::from_terms)
}

fn poly3() -> impl Strategy<Value = Poly> {
    poly_in(&[Var::Partial, Var::Lambda, Var::Mu], 2, 4)
}

fn matrix() -> impl Strategy<Value = QMatrix> {
    (1usize..6, 1usize..7).prop_flat_map(|(r, c)| {
        proptest::collection::vec(proptest::collection::vec(-3i64..=3, c), r).prop_map(move |rows| {
            let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
            QMatrix::from_i64(&refs)
        })
    })
}

/// Plain Gaussian elimination over ℚ, for comparison with the fraction-free path.
fn naive_rank(m: &QMatrix) -> usize {
    let mut rows: Vec<Vec<Rat>> = (0..m.rows()).map(|r| m.row(r).to_vec()).collect();
    let mut rank = 0;
    for col in 0..m.cols() {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[col].is_zero() {
                let f = &row[col] / &pivot_row[col];
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn point() -> impl Strategy<Value = Vec<(Var, Rat)>> {
    (small_rat(), small_rat(), small_rat())
        .prop_map(|(a, b, c)| vec![(Var::Partial, a), (Var::Lambda, b), (Var::Mu, c)])
}

fn eval_at(f: &Poly, at: &[(Var, Rat)]) -> Rat {
    at.iter().fold(f.clone(), |g, (var, q)| g.eval(*var, q)).constant_term()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in poly3(), b in poly3(), c in poly3()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in poly3(), b in poly3(), at in point()) {
        prop_assert_eq!(eval_at(&(&a * &b), &at), eval_at(&a, &at) * eval_at(&b, &at));
        prop_assert_eq!(eval_at(&(&a + &b), &at), eval_at(&a, &at) + eval_at(&b, &at));
    }

    #[test]
    fn substitution_commutes_with_evaluation(a in poly3(), r in poly3(), at in point()) {
        let composed = a.substitute(Var::Lambda, &r);
        let mut shifted = at.clone();
        shifted[1].1 = eval_at(&r, &at);
        prop_assert_eq!(eval_at(&composed, &at), eval_at(&a, &shifted));
    }

    #[test]
    fn kernel_is_annihilated(m in matrix()) {
        let k = kernel(&m);
        for x in k.basis() {
            prop_assert!(m.mul_vec(x).unwrap().iter().all(Zero::is_zero));
        }
        prop_assert_eq!(m.rank() + k.dim(), m.cols());
    }

    #[test]
    fn fraction_free_rank_matches_naive(m in matrix()) {
        prop_assert_eq!(m.rank(), naive_rank(&m));
    }

    #[test]
    fn span_membership_certificates(m in matrix(), coeffs in proptest::collection::vec(small_rat(), 6)) {
        let rows: Vec<Vec<Rat>> = (0..m.rows()).map(|r| m.row(r).to_vec()).collect();
        let space = Subspace::span(m.cols(), rows.clone()).unwrap();
        let mut target = vec![Rat::zero(); m.cols()];
        for (row, q) in rows.iter().zip(&coeffs) {
            for (t, x) in target.iter_mut().zip(row) {
                *t += q * x;
            }
        }
        prop_assert!(in_span(&target, &space).unwrap().is_inside());
        target[0] += Rat::from_integer(1.into());
        if let Membership::Outside { functional } = in_span(&target, &space).unwrap() {
            prop_assert!(!dot(&functional, &target).is_zero());
            for b in space.basis() {
                prop_assert!(dot(&functional, b).is_zero());
            }
        }
    }

    #[test]
    fn bracket_is_skew_and_jacobi(p in params(), i in 0usize..6, j in 0usize..6, k in 0usize..6) {
        let alg = BlockAlgebra::new(p);
        prop_assert!(alg.skew_residual(i, j).is_zero());
        prop_assert!(alg.jacobi_residual(i, j, k).is_zero());
    }

    #[test]
    fn sesquilinearity(
        p in params(),
        i in 0usize..5,
        j in 0usize..5,
        f in poly_in(&[Var::Partial], 3, 3),
        g in poly_in(&[Var::Partial], 3, 3),
    ) {
        let alg = BlockAlgebra::new(p);
        let lam = v(Var::Lambda);
        let x = LambdaElement::single(i, f.clone());
        let y = LambdaElement::single(j, g.clone());
        let factor = &f.substitute(Var::Partial, &-&lam) * &g.translate(Var::Partial, &lam);
        prop_assert_eq!(alg.bracket(&x, &y, &lam), alg.bracket_gen(i, j, &lam).scale(&factor));
    }

    #[test]
    fn inner_derivations_satisfy_leibniz(p in params(), k in 0usize..4, f in poly_in(&[Var::Partial], 2, 3), i in 0usize..5, j in 0usize..5) {
        let d = ConformalDerivation::inner(&p, LambdaElement::single(k, f));
        prop_assert!(d.leibniz_residual(i, j).is_zero());
    }

    #[test]
    fn closed_annihilation_bracket_matches_modes(p in params(), i in 0usize..6, m in -1i64..6, j in 0usize..6, n in -1i64..6) {
        let alg = BlockAlgebra::new(p);
        let (a, b) = (AnnGen::new(i, m), AnnGen::new(j, n));
        prop_assert_eq!(ann_bracket_derived(&alg, a, b), ann_bracket_closed(&alg, a, b));
    }

    #[test]
    fn cocycle_skew_involution(p in params(), i in 0usize..5, j in 0usize..5, f in poly_in(&[Var::Partial, Var::Lambda], 2, 4)) {
        let module = RankOneModule::m_delta_alpha(&p, ModuleParam::Rational(frac(1, 2)), ModuleParam::Rational(frac(3, 1)));
        let (lo, hi) = (i.min(j), i.max(j) + 1);
        let c = TwoCocycle::from_upper(&module, [((lo, hi), f.clone())]).unwrap();
        prop_assert_eq!(c.value(lo, hi), f);
        let flipped = c.value(hi, lo);
        let back = -flipped.substitute(Var::Lambda, &-&(&v(Var::Lambda) + &v(Var::Partial)));
        prop_assert_eq!(back, c.value(lo, hi));
    }

    #[test]
    fn coboundaries_are_cocycles(p in params(), delta in small_rat(), alpha in nonzero_rat(), seed in any::<u64>()) {
        let module = RankOneModule::m_delta_alpha(&p, ModuleParam::Rational(delta), ModuleParam::Rational(alpha));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let psi = CochainMap::random(&mut rng, 3, 2);
        let c = coboundary(&psi, &module);
        for (i, j, k) in [(0, 0, 0), (0, 1, 2), (1, 0, 2), (2, 1, 0), (1, 1, 1)] {
            prop_assert!(cocycle_residual(&c, i, j, k).is_zero());
        }
        let phi = trivialize(&c, 3).unwrap();
        prop_assert_eq!(coboundary(&phi, &module).value(1, 2), c.value(1, 2));
    }

    #[test]
    fn module_action_is_a_representation(p in params(), delta in small_rat(), alpha in small_rat(), i in 0usize..4, j in 0usize..4) {
        let module = RankOneModule::m_delta_alpha(&p, ModuleParam::Rational(delta), ModuleParam::Rational(alpha));
        prop_assert!(lca_core::cohomology::check_module_axioms(&module, i, j).is_zero());
        let only_zero_acts = (1..4 as GenIndex).all(|k| module_action(&module, k, &Poly::one(), &v(Var::Lambda)).is_zero());
        prop_assert!(only_zero_acts);
    }
}
