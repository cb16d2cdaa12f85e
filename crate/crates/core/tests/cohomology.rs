use lca_core::cohomology::{
    cocycle_residual, cocycle_solver, nontriviality, triples_total, ModuleParam, RankOneModule, TwoCocycle,
};
use lca_core::poly::{c, v};
use lca_core::rat::int;
use lca_core::{AlgebraParams, Var};

fn p(q: &str) -> AlgebraParams {
    AlgebraParams::parse(q).unwrap()
}

#[test]
fn trivial_quotients_away_from_minus_one() {
    for (q, want) in [("2", 1), ("1", 1), ("-1/2", 3), ("-3/2", 3), ("-2", 3)] {
        let r = cocycle_solver(&RankOneModule::trivial(&p(q)), 6, 4, 0).unwrap();
        assert_eq!(r.dim_quotient_interior, want, "p = {q}");
        assert_eq!(r.dim_quotient_edge, 0, "p = {q}");
        assert!(r.named_classes_span && r.matches_theorem, "p = {q}");
    }
}

#[test]
fn module_quotients_vanish() {
    for q in ["2", "-2"] {
        for delta in [0, 1] {
            let m = RankOneModule::m_delta_alpha(&p(q), ModuleParam::Rational(int(delta)), ModuleParam::Rational(int(1)));
            let r = cocycle_solver(&m, 4, 3, 2).unwrap();
            assert_eq!(r.dim_quotient_interior + r.dim_quotient_edge, 0, "p = {q}, Δ = {delta}");
            assert_eq!(r.kernel_trivialized, Some(true));
        }
    }
}

#[test]
fn formal_parameters_are_rejected_by_the_solver() {
    assert!(cocycle_solver(&RankOneModule::trivial(&AlgebraParams::formal()), 4, 3, 0).is_err());
    let m = RankOneModule::m_delta_alpha(&p("2"), ModuleParam::Formal, ModuleParam::Rational(int(1)));
    assert!(cocycle_solver(&m, 4, 3, 2).is_err());
}

/// At p = −1 the solver finds two classes beyond α, β, β̄, β̃.
#[test]
fn extra_classes_at_minus_one() {
    let m1 = p("-1");
    let r = cocycle_solver(&RankOneModule::trivial(&m1), 6, 4, 0).unwrap();
    assert_eq!(r.dim_quotient_interior, 6);
    assert_eq!(r.expected_interior, 4);

    let module = RankOneModule::trivial(&m1);
    let lam = v(Var::Lambda);
    let extras = [
        TwoCocycle::from_upper(&module, [((0, 1), lam.pow(2))]).unwrap(),
        TwoCocycle::from_upper(&module, [((1, 2), c(1))]).unwrap(),
    ];
    for x in &extras {
        for (i, j, k) in triples_total(9) {
            assert!(cocycle_residual(x, i, j, k).is_zero(), "{x} at ({i},{j},{k})");
        }
        assert!(nontriviality(x, 6).unwrap().nontrivial);
    }
    let at_minus_two = TwoCocycle::from_upper(&RankOneModule::trivial(&p("-2")), [((0, 2), lam.pow(2))]).unwrap();
    assert!(triples_total(4).into_iter().any(|(i, j, k)| !cocycle_residual(&at_minus_two, i, j, k).is_zero()));
}
