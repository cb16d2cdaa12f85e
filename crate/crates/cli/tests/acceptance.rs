//! Acceptance suite: one PASS/FAIL line per criterion, exact arithmetic
//! throughout. Exits non-zero when any criterion fails.

use std::process::Command;
use std::time::Instant;

use lca_core::annihilation;
use lca_core::biderivations::{hv_value_table, Biderivation};
use lca_core::cohomology::{
    check_module_axioms, coboundary, coboundary_value, cocycle_residual, cocycle_solver, named_cocycle,
    named_independence, nontriviality, residual_grid, triples_pairwise, triples_total, trivialize, CochainMap,
    ModuleParam, NamedCocycle, RankOneModule,
};
use lca_core::derivations::{classify, non_innerness_certificate, ConformalDerivation, DerivationBox, Innerness};
use lca_core::rat::int;
use lca_core::report::{failures, CheckEntry};
use lca_core::{AlgebraParams, BlockAlgebra};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Verdict = (bool, Vec<String>);
type Criterion = (&'static str, fn() -> Verdict);

fn p(q: &str) -> AlgebraParams {
    AlgebraParams::parse(q).expect("valid p")
}

fn rational(n: i64) -> ModuleParam {
    ModuleParam::Rational(int(n))
}

/// Records a grid result; failing grids add their first offending entry.
fn grid(ok: &mut bool, notes: &mut Vec<String>, what: &str, entries: &[CheckEntry]) {
    let failed = failures(entries);
    if failed > 0 {
        *ok = false;
        let first = entries.iter().find(|e| !e.ok).expect("a failing entry");
        notes.push(format!(
            "{what}: {failed}/{} failed, first at {:?}: {}",
            entries.len(),
            first.indices,
            first.residual
        ));
    }
}

fn check(ok: &mut bool, notes: &mut Vec<String>, cond: bool, what: impl Into<String>) {
    if !cond {
        *ok = false;
        notes.push(what.into());
    }
}

fn axioms() -> Verdict {
    let (mut ok, mut notes) = (true, Vec::new());
    let alg = BlockAlgebra::new(AlgebraParams::formal());
    grid(&mut ok, &mut notes, "skew", &alg.skew_grid(8));
    grid(&mut ok, &mut notes, "jacobi", &alg.jacobi_grid(8));
    (ok, notes)
}

fn subalgebras() -> Verdict {
    let (mut ok, mut notes) = (true, Vec::new());
    let vir = BlockAlgebra::new(AlgebraParams::formal()).virasoro_residual();
    check(&mut ok, &mut notes, vir.is_zero(), format!("virasoro residual {vir}"));
    for q in ["-1", "-2", "-3"] {
        let hv = BlockAlgebra::new(p(q)).heisenberg_virasoro().expect("p in Z⁻");
        check(&mut ok, &mut notes, hv.closed, format!("p = {q}: not closed"));
        check(&mut ok, &mut notes, hv.top_bracket_vanishes, format!("p = {q}: [L_-p λ L_-p] ≠ 0"));
    }
    (ok, notes)
}

fn annihilation_algebra() -> Verdict {
    let (mut ok, mut notes) = (true, Vec::new());
    let alg = BlockAlgebra::new(AlgebraParams::formal());
    grid(&mut ok, &mut notes, "closed vs derived", &annihilation::closed_vs_derived_grid(&alg, 6));
    grid(&mut ok, &mut notes, "antisymmetry", &annihilation::antisymmetry_grid(&alg, 6));
    grid(&mut ok, &mut notes, "jacobi", &annihilation::jacobi_grid(&alg, 6));
    (ok, notes)
}

fn outer_derivation() -> Verdict {
    let (mut ok, mut notes) = (true, Vec::new());
    for q in ["-1", "-2", "-3"] {
        let params = p(q);
        let d = ConformalDerivation::outer_dp(&params).expect("p in Z⁻");
        grid(&mut ok, &mut notes, &format!("p = {q} leibniz"), &d.leibniz_grid(8));
        match non_innerness_certificate(&d, 4, 3).expect("certificate") {
            Innerness::Inner { witness } => {
                check(&mut ok, &mut notes, false, format!("p = {q}: found inner witness {witness}"))
            }
            Innerness::NonInner {
                inner_obstruction_vanishes,
                obstruction,
                ..
            } => {
                let nonzero = obstruction.iter().any(|(_, v)| v != "0");
                check(
                    &mut ok,
                    &mut notes,
                    inner_obstruction_vanishes && nonzero,
                    format!("p = {q}: λ = 0 obstruction does not separate"),
                );
            }
        }
    }
    (ok, notes)
}

fn derivation_classification() -> Verdict {
    let (mut ok, mut notes) = (true, Vec::new());
    let bx = DerivationBox {
        n_src: 4,
        n_tgt: 8,
        deg_partial: 3,
        deg_lambda: 3,
    };
    for (q, want) in [("1", 0), ("2", 0), ("1/2", 0), ("-1/2", 0), ("-1", 1), ("-2", 1), ("-3", 1)] {
        let r = classify(&p(q), &bx).expect("classification");
        check(
            &mut ok,
            &mut notes,
            r.dim_quotient == want,
            format!("p = {q}: quotient {} (expected {want}), edge-suspect {}", r.dim_quotient, r.edge_suspect_count),
        );
        if want == 1 {
            check(&mut ok, &mut notes, r.outer_found, format!("p = {q}: representative is not the outer derivation"));
        }
    }
    (ok, notes)
}

fn biderivations() -> Verdict {
    let (mut ok, mut notes) = (true, Vec::new());
    let inner = Biderivation::inner(int(1), &AlgebraParams::formal());
    grid(&mut ok, &mut notes, "inner skew", &inner.bilinear_skew_grid(6));
    grid(&mut ok, &mut notes, "inner biderivation", &inner.biderivation_grid(6));
    grid(&mut ok, &mut notes, "inner bi01", &inner.bi01_grid(6));
    for q in ["-1", "-2", "-3"] {
        let params = p(q);
        let family = Biderivation::theorem2_family(int(1), &params).expect("p in Z⁻");
        grid(&mut ok, &mut notes, &format!("p = {q} family skew"), &family.bilinear_skew_grid(6));
        grid(&mut ok, &mut notes, &format!("p = {q} family biderivation"), &family.biderivation_grid(6));
        grid(&mut ok, &mut notes, &format!("p = {q} family bi01"), &family.bi01_grid(6));
        let table = hv_value_table(int(1), &params).expect("value table");
        check(&mut ok, &mut notes, table.iter().all(|r| r.matches), format!("p = {q}: value table differs"));
    }
    (ok, notes)
}

fn named_classes() -> Verdict {
    let (mut ok, mut notes) = (true, Vec::new());
    let triples = triples_pairwise(8);
    let alpha = named_cocycle(NamedCocycle::Alpha, &AlgebraParams::formal()).expect("α");
    grid(&mut ok, &mut notes, "α (formal p)", &residual_grid(&alpha, &triples));
    let cases = [
        (NamedCocycle::Alpha, vec!["2", "-1/2", "-1", "-2"]),
        (NamedCocycle::Beta, vec!["-1/2", "-1", "-2"]),
        (NamedCocycle::BetaBar, vec!["-1/2", "-1", "-2"]),
        (NamedCocycle::BetaTilde, vec!["-1"]),
    ];
    for (which, ps) in cases {
        for q in ps {
            let c = named_cocycle(which, &p(q)).expect("named class");
            grid(&mut ok, &mut notes, &format!("{which} at p = {q}"), &residual_grid(&c, &triples));
            let verdict = nontriviality(&c, 8).expect("nontriviality");
            check(&mut ok, &mut notes, verdict.nontrivial, format!("{which} at p = {q} is a coboundary"));
        }
    }
    let ind = named_independence(&p("-1"), 8).expect("independence");
    check(
        &mut ok,
        &mut notes,
        ind.rank_modulo_coboundaries == 4,
        format!("rank modulo coboundaries {} (expected 4)", ind.rank_modulo_coboundaries),
    );
    (ok, notes)
}

fn trivial_solver() -> Verdict {
    let (mut ok, mut notes) = (true, Vec::new());
    for (q, want) in [("2", 1), ("-1/2", 3), ("-2", 3), ("-1", 4)] {
        let r = cocycle_solver(&RankOneModule::trivial(&p(q)), 6, 4, 0).expect("solver");
        let good = r.dim_quotient_interior == want && r.named_classes_span;
        let extra: Vec<String> = r
            .classes
            .iter()
            .filter(|c| c.name.starts_with("class-"))
            .map(|c| format!("{} ({}) {:?}", c.name, if c.interior { "interior" } else { "edge" }, c.representative_values))
            .collect();
        check(
            &mut ok,
            &mut notes,
            good,
            format!(
                "p = {q}: interior {} (expected {want}), edge {}, by grade {:?}, extra classes {extra:?}",
                r.dim_quotient_interior, r.dim_quotient_edge, r.quotient_by_grade
            ),
        );
    }
    (ok, notes)
}

fn module_cohomology() -> Verdict {
    let (mut ok, mut notes) = (true, Vec::new());
    let mut rng = ChaCha8Rng::seed_from_u64(2024);

    let formal_modules = [
        RankOneModule::m_delta_alpha(&p("2"), ModuleParam::Formal, ModuleParam::Formal),
        RankOneModule::m_delta_alpha(&p("-2"), ModuleParam::Formal, ModuleParam::Formal),
        RankOneModule::m_delta_alpha_beta(&p("-1"), ModuleParam::Formal, ModuleParam::Formal, ModuleParam::Formal)
            .expect("p = −1"),
    ];
    for m in &formal_modules {
        for _ in 0..3 {
            let c = coboundary(&CochainMap::random(&mut rng, 4, 2), m);
            let bad = triples_total(4).into_iter().find(|&(i, j, k)| !cocycle_residual(&c, i, j, k).is_zero());
            check(&mut ok, &mut notes, bad.is_none(), format!("{} p = {}: d∘d ≠ 0 at {bad:?}", m.kind(), m.params()));
        }
    }

    let concrete = [
        RankOneModule::m_delta_alpha(&p("2"), rational(1), rational(1)),
        RankOneModule::m_delta_alpha_beta(&p("-1"), rational(1), rational(1), rational(1)).expect("p = −1"),
    ];
    for m in &concrete {
        let mut failed = 0;
        for _ in 0..20 {
            let c = coboundary(&CochainMap::random(&mut rng, 5, 2), m);
            let round_trip = trivialize(&c, 5).map(|phi| {
                (0..=5).all(|i| (i..=5 - i).all(|j| coboundary_value(&phi, m, i, j) == c.value(i, j)))
            });
            failed += usize::from(!matches!(round_trip, Ok(true)));
        }
        check(&mut ok, &mut notes, failed == 0, format!("{}: {failed}/20 round trips failed", m.kind()));
    }

    let mut solved = Vec::new();
    for q in ["2", "-2"] {
        for delta in [0, 1] {
            solved.push(RankOneModule::m_delta_alpha(&p(q), rational(delta), rational(1)));
        }
    }
    solved.push(RankOneModule::m_delta_alpha_beta(&p("-1"), rational(1), rational(1), rational(1)).expect("p = −1"));
    for m in &solved {
        let r = cocycle_solver(m, 5, 4, 3).expect("solver");
        check(
            &mut ok,
            &mut notes,
            r.dim_quotient_interior == 0 && r.kernel_trivialized == Some(true),
            format!(
                "{} p = {} Δ = {}: interior {}, edge {}",
                m.kind(),
                m.params(),
                m.delta(),
                r.dim_quotient_interior,
                r.dim_quotient_edge
            ),
        );
    }
    (ok, notes)
}

fn module_axioms() -> Verdict {
    let (mut ok, mut notes) = (true, Vec::new());
    let modules = [
        RankOneModule::m_delta_alpha(&AlgebraParams::formal(), ModuleParam::Formal, ModuleParam::Formal),
        RankOneModule::m_delta_alpha_beta(&p("-1"), ModuleParam::Formal, ModuleParam::Formal, ModuleParam::Formal)
            .expect("p = −1"),
    ];
    for m in &modules {
        for i in 0..=4 {
            for j in 0..=4 {
                let r = check_module_axioms(m, i, j);
                check(&mut ok, &mut notes, r.is_zero(), format!("{} ({i},{j}): {r}", m.kind()));
            }
        }
    }
    (ok, notes)
}

const CLI_SUITE: &[&[&str]] = &[
    &["verify-axioms", "--p", "formal", "--max-index", "8"],
    &["verify-axioms", "--p", "-1", "--max-index", "3"],
    &["annihilation", "--p", "formal", "--max-index", "4"],
    &["derivations", "check", "--p", "-2", "--max-index", "6"],
    &["derivations", "classify", "--p", "1", "--max-index", "4"],
    &["derivations", "classify", "--p", "-1", "--max-index", "4"],
    &["derivations", "outer", "--p", "-3"],
    &["biderivations", "check", "--p", "-1", "--max-index", "4"],
    &["cohomology", "named", "--p", "-1"],
    &["cohomology", "solve", "--p", "2", "--coeffs", "trivial", "--max-index", "6"],
    &["cohomology", "solve", "--p", "-1"],
    &["cohomology", "solve", "--p", "2", "--coeffs", "m-delta-alpha", "--delta", "1", "--alpha", "1", "--max-index", "5"],
    &["cohomology", "trivialize", "--p", "-1", "--coeffs", "m-delta-alpha-beta", "--delta", "0", "--alpha", "1", "--beta", "1"],
];

fn run_cli_suite(table: &std::path::Path) -> Vec<u8> {
    let mut out = Vec::new();
    for args in CLI_SUITE {
        let run = Command::new(env!("CARGO_BIN_EXE_lca"))
            .args(*args)
            .args(["--format", "json", "--jobs", "1"])
            .output()
            .expect("lca runs");
        out.extend(format!("{args:?} -> {:?}\n", run.status.code()).bytes());
        out.extend(run.stdout);
    }
    let run = Command::new(env!("CARGO_BIN_EXE_lca"))
        .args(["annihilation", "--p", "-1", "--max-index", "2", "--format", "json", "--emit-table"])
        .arg(table)
        .output()
        .expect("lca runs");
    out.extend(run.stdout);
    out.extend(std::fs::read(table).expect("table written"));
    out
}

fn determinism() -> Verdict {
    let (mut ok, mut notes) = (true, Vec::new());
    let dir = tempfile::tempdir().expect("temp dir");
    let first = run_cli_suite(&dir.path().join("first.csv"));
    let second = run_cli_suite(&dir.path().join("second.csv"));
    check(&mut ok, &mut notes, !first.is_empty(), "empty CLI output");
    check(
        &mut ok,
        &mut notes,
        first == second,
        format!("reports differ ({} vs {} bytes)", first.len(), second.len()),
    );
    let parsed = String::from_utf8_lossy(&first).contains("\"schema\": 1");
    check(&mut ok, &mut notes, parsed, "reports lack the schema tag");
    (ok, notes)
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("axioms: skew and Jacobi vanish for i, j, k ≤ 8, formal p", axioms),
        ("subalgebras: Virasoro normalization and Heisenberg-Virasoro closure", subalgebras),
        ("annihilation algebra: closed = derived, antisymmetry, Jacobi on the grid ≤ 6", annihilation_algebra),
        ("outer derivation: Leibniz ≤ 8 and non-innerness certificate", outer_derivation),
        ("derivation classification at (4, 8, 3)", derivation_classification),
        ("biderivations: inner and stated families, value table", biderivations),
        ("named 2-cocycles: cocycle condition, non-triviality, independence", named_classes),
        ("trivial-coefficient solver: interior quotient dimensions", trivial_solver),
        ("rank-one coefficients: d∘d = 0, trivialize round trips, quotient 0", module_cohomology),
        ("module axioms for M_{Δ,α} and M_{Δ,α,β}", module_axioms),
        ("determinism: two CLI suite runs are byte-identical", determinism),
    ];
    let mut passed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, notes) = run();
        passed += usize::from(ok);
        println!(
            "criterion {:>2} [{}] {name} ({:.1}s)",
            k + 1,
            if ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
        for note in notes.iter().take(8) {
            println!("    {note}");
        }
    }
    println!("acceptance: {passed}/{} criteria passed", criteria.len());
    if passed != criteria.len() {
        std::process::exit(1);
    }
}
