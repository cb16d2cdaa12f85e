use std::fs;

use lca_core::cohomology::{
    coboundary, coboundary_value, cocycle_solver, named_cocycle, named_independence, nontriviality,
    residual_grid, triples_pairwise, triples_total, trivialize, CochainMap, ModuleParam, NamedCocycle,
    RankOneModule,
};
use lca_core::derivations::{
    classify, default_n_tgt, hv_restricted_leibniz, non_innerness_certificate, outer_table, ConformalDerivation,
    DerivationBox, Innerness,
};
use lca_core::biderivations::{hv_value_table, Biderivation};
use lca_core::report::{failures, CheckEntry};
use lca_core::{annihilation, rat, AlgebraParams, BlockAlgebra, LambdaElement};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::{Coeffs, Config, Failure, Outcome};

const MAX_LISTED_ENTRIES: usize = 10_000;
const SHOWN_FAILURES: usize = 3;
const TRIVIALIZE_SAMPLES: usize = 20;
const TRIVIALIZE_SEED: u64 = 0;

fn to_json(x: &impl Serialize) -> Value {
    serde_json::to_value(x).expect("report serializes")
}

/// Accumulates grid summaries into a text block and a JSON object.
#[derive(Default)]
struct Sections {
    ok: bool,
    text: Vec<String>,
    json: serde_json::Map<String, Value>,
}

impl Sections {
    fn new() -> Self {
        Sections {
            ok: true,
            ..Default::default()
        }
    }

    fn grid(&mut self, name: &str, entries: Vec<CheckEntry>) {
        let failed = failures(&entries);
        self.ok &= failed == 0;
        self.text.push(format!("{name}: {} checks, {failed} failed", entries.len()));
        for e in entries.iter().filter(|e| !e.ok).take(SHOWN_FAILURES) {
            self.text.push(format!("  at {:?}: {}", e.indices, e.residual));
        }
        let truncated = entries.len() > MAX_LISTED_ENTRIES;
        let listed: Vec<&CheckEntry> = entries.iter().filter(|e| !truncated || !e.ok).collect();
        self.json.insert(
            name.to_string(),
            json!({
                "checks": entries.len(),
                "failures": failed,
                "entries_truncated": truncated,
                "entries": listed,
            }),
        );
    }

    fn value(&mut self, name: &str, ok: bool, line: String, value: Value) {
        self.ok &= ok;
        self.text.push(format!("{name}: {line}"));
        self.json.insert(name.to_string(), value);
    }

    fn info(&mut self, name: &str, value: Value) {
        self.json.insert(name.to_string(), value);
    }

    fn finish(self) -> Result<Outcome, Failure> {
        Ok(Outcome {
            ok: self.ok,
            text: self.text,
            json: Value::Object(self.json),
        })
    }
}

fn params(config: &Config) -> Result<AlgebraParams, Failure> {
    Ok(AlgebraParams::parse(&config.p)?)
}

fn module_param(raw: &Option<String>) -> Result<ModuleParam, Failure> {
    match raw.as_deref() {
        None | Some("formal") => Ok(ModuleParam::Formal),
        Some(s) => Ok(ModuleParam::Rational(rat::parse(s)?)),
    }
}

fn module(config: &Config, params: &AlgebraParams) -> Result<RankOneModule, Failure> {
    let (delta, alpha) = (module_param(&config.delta)?, module_param(&config.alpha)?);
    match config.coeffs {
        Coeffs::Trivial => Ok(RankOneModule::trivial(params)),
        Coeffs::MDeltaAlpha => Ok(RankOneModule::m_delta_alpha(params, delta, alpha)),
        Coeffs::MDeltaAlphaBeta => Ok(RankOneModule::m_delta_alpha_beta(
            params,
            delta,
            alpha,
            module_param(&config.beta)?,
        )?),
    }
}

pub fn verify_axioms(config: &Config) -> Result<Outcome, Failure> {
    let params = params(config)?;
    let n = config.max_index.unwrap_or(8);
    let alg = BlockAlgebra::new(params.clone());
    let mut out = Sections::new();
    out.grid("skew", alg.skew_grid(n));
    out.grid("jacobi", alg.jacobi_grid(n));
    let vir = alg.virasoro_residual();
    out.value(
        "virasoro",
        vir.is_zero(),
        format!("residual {vir}"),
        json!({ "ok": vir.is_zero(), "residual": vir.to_string() }),
    );
    if params.is_neg_int() {
        let hv = alg.heisenberg_virasoro()?;
        out.value(
            "heisenberg_virasoro",
            hv.ok(),
            format!("closed {}, [L_-p λ L_-p] = 0 {}", hv.closed, hv.top_bracket_vanishes),
            to_json(&hv),
        );
    }
    out.finish()
}

pub fn annihilation(config: &Config) -> Result<Outcome, Failure> {
    let params = params(config)?;
    let n = config.max_index.unwrap_or(6);
    let alg = BlockAlgebra::new(params);
    if let Some(path) = &config.emit_table {
        fs::write(path, annihilation::structure_table_csv(&alg, n))
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    let mut out = Sections::new();
    out.grid("closed_vs_derived", annihilation::closed_vs_derived_grid(&alg, n));
    out.grid("antisymmetry", annihilation::antisymmetry_grid(&alg, n));
    out.grid("jacobi", annihilation::jacobi_grid(&alg, n));
    out.finish()
}

pub fn derivations_check(config: &Config) -> Result<Outcome, Failure> {
    let params = params(config)?;
    let n = config.max_index.unwrap_or(8);
    let mut out = Sections::new();
    for k in 0..3 {
        let d = ConformalDerivation::inner(&params, LambdaElement::generator(k));
        out.grid(&format!("inner_L{k}"), d.leibniz_grid(n));
    }
    if params.is_neg_int() {
        out.grid("outer", ConformalDerivation::outer_dp(&params)?.leibniz_grid(n));
        out.grid("outer_on_hv", hv_restricted_leibniz(&params)?);
    }
    out.finish()
}

pub fn derivations_classify(config: &Config) -> Result<Outcome, Failure> {
    let params = params(config)?;
    let n_src = config.max_index.unwrap_or(4);
    let bx = DerivationBox {
        n_src,
        n_tgt: default_n_tgt(&params, n_src)?,
        deg_partial: config.deg_partial.unwrap_or(3),
        deg_lambda: config.deg_lambda.unwrap_or(3),
    };
    let report = classify(&params, &bx)?;
    let mut out = Sections::new();
    out.value(
        "classify",
        report.matches_theorem,
        format!(
            "kernel {}, inner {}, quotient {} (expected {}), edge-suspect {}",
            report.dim_kernel, report.dim_inner, report.dim_quotient, report.expected_quotient, report.edge_suspect_count
        ),
        to_json(&report),
    );
    out.finish()
}

pub fn derivations_outer(config: &Config) -> Result<Outcome, Failure> {
    let params = params(config)?;
    let d = ConformalDerivation::outer_dp(&params)?;
    let n = config.max_index.unwrap_or(8);
    let mut out = Sections::new();
    out.grid("leibniz", d.leibniz_grid(n));
    let cert = non_innerness_certificate(&d, n.min(4), config.deg_lambda.unwrap_or(3))?;
    let certified = match &cert {
        Innerness::Inner { .. } => false,
        Innerness::NonInner {
            inner_obstruction_vanishes,
            ..
        } => *inner_obstruction_vanishes,
    };
    out.value(
        "non_innerness",
        certified,
        if certified { "certified".into() } else { "not certified".into() },
        to_json(&cert),
    );
    let table: Vec<Value> = outer_table(&params, n)?
        .into_iter()
        .map(|(j, image)| json!({ "j": j, "image": image }))
        .collect();
    out.info("images", Value::Array(table));
    out.finish()
}

pub fn biderivations_check(config: &Config) -> Result<Outcome, Failure> {
    let params = params(config)?;
    let n = config.max_index.unwrap_or(6);
    let mut out = Sections::new();
    let inner = Biderivation::inner(rat::int(1), &params);
    out.grid("inner_bilinear_skew", inner.bilinear_skew_grid(n));
    out.grid("inner_biderivation", inner.biderivation_grid(n));
    out.grid("inner_bi01", inner.bi01_grid(n));
    if params.is_neg_int() {
        let family = Biderivation::theorem2_family(rat::int(1), &params)?;
        out.grid("family_bilinear_skew", family.bilinear_skew_grid(n));
        out.grid("family_biderivation", family.biderivation_grid(n));
        out.grid("family_bi01", family.bi01_grid(n));
        let table = hv_value_table(rat::int(1), &params)?;
        let matches = table.iter().all(|r| r.matches);
        out.value(
            "hv_value_table",
            matches,
            format!("{} rows, all match {matches}", table.len()),
            to_json(&table),
        );
    }
    out.finish()
}

pub fn cohomology_named(config: &Config) -> Result<Outcome, Failure> {
    let params = params(config)?;
    let n = config.max_index.unwrap_or(8);
    let mut out = Sections::new();
    let triples = triples_pairwise(n);
    for which in NamedCocycle::ALL.into_iter().filter(|w| w.applies(&params)) {
        let c = named_cocycle(which, &params)?;
        out.grid(&format!("{which}_cocycle"), residual_grid(&c, &triples));
        if !params.is_formal() {
            let verdict = nontriviality(&c, n)?;
            out.value(
                &format!("{which}_nontrivial"),
                verdict.nontrivial,
                verdict.nontrivial.to_string(),
                to_json(&verdict),
            );
        }
    }
    if !params.is_formal() {
        let ind = named_independence(&params, n)?;
        out.value(
            "independence",
            ind.independent,
            format!("rank {} modulo coboundaries for {}", ind.rank_modulo_coboundaries, ind.names.join(", ")),
            to_json(&ind),
        );
    }
    out.finish()
}

pub fn cohomology_solve(config: &Config) -> Result<Outcome, Failure> {
    let params = params(config)?;
    let module = module(config, &params)?;
    let n = config.max_index.unwrap_or(if module.is_trivial() { 6 } else { 5 });
    let report = cocycle_solver(&module, n, config.deg_lambda.unwrap_or(4), config.deg_partial.unwrap_or(3))?;
    let mut out = Sections::new();
    let mut line = format!(
        "cocycles {}, coboundaries {}, interior quotient {} (expected {}), edge {}",
        report.dim_cocycles,
        report.dim_coboundaries,
        report.dim_quotient_interior,
        report.expected_interior,
        report.dim_quotient_edge
    );
    if !report.matches_theorem {
        line.push_str(&format!("; by grade {:?}", report.quotient_by_grade));
    }
    out.value("solve", report.matches_theorem, line, to_json(&report));
    for class in &report.classes {
        let place = if class.interior { "interior" } else { "edge" };
        out.text.push(format!("  {} ({place}): {:?}", class.name, class.representative_values));
    }
    out.finish()
}

pub fn cohomology_trivialize(config: &Config) -> Result<Outcome, Failure> {
    let params = params(config)?;
    let module = module(config, &params)?;
    if module.is_trivial() {
        return Err(Failure::Usage("trivialize needs --coeffs m-delta-alpha or m-delta-alpha-beta".into()));
    }
    let n = config.max_index.unwrap_or(5);
    let deg = config.deg_partial.unwrap_or(2);
    let mut rng = ChaCha8Rng::seed_from_u64(TRIVIALIZE_SEED);
    let samples: Vec<CochainMap> = (0..TRIVIALIZE_SAMPLES)
        .map(|_| CochainMap::random(&mut rng, n, deg))
        .collect();
    let mut out = Sections::new();
    let triples = triples_total(n);
    let d_squared: Vec<CheckEntry> = samples
        .iter()
        .enumerate()
        .flat_map(|(s, psi)| {
            residual_grid(&coboundary(psi, &module), &triples).into_iter().map(move |mut e| {
                e.indices.insert(0, s);
                e
            })
        })
        .collect();
    out.grid("d_squared", d_squared);
    let rational_alpha = module.alpha().rational().is_some_and(|a| *a != rat::int(0));
    if params.is_formal() || !rational_alpha {
        out.info("round_trips", Value::Null);
        out.text.push("round trips: skipped (needs rational p and α ≠ 0)".into());
        return out.finish();
    }
    let mut round_trips = Vec::new();
    for (s, psi) in samples.iter().enumerate() {
        let c = coboundary(psi, &module);
        let phi = trivialize(&c, n)?;
        let agree = (0..=n).all(|i| (i..=n - i).all(|j| coboundary_value(&phi, &module, i, j) == c.value(i, j)));
        round_trips.push(CheckEntry::from_display(vec![s], agree, if agree { "0" } else { "dφ ≠ dψ" }));
    }
    out.grid("round_trips", round_trips);
    out.finish()
}
