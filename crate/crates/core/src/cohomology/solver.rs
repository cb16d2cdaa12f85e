use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::conformal::{AlgebraParams, GenIndex};
use crate::error::{Error, Result};
use crate::linalg::{self, in_span, kernel_sparse, Membership, SparseRow, Subspace, Vector};
use crate::poly::{Monomial, Poly, Var};
use crate::rat::Rat;

use super::cocycle::{
    coboundary_value, cocycle_residual, named_cocycle, triples_total, CochainMap, NamedCocycle, TwoCocycle,
};
use super::module::{ModuleKind, ModuleParam, RankOneModule};

/// Coordinates for 2-λ-brackets: values on pairs `i ≤ j`, `i + j ≤ n`,
/// with monomials `∂^a λ^b`, `a ≤ deg_partial`, `b ≤ deg_lambda`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CocycleBox {
    n: usize,
    deg_partial: u8,
    deg_lambda: u8,
    pairs: Vec<(GenIndex, GenIndex)>,
}

impl CocycleBox {
    /// `deg_partial` is forced to 0 for the trivial module.
    pub fn new(module: &RankOneModule, n: usize, deg_lambda: u8, deg_partial: u8) -> Self {
        let deg_partial = if module.is_trivial() { 0 } else { deg_partial };
        let pairs = (0..=n)
            .flat_map(|i| (i..=n - i).map(move |j| (i, j)))
            .filter(|(i, j)| i + j <= n)
            .collect();
        CocycleBox {
            n,
            deg_partial,
            deg_lambda,
            pairs,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pairs(&self) -> &[(GenIndex, GenIndex)] {
        &self.pairs
    }

    fn per_pair(&self) -> usize {
        (self.deg_partial as usize + 1) * (self.deg_lambda as usize + 1)
    }

    pub fn ncols(&self) -> usize {
        self.pairs.len() * self.per_pair()
    }

    fn pair_index(&self, pair: (GenIndex, GenIndex)) -> Option<usize> {
        self.pairs.binary_search(&pair).ok()
    }

    fn col(&self, pair_idx: usize, a: u8, b: u8) -> usize {
        pair_idx * self.per_pair() + a as usize * (self.deg_lambda as usize + 1) + b as usize
    }

    fn decode(&self, col: usize) -> ((GenIndex, GenIndex), Monomial) {
        let pair = self.pairs[col / self.per_pair()];
        let r = col % self.per_pair();
        let a = (r / (self.deg_lambda as usize + 1)) as u8;
        let b = (r % (self.deg_lambda as usize + 1)) as u8;
        (pair, Monomial::var(Var::Partial, a).with_exponent(Var::Lambda, b))
    }

    /// Box coordinate of `mono` at `pair`, if inside the box.
    fn coord(&self, pair: (GenIndex, GenIndex), mono: &Monomial) -> Option<usize> {
        let (a, b) = (mono.exponent(Var::Partial), mono.exponent(Var::Lambda));
        let pure = mono.degree() == a as u32 + b as u32;
        if !pure || a > self.deg_partial || b > self.deg_lambda {
            return None;
        }
        Some(self.col(self.pair_index(pair)?, a, b))
    }

    /// Restriction of `c` to the box pairs.
    pub fn vector_of(&self, c: &TwoCocycle) -> Result<Vector> {
        let mut out = vec![Rat::zero(); self.ncols()];
        for (pair, f) in c.upper().filter(|((i, j), _)| i + j <= self.n) {
            for (m, q) in f.terms() {
                let col = self.coord(pair, m).ok_or_else(|| {
                    Error::OutOfBounds(format!("value at {pair:?} has the term {m} outside the box"))
                })?;
                out[col] = q.clone();
            }
        }
        Ok(out)
    }

    pub fn cocycle_of(&self, module: &RankOneModule, x: &[Rat]) -> TwoCocycle {
        let mut values: BTreeMap<(GenIndex, GenIndex), Poly> = BTreeMap::new();
        for (col, q) in x.iter().enumerate().filter(|(_, q)| !q.is_zero()) {
            let (pair, m) = self.decode(col);
            *values.entry(pair).or_default() += &Poly::term(m, q.clone());
        }
        let mut c = TwoCocycle::zero(module);
        for ((i, j), f) in values {
            c.insert_raw(i, j, f);
        }
        c
    }

    /// Coordinates of pairs with `i + j` in `grades`.
    fn coords_where(&self, keep: impl Fn(usize) -> bool) -> Vec<usize> {
        (0..self.ncols())
            .filter(|&col| {
                let ((i, j), _) = self.decode(col);
                keep(i + j)
            })
            .collect()
    }
}

fn unit_cocycle(bx: &CocycleBox, module: &RankOneModule, col: usize) -> TwoCocycle {
    let ((i, j), m) = bx.decode(col);
    let mut c = TwoCocycle::zero(module);
    c.insert_raw(i, j, Poly::term(m, Rat::one()));
    c
}

fn sorted(a: GenIndex, b: GenIndex) -> (GenIndex, GenIndex) {
    (a.min(b), a.max(b))
}

/// Linear constraints: skew-symmetry on diagonal pairs and the cocycle
/// condition at every ordered triple with `i + j + k ≤ n`.
fn cocycle_system(bx: &CocycleBox, module: &RankOneModule) -> Vec<SparseRow> {
    let per_pair = bx.per_pair();
    let mut rows = Vec::new();
    let lam = crate::poly::v(Var::Lambda);
    let flip_arg = -&lam - &module.partial();
    for (idx, &(i, j)) in bx.pairs.iter().enumerate().filter(|(_, (i, j))| i == j) {
        let mut by_mono: BTreeMap<Monomial, SparseRow> = BTreeMap::new();
        for col in idx * per_pair..(idx + 1) * per_pair {
            let ((_, _), m) = bx.decode(col);
            let f = Poly::term(m, Rat::one());
            let skew = &f + &f.substitute(Var::Lambda, &flip_arg);
            for (mono, q) in skew.terms() {
                by_mono.entry(*mono).or_default().insert(col, q.clone());
            }
        }
        debug_assert!(i == j);
        rows.extend(by_mono.into_values());
    }
    let triples = triples_total(bx.n);
    let per_triple: Vec<Vec<SparseRow>> = triples
        .into_par_iter()
        .map(|(i, j, k)| {
            let involved: BTreeSet<usize> = [
                sorted(j, k),
                sorted(i, k),
                sorted(i, j),
                sorted(i, j + k),
                sorted(j, i + k),
                sorted(k, i + j),
            ]
            .into_iter()
            .filter_map(|pr| bx.pair_index(pr))
            .collect();
            let mut by_mono: BTreeMap<Monomial, SparseRow> = BTreeMap::new();
            for idx in involved {
                for col in idx * per_pair..(idx + 1) * per_pair {
                    let r = cocycle_residual(&unit_cocycle(bx, module, col), i, j, k);
                    for (mono, q) in r.terms() {
                        by_mono.entry(*mono).or_default().insert(col, q.clone());
                    }
                }
            }
            by_mono.into_values().collect()
        })
        .collect();
    rows.extend(per_triple.into_iter().flatten());
    rows
}

/// Coefficients of a coboundary that fall outside the box.
type OutOfBox = BTreeMap<((GenIndex, GenIndex), Monomial), Rat>;

/// Coboundaries `dφ` whose restriction to the box pairs lies in the box.
/// `φ_i` ranges over polynomials of ∂-degree `≤ deg_partial + 1`
/// (constants for the trivial module) with `i ≤ n`.
pub fn coboundary_space(bx: &CocycleBox, module: &RankOneModule) -> Subspace {
    let top = if module.is_trivial() { 0 } else { bx.deg_partial + 1 };
    let phis: Vec<(GenIndex, u8)> = (0..=bx.n).flat_map(|i| (0..=top).map(move |e| (i, e))).collect();
    let images: Vec<(Vector, OutOfBox)> = phis
        .par_iter()
        .map(|&(s, e)| {
            let phi = CochainMap::new([(s, Poly::term(Monomial::var(Var::Partial, e), Rat::one()))]);
            let mut inside = vec![Rat::zero(); bx.ncols()];
            let mut outside = BTreeMap::new();
            for &(i, j) in &bx.pairs {
                let f = coboundary_value(&phi, module, i, j);
                for (m, q) in f.terms() {
                    match bx.coord((i, j), m) {
                        Some(col) => inside[col] = q.clone(),
                        None => {
                            outside.insert(((i, j), *m), q.clone());
                        }
                    }
                }
            }
            (inside, outside)
        })
        .collect();
    let mut out_rows: BTreeMap<((GenIndex, GenIndex), Monomial), SparseRow> = BTreeMap::new();
    for (col, (_, outside)) in images.iter().enumerate() {
        for (key, q) in outside {
            out_rows.entry(*key).or_default().insert(col, q.clone());
        }
    }
    let rows: Vec<SparseRow> = out_rows.into_values().collect();
    let fitting = kernel_sparse(&rows, phis.len());
    let vectors = fitting
        .basis()
        .iter()
        .map(|y| {
            let mut v = vec![Rat::zero(); bx.ncols()];
            for (k, coeff) in y.iter().enumerate().filter(|(_, q)| !q.is_zero()) {
                for (x, z) in v.iter_mut().zip(&images[k].0) {
                    *x += coeff * z;
                }
            }
            v
        })
        .collect();
    Subspace::span(bx.ncols(), vectors).expect("box vectors")
}

fn project(space: &Subspace, coords: &[usize]) -> Subspace {
    let vectors = space
        .basis()
        .iter()
        .map(|b| coords.iter().map(|&c| b[c].clone()).collect())
        .collect();
    Subspace::span(coords.len(), vectors).expect("projected vectors")
}

#[derive(Debug, Clone, Serialize)]
pub struct QuotientClass {
    pub name: String,
    pub interior: bool,
    pub representative_values: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolverReport {
    pub module_kind: ModuleKind,
    pub p: AlgebraParams,
    #[serde(rename = "Δ")]
    pub delta: Option<ModuleParam>,
    #[serde(rename = "α")]
    pub alpha: Option<ModuleParam>,
    #[serde(rename = "β")]
    pub beta: Option<ModuleParam>,
    #[serde(rename = "N")]
    pub n: usize,
    pub deg_lambda: u8,
    pub deg_partial: u8,
    pub dim_cocycles: usize,
    pub dim_coboundaries: usize,
    pub dim_quotient_interior: usize,
    pub dim_quotient_edge: usize,
    /// Quotient dimension of the projection onto pairs with `i + j = s`.
    pub quotient_by_grade: BTreeMap<usize, usize>,
    pub expected_interior: usize,
    /// The applicable named classes span the interior quotient.
    pub named_classes_span: bool,
    pub matches_theorem: bool,
    /// For module coefficients: every kernel basis element is `dφ` for the
    /// `φ` returned by [`trivialize`](super::trivialize).
    pub kernel_trivialized: Option<bool>,
    pub classes: Vec<QuotientClass>,
}

fn interior_limit(n: usize) -> usize {
    n.saturating_sub(2)
}

fn named_grade(which: NamedCocycle, params: &AlgebraParams) -> usize {
    match which {
        NamedCocycle::Alpha => 0,
        NamedCocycle::Beta | NamedCocycle::BetaBar => params.neg_2p_index("grade").expect("applies"),
        NamedCocycle::BetaTilde => 2,
    }
}

/// Solves the cocycle condition on the box and compares the interior
/// quotient with the expected cohomology.
pub fn cocycle_solver(module: &RankOneModule, n: usize, deg_lambda: u8, deg_partial: u8) -> Result<SolverReport> {
    let params = module.params();
    params.rational_p("the cocycle solver")?;
    if !module.is_trivial() {
        let rational = |m: &ModuleParam| m.rational().is_some();
        if !(rational(module.delta()) && rational(module.alpha()) && rational(module.beta())) {
            return Err(Error::InvalidModule("the solver needs rational Δ, α, β".into()));
        }
        if module.alpha().rational().is_some_and(Zero::is_zero) {
            return Err(Error::InvalidModule("α = 0 is outside the scope of the solver".into()));
        }
        if deg_partial == 0 {
            return Err(Error::OutOfBounds("module cocycles need ∂-degree at least 1".into()));
        }
    }
    if n < 2 {
        return Err(Error::OutOfBounds("N must be at least 2".into()));
    }
    let bx = CocycleBox::new(module, n, deg_lambda, deg_partial);
    let kernel = kernel_sparse(&cocycle_system(&bx, module), bx.ncols());
    let cob = coboundary_space(&bx, module);
    if !kernel.contains_subspace(&cob)? {
        return Err(Error::NotACocycle("a coboundary in the box violates the constraints".into()));
    }

    let limit = interior_limit(n);
    let interior_coords = bx.coords_where(|s| s <= limit);
    let (k_int, b_int) = (project(&kernel, &interior_coords), project(&cob, &interior_coords));
    let dim_quotient_interior = k_int.dim() - b_int.dim();
    let dim_total = kernel.dim() - cob.dim();
    let quotient_by_grade = (0..=n)
        .map(|s| {
            let coords = bx.coords_where(|t| t == s);
            (s, project(&kernel, &coords).dim() - project(&cob, &coords).dim())
        })
        .collect();

    let named: Vec<NamedCocycle> = if module.is_trivial() {
        NamedCocycle::ALL
            .into_iter()
            .filter(|w| w.applies(params) && named_grade(*w, params) <= limit)
            .collect()
    } else {
        Vec::new()
    };
    let expected_interior = named.len();

    let mut classes = Vec::new();
    let mut span = cob.clone();
    let mut named_vectors = Vec::new();
    for &w in &named {
        let c = named_cocycle(w, params)?;
        let Ok(x) = bx.vector_of(&c) else {
            continue;
        };
        if kernel.contains(&x)? && !span.contains(&x)? {
            span = span.with_vectors(std::slice::from_ref(&x))?;
            classes.push(QuotientClass {
                name: w.name().to_string(),
                interior: true,
                representative_values: c.table(n),
            });
            named_vectors.push(x);
        }
    }
    let named_span = project(&cob.with_vectors(&named_vectors)?, &interior_coords);
    let named_classes_span = named_vectors.len() == named.len() && named_span.dim() == k_int.dim();

    let edge_coords = bx.coords_where(|s| s > limit);
    for (k, b) in kernel.basis().iter().enumerate() {
        if span.contains(b)? {
            continue;
        }
        span = span.with_vectors(std::slice::from_ref(b))?;
        let rep = cob.reduce(b);
        let interior = edge_coords.iter().all(|&c| rep[c].is_zero());
        classes.push(QuotientClass {
            name: format!("class-{k}"),
            interior,
            representative_values: bx.cocycle_of(module, &rep).table(n),
        });
    }

    let kernel_trivialized = (!module.is_trivial()).then(|| {
        kernel
            .basis()
            .iter()
            .all(|b| super::trivialize::trivialize(&bx.cocycle_of(module, b), n).is_ok())
    });

    let some_if = |m: &ModuleParam| (!module.is_trivial()).then(|| m.clone());
    Ok(SolverReport {
        module_kind: module.kind(),
        p: params.clone(),
        delta: some_if(module.delta()),
        alpha: some_if(module.alpha()),
        beta: (module.kind() == ModuleKind::MDeltaAlphaBeta).then(|| module.beta().clone()),
        n,
        deg_lambda,
        deg_partial: bx.deg_partial,
        dim_cocycles: kernel.dim(),
        dim_coboundaries: cob.dim(),
        dim_quotient_interior,
        dim_quotient_edge: dim_total.saturating_sub(dim_quotient_interior),
        quotient_by_grade,
        expected_interior,
        named_classes_span,
        matches_theorem: dim_quotient_interior == expected_interior
            && named_classes_span
            && kernel_trivialized != Some(false),
        kernel_trivialized,
        classes,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Nontriviality {
    pub nontrivial: bool,
    /// `φ` with `c = dφ` on the truncation, when trivial.
    pub witness: Option<CochainMap>,
    /// Nonzero entries `"(i,j) monomial" ↦ value` of a functional vanishing
    /// on coboundaries but not on `c`.
    pub separating_functional: BTreeMap<String, String>,
}

/// Decides whether a trivial-coefficient cocycle restricted to pairs with
/// `i + j ≤ n` is a coboundary.
pub fn nontriviality(c: &TwoCocycle, n: usize) -> Result<Nontriviality> {
    let module = c.module();
    if !module.is_trivial() {
        return Err(Error::InvalidModule("nontriviality is decided for trivial coefficients".into()));
    }
    let deg = c
        .upper()
        .filter_map(|(_, f)| f.degree_in(Var::Lambda))
        .max()
        .unwrap_or(0)
        .max(1) as u8;
    let bx = CocycleBox::new(module, n, deg, 0);
    let x = bx.vector_of(c)?;
    let generators: Vec<Vector> = (0..=n)
        .map(|s| {
            let phi = CochainMap::new([(s, Poly::one())]);
            let d = super::cocycle::coboundary(&phi, module);
            bx.vector_of(&d)
        })
        .collect::<Result<_>>()?;
    let cob = Subspace::span(bx.ncols(), generators.clone())?;
    match in_span(&x, &cob)? {
        Membership::Inside { .. } => {
            let y = linalg::solve_combination(&generators, &x)
                .ok_or_else(|| Error::OutOfBounds("coboundary without a witness".into()))?;
            Ok(Nontriviality {
                nontrivial: false,
                witness: Some(CochainMap::new(y.into_iter().enumerate().map(|(s, q)| (s, Poly::constant(q))))),
                separating_functional: BTreeMap::new(),
            })
        }
        Membership::Outside { functional } => Ok(Nontriviality {
            nontrivial: true,
            witness: None,
            separating_functional: functional
                .iter()
                .enumerate()
                .filter(|(_, q)| !q.is_zero())
                .map(|(col, q)| {
                    let ((i, j), m) = bx.decode(col);
                    (format!("({i},{j}) {m}"), q.to_string())
                })
                .collect(),
        }),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NamedIndependence {
    pub names: Vec<String>,
    pub rank_modulo_coboundaries: usize,
    pub independent: bool,
}

/// Rank of the applicable named classes modulo coboundaries on pairs with
/// `i + j ≤ n`.
pub fn named_independence(params: &AlgebraParams, n: usize) -> Result<NamedIndependence> {
    let module = RankOneModule::trivial(params);
    let bx = CocycleBox::new(&module, n, 3, 0);
    let cob = coboundary_space(&bx, &module);
    let which: Vec<NamedCocycle> = NamedCocycle::ALL.into_iter().filter(|w| w.applies(params)).collect();
    let vectors = which
        .iter()
        .map(|&w| bx.vector_of(&named_cocycle(w, params)?))
        .collect::<Result<Vec<_>>>()?;
    let rank = cob.with_vectors(&vectors)?.dim() - cob.dim();
    Ok(NamedIndependence {
        names: which.iter().map(|w| w.name().to_string()).collect(),
        rank_modulo_coboundaries: rank,
        independent: rank == which.len(),
    })
}
