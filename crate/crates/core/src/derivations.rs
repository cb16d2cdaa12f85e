//! Conformal derivations of `𝔅(p)`: inner maps, the outer derivation `D^p`
//! for `p ∈ ℤ⁻`, a Leibniz checker, and a classifier on a finite box.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::conformal::{AlgebraParams, BlockAlgebra, GenIndex, LambdaElement};
use crate::error::{Error, Result};
use crate::linalg::{self, in_span, kernel_sparse, Membership, SparseRow, Subspace, Vector};
use crate::poly::{v, Monomial, Poly, Var};
use crate::rat::{self, Rat};
use crate::report::CheckEntry;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DerivationKind {
    /// `ad γ`; `γ` has ∂-polynomial coefficients.
    Inner(LambdaElement),
    /// `D_λ(L_j) = (j+p) L_{j−p}`.
    OuterDp,
    /// Explicit images of generators; unlisted generators map to zero.
    Tabulated(BTreeMap<GenIndex, LambdaElement>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConformalDerivation {
    kind: DerivationKind,
    alg: BlockAlgebra,
}

impl ConformalDerivation {
    pub fn inner(params: &AlgebraParams, gamma: LambdaElement) -> Self {
        ConformalDerivation {
            kind: DerivationKind::Inner(gamma),
            alg: BlockAlgebra::new(params.clone()),
        }
    }

    pub fn outer_dp(params: &AlgebraParams) -> Result<Self> {
        params.neg_p_index("the outer derivation D^p")?;
        Ok(ConformalDerivation {
            kind: DerivationKind::OuterDp,
            alg: BlockAlgebra::new(params.clone()),
        })
    }

    pub fn tabulated(params: &AlgebraParams, images: BTreeMap<GenIndex, LambdaElement>) -> Self {
        ConformalDerivation {
            kind: DerivationKind::Tabulated(images),
            alg: BlockAlgebra::new(params.clone()),
        }
    }

    pub fn kind(&self) -> &DerivationKind {
        &self.kind
    }

    pub fn params(&self) -> &AlgebraParams {
        self.alg.params()
    }

    /// `D_λ(L_j)`.
    pub fn image(&self, j: GenIndex) -> LambdaElement {
        match &self.kind {
            DerivationKind::Inner(gamma) => {
                self.alg.bracket(gamma, &LambdaElement::generator(j), &v(Var::Lambda))
            }
            DerivationKind::OuterDp => {
                let n = self.params().neg_p_index("D^p").expect("checked at construction");
                LambdaElement::single(j + n, self.params().affine(j as i64, 1))
            }
            DerivationKind::Tabulated(images) => images.get(&j).cloned().unwrap_or_default(),
        }
    }

    /// `D_λ(Σ f_i(∂) L_i) = Σ f_i(∂+λ) D_λ(L_i)`.
    pub fn apply(&self, x: &LambdaElement) -> LambdaElement {
        let lam = v(Var::Lambda);
        let mut out = LambdaElement::zero();
        for (i, f) in x.components() {
            let shifted = f.translate(Var::Partial, &lam);
            out = &out + &self.image(i).scale(&shifted);
        }
        out
    }

    /// `D_λ[L_i μ L_j] − [(D_λ L_i)_{λ+μ} L_j] − [L_i μ (D_λ L_j)]`.
    pub fn leibniz_residual(&self, i: GenIndex, j: GenIndex) -> LambdaElement {
        let (lam, mu) = (v(Var::Lambda), v(Var::Mu));
        let (li, lj) = (LambdaElement::generator(i), LambdaElement::generator(j));
        let lhs = self.apply(&self.alg.bracket(&li, &lj, &mu));
        let t1 = self.alg.bracket(&self.image(i), &lj, &(&lam + &mu));
        let t2 = self.alg.bracket(&li, &self.image(j), &mu);
        &(&lhs - &t1) - &t2
    }

    pub fn leibniz_grid(&self, n: GenIndex) -> Vec<CheckEntry> {
        let pairs: Vec<(usize, usize)> = (0..=n).flat_map(|i| (0..=n).map(move |j| (i, j))).collect();
        pairs
            .into_par_iter()
            .map(|(i, j)| CheckEntry::from_element(vec![i, j], &self.leibniz_residual(i, j)))
            .collect()
    }
}

/// Leibniz residuals on the pairs drawn from `{L₀, L_{−p}}`.
pub fn hv_restricted_leibniz(params: &AlgebraParams) -> Result<Vec<CheckEntry>> {
    let n = params.neg_p_index("Heisenberg-Virasoro restriction")?;
    let d = ConformalDerivation::outer_dp(params)?;
    Ok([(0, 0), (0, n), (n, 0), (n, n)]
        .into_iter()
        .map(|(i, j)| CheckEntry::from_element(vec![i, j], &d.leibniz_residual(i, j)))
        .collect())
}

/// Coordinates for maps `L_i ↦ Σ x_{i,k,a,b} ∂^a λ^b L_k` with `i ≤ n_src`,
/// `k ≤ n_tgt`, `a ≤ deg_partial`, `b ≤ deg_lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DerivationBox {
    pub n_src: usize,
    pub n_tgt: usize,
    pub deg_partial: u8,
    pub deg_lambda: u8,
}

impl DerivationBox {
    fn per_target(&self) -> usize {
        (self.deg_partial as usize + 1) * (self.deg_lambda as usize + 1)
    }

    fn per_source(&self) -> usize {
        (self.n_tgt + 1) * self.per_target()
    }

    pub fn ncols(&self) -> usize {
        (self.n_src + 1) * self.per_source()
    }

    pub fn col(&self, i: usize, k: usize, a: u8, b: u8) -> usize {
        i * self.per_source()
            + k * self.per_target()
            + a as usize * (self.deg_lambda as usize + 1)
            + b as usize
    }

    pub fn decode(&self, col: usize) -> (usize, usize, u8, u8) {
        let i = col / self.per_source();
        let r = col % self.per_source();
        let k = r / self.per_target();
        let r = r % self.per_target();
        let a = (r / (self.deg_lambda as usize + 1)) as u8;
        let b = (r % (self.deg_lambda as usize + 1)) as u8;
        (i, k, a, b)
    }

    /// Coordinates of `D` restricted to the sources of the box.
    pub fn vector_of(&self, d: &ConformalDerivation) -> Result<Vector> {
        let mut out = vec![Rat::zero(); self.ncols()];
        for i in 0..=self.n_src {
            let img = d.params().specialize_element(&d.image(i));
            for (k, f) in img.components() {
                for (m, coeff) in f.terms() {
                    let (a, b) = (m.exponent(Var::Partial), m.exponent(Var::Lambda));
                    let other = m.degree() - a as u32 - b as u32;
                    if k > self.n_tgt || a > self.deg_partial || b > self.deg_lambda || other > 0 {
                        return Err(Error::OutOfBounds(format!(
                            "image of L{i} has the term ({m})·L{k} outside the box"
                        )));
                    }
                    out[self.col(i, k, a, b)] = coeff.clone();
                }
            }
        }
        Ok(out)
    }

    pub fn images_of(&self, x: &[Rat]) -> BTreeMap<GenIndex, LambdaElement> {
        let mut images: BTreeMap<GenIndex, LambdaElement> = BTreeMap::new();
        for (col, coeff) in x.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            let (i, k, a, b) = self.decode(col);
            let m = Monomial::var(Var::Partial, a).with_exponent(Var::Lambda, b);
            images
                .entry(i)
                .or_default()
                .add_component(k, &Poly::term(m, coeff.clone()));
        }
        images
    }

    /// Spanned by `ad(∂^a L_k)` for `k ≤ n_tgt − n_src` and `a < deg_lambda`,
    /// the inner derivations whose images on the sources fit the box.
    pub fn inner_space(&self, params: &AlgebraParams) -> Result<Subspace> {
        let mut vectors = Vec::new();
        for k in 0..=self.n_tgt.saturating_sub(self.n_src) {
            for a in 0..self.deg_lambda {
                let gamma = LambdaElement::single(k, v(Var::Partial).pow(a as u32));
                vectors.push(self.vector_of(&ConformalDerivation::inner(params, gamma))?);
            }
        }
        Subspace::span(self.ncols(), vectors)
    }

    /// Coordinates belonging to sources `i ≤ last_interior`.
    fn source_coords(&self, last_interior: usize) -> Vec<usize> {
        (0..self.ncols())
            .filter(|&col| self.decode(col).0 <= last_interior)
            .collect()
    }
}

/// `⌈max(0, −p)⌉`, the index shift of the outer derivation.
fn outer_shift(params: &AlgebraParams) -> Result<usize> {
    let q = params.rational_p("classification")?;
    if *q >= Rat::zero() {
        return Ok(0);
    }
    let ceil = (-q).ceil();
    Ok(rat::to_i64(&ceil).expect("small shift") as usize)
}

pub fn default_n_tgt(params: &AlgebraParams, n_src: usize) -> Result<usize> {
    Ok((2 * n_src).max(n_src + outer_shift(params)?))
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyReport {
    pub p: AlgebraParams,
    #[serde(rename = "N_src")]
    pub n_src: usize,
    #[serde(rename = "N_tgt")]
    pub n_tgt: usize,
    pub degrees: Degrees,
    pub dim_kernel: usize,
    pub dim_inner: usize,
    /// Quotient of the kernel by the inner span after discarding edge-suspect classes.
    pub dim_quotient: usize,
    pub dim_quotient_total: usize,
    pub edge_suspect_count: usize,
    pub outer_found: bool,
    pub expected_quotient: usize,
    pub matches_theorem: bool,
    /// Images of a normalized interior quotient representative, if any.
    pub representative: Option<BTreeMap<GenIndex, LambdaElement>>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Degrees {
    pub partial: u8,
    pub lambda: u8,
}

/// Linear system whose kernel is the space of box maps satisfying every
/// Leibniz constraint with `i, j, i+j ≤ n_src`.
pub fn leibniz_system(params: &AlgebraParams, bx: &DerivationBox) -> Vec<SparseRow> {
    let pairs: Vec<(usize, usize)> = (0..=bx.n_src)
        .flat_map(|i| (0..=bx.n_src - i).map(move |j| (i, j)))
        .collect();
    let per_pair: Vec<Vec<SparseRow>> = pairs
        .into_par_iter()
        .map(|(i, j)| {
            let mut rows: BTreeMap<(GenIndex, Monomial), SparseRow> = BTreeMap::new();
            let mut sources = vec![i, j, i + j];
            sources.sort_unstable();
            sources.dedup();
            for s in sources {
                for k in 0..=bx.n_tgt {
                    for a in 0..=bx.deg_partial {
                        for b in 0..=bx.deg_lambda {
                            let m = Monomial::var(Var::Partial, a).with_exponent(Var::Lambda, b);
                            let img = LambdaElement::single(k, Poly::term(m, Rat::one()));
                            let d = ConformalDerivation::tabulated(params, BTreeMap::from([(s, img)]));
                            let res = d.leibniz_residual(i, j);
                            let col = bx.col(s, k, a, b);
                            for (t, f) in res.components() {
                                for (mono, coeff) in f.terms() {
                                    rows.entry((t, *mono)).or_default().insert(col, coeff.clone());
                                }
                            }
                        }
                    }
                }
            }
            rows.into_values().collect()
        })
        .collect();
    per_pair.into_iter().flatten().collect()
}

/// Solves the Leibniz system on the box and compares the kernel with the
/// inner span (plus `D^p` when `p ∈ ℤ⁻`).
pub fn classify(params: &AlgebraParams, bx: &DerivationBox) -> Result<ClassifyReport> {
    params.rational_p("classification")?;
    let shift = outer_shift(params)?;
    if bx.n_tgt < bx.n_src + shift {
        return Err(Error::OutOfBounds(format!(
            "N_tgt = {} is below N_src + max(0, -p) = {}",
            bx.n_tgt,
            bx.n_src + shift
        )));
    }
    if bx.deg_partial < 1 || bx.deg_lambda < 1 {
        return Err(Error::OutOfBounds(
            "inner derivations need ∂-degree and λ-degree at least 1".into(),
        ));
    }
    let rows = leibniz_system(params, bx);
    let kernel = kernel_sparse(&rows, bx.ncols());
    let inner = bx.inner_space(params)?;
    if !kernel.contains_subspace(&inner)? {
        return Err(Error::OutOfBounds(
            "truncated inner derivations violate the box constraints".into(),
        ));
    }

    let interior_sources = bx.n_src - shift;
    let edge = kernel.restrict_zero(&bx.source_coords(interior_sources));
    let inner_plus_edge = inner.join(&edge)?;
    let dim_quotient_total = kernel.dim() - inner.dim();
    let dim_quotient = kernel.dim() - inner_plus_edge.dim();
    let edge_suspect_count = dim_quotient_total - dim_quotient;

    let outer = if params.is_neg_int() {
        Some(bx.vector_of(&ConformalDerivation::outer_dp(params)?)?)
    } else {
        None
    };
    let outer_found = match &outer {
        Some(o) => kernel.contains(o)? && !inner_plus_edge.contains(o)?,
        None => false,
    };
    let expected_quotient = usize::from(params.is_neg_int());
    let spans = match &outer {
        Some(o) => inner_plus_edge.with_vectors(std::slice::from_ref(o))?.dim() == kernel.dim(),
        None => true,
    };
    let matches_theorem = dim_quotient == expected_quotient && (outer.is_none() || (outer_found && spans));

    let representative = kernel
        .basis()
        .iter()
        .find(|b| !inner_plus_edge.contains(b).unwrap_or(true))
        .map(|b| {
            let r = inner_plus_edge.reduce(b);
            normalize_representative(params, bx, r)
        });

    Ok(ClassifyReport {
        p: params.clone(),
        n_src: bx.n_src,
        n_tgt: bx.n_tgt,
        degrees: Degrees {
            partial: bx.deg_partial,
            lambda: bx.deg_lambda,
        },
        dim_kernel: kernel.dim(),
        dim_inner: inner.dim(),
        dim_quotient,
        dim_quotient_total,
        edge_suspect_count,
        outer_found,
        expected_quotient,
        matches_theorem,
        representative,
    })
}

/// Scales so that the constant `L_{−p}` term of `D(L₀)` equals `p`, when present.
fn normalize_representative(
    params: &AlgebraParams,
    bx: &DerivationBox,
    mut x: Vector,
) -> BTreeMap<GenIndex, LambdaElement> {
    let anchor = params
        .neg_p_index("normalization")
        .ok()
        .filter(|&k| k <= bx.n_tgt)
        .map(|k| bx.col(0, k, 0, 0))
        .filter(|&col| !x[col].is_zero());
    let scale = match anchor {
        Some(col) => params.rational_p("normalization").expect("rational").clone() / &x[col],
        None => {
            let lead = x.iter().find(|q| !q.is_zero()).cloned().unwrap_or_else(Rat::one);
            lead.recip()
        }
    };
    for q in &mut x {
        *q *= &scale;
    }
    bx.images_of(&x)
}

/// Outcome of testing whether a derivation is inner on a box.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Innerness {
    /// `D = ad γ` on the box.
    Inner { witness: LambdaElement },
    NonInner {
        /// Pairs `(j, value)`: the `L_{j−p}` coefficient of `D(L_j)` at `λ = ∂ = 0`,
        /// which every inner derivation sends to zero.
        obstruction: Vec<(GenIndex, String)>,
        /// Every inner basis map has vanishing obstruction entries.
        inner_obstruction_vanishes: bool,
        /// A functional killing the truncated inner span but not `D`.
        separating_functional_support: usize,
    },
}

impl Innerness {
    pub fn is_inner(&self) -> bool {
        matches!(self, Innerness::Inner { .. })
    }
}

/// Decides innerness of `d` on the box `n_src = n`, `n_tgt = n + ⌈max(0,−p)⌉`,
/// degrees `(deg, deg)`.
pub fn non_innerness_certificate(d: &ConformalDerivation, n: usize, deg: u8) -> Result<Innerness> {
    let params = d.params();
    let shift = outer_shift(params)?;
    let bx = DerivationBox {
        n_src: n,
        n_tgt: n + shift,
        deg_partial: deg.max(1),
        deg_lambda: deg.max(1),
    };
    let target = bx.vector_of(d)?;
    let inner = bx.inner_space(params)?;
    match in_span(&target, &inner)? {
        Membership::Inside { .. } => {
            let mut gamma = LambdaElement::zero();
            let gens = inner_generators(&bx);
            let basis_vectors: Vec<Vector> = gens
                .iter()
                .map(|g| bx.vector_of(&ConformalDerivation::inner(params, g.clone())))
                .collect::<Result<_>>()?;
            let coords = linalg::solve_combination(&basis_vectors, &target)
                .ok_or_else(|| Error::OutOfBounds("inner span membership without a witness".into()))?;
            for (g, q) in gens.iter().zip(coords) {
                if !q.is_zero() {
                    gamma = &gamma + &g.scale(&Poly::constant(q));
                }
            }
            Ok(Innerness::Inner { witness: gamma })
        }
        Membership::Outside { functional } => {
            let neg_p = params.neg_p_index("λ = 0 obstruction").ok();
            let mut obstruction = Vec::new();
            let mut inner_vanishes = true;
            if let Some(np) = neg_p {
                for j in (0..=n).filter(|&j| j != np) {
                    let col = bx.col(j, j + np, 0, 0);
                    obstruction.push((j, target[col].to_string()));
                    inner_vanishes &= inner.basis().iter().all(|b| b[col].is_zero());
                }
            }
            Ok(Innerness::NonInner {
                obstruction,
                inner_obstruction_vanishes: inner_vanishes,
                separating_functional_support: functional.iter().filter(|q| !q.is_zero()).count(),
            })
        }
    }
}

fn inner_generators(bx: &DerivationBox) -> Vec<LambdaElement> {
    (0..=bx.n_tgt.saturating_sub(bx.n_src))
        .flat_map(|k| {
            (0..bx.deg_lambda).map(move |a| LambdaElement::single(k, v(Var::Partial).pow(a as u32)))
        })
        .collect()
}

/// `D(L_j)` for `D = D^p` as a ∂,λ-free check: `(j+p) L_{j−p}`.
pub fn outer_table(params: &AlgebraParams, n: GenIndex) -> Result<Vec<(GenIndex, LambdaElement)>> {
    let d = ConformalDerivation::outer_dp(params)?;
    Ok((0..=n).map(|j| (j, d.image(j))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::c;
    use crate::report::failures;

    fn p(n: i64) -> AlgebraParams {
        AlgebraParams::int(n).unwrap()
    }

    #[test]
    fn inner_examples() {
        let formal = AlgebraParams::formal();
        let d = ConformalDerivation::inner(&formal, LambdaElement::generator(0));
        let want = &(&v(Var::P) * &v(Var::Partial)) + &(&(&c(3) + &(&c(2) * &v(Var::P))) * &v(Var::Lambda));
        assert_eq!(d.image(3), LambdaElement::single(3, want));

        let zero = ConformalDerivation::inner(&formal, LambdaElement::zero());
        assert!(zero.image(2).is_zero());

        let d1 = ConformalDerivation::inner(&p(1), LambdaElement::single(0, v(Var::Partial)));
        let lam = v(Var::Lambda);
        let want = &-&lam * &(&v(Var::Partial) + &(&c(2) * &lam));
        assert_eq!(d1.image(0), LambdaElement::single(0, want));
    }

    #[test]
    fn outer_examples() {
        let d = ConformalDerivation::outer_dp(&p(-1)).unwrap();
        assert_eq!(d.image(0), LambdaElement::single(1, c(-1)));
        assert!(d.image(1).is_zero());
        assert_eq!(d.image(2), LambdaElement::single(3, c(1)));
        assert!(ConformalDerivation::outer_dp(&p(-2)).unwrap().image(2).is_zero());
        assert_eq!(
            ConformalDerivation::outer_dp(&p(-3)).unwrap().image(1),
            LambdaElement::single(4, c(-2))
        );
        assert!(ConformalDerivation::outer_dp(&p(2)).is_err());
        assert!(ConformalDerivation::outer_dp(&AlgebraParams::formal()).is_err());
    }

    #[test]
    fn apply_examples() {
        let d = ConformalDerivation::outer_dp(&p(-1)).unwrap();
        let got = d.apply(&LambdaElement::single(0, v(Var::Partial)));
        assert_eq!(got, LambdaElement::single(1, -(&v(Var::Partial) + &v(Var::Lambda))));
        assert!(d.apply(&LambdaElement::zero()).is_zero());
    }

    #[test]
    fn leibniz_examples() {
        let d = ConformalDerivation::outer_dp(&p(-1)).unwrap();
        assert!(d.leibniz_residual(0, 0).is_zero());
        assert_eq!(failures(&d.leibniz_grid(5)), 0);

        let inner = ConformalDerivation::inner(&AlgebraParams::formal(), LambdaElement::single(2, v(Var::Partial)));
        assert_eq!(failures(&inner.leibniz_grid(3)), 0);

        let bad = ConformalDerivation::tabulated(
            &p(1),
            BTreeMap::from([(0, LambdaElement::generator(0))]),
        );
        assert!(!bad.leibniz_residual(0, 1).is_zero());
    }

    #[test]
    fn box_coordinates_round_trip() {
        let bx = DerivationBox {
            n_src: 2,
            n_tgt: 4,
            deg_partial: 2,
            deg_lambda: 3,
        };
        for col in 0..bx.ncols() {
            let (i, k, a, b) = bx.decode(col);
            assert_eq!(bx.col(i, k, a, b), col);
        }
        let d = ConformalDerivation::inner(&p(2), LambdaElement::generator(1));
        let x = bx.vector_of(&d).unwrap();
        let images = bx.images_of(&x);
        for i in 0..=2 {
            assert_eq!(images.get(&i).cloned().unwrap_or_default(), d.image(i));
        }
    }

    #[test]
    fn certificates() {
        let d = ConformalDerivation::outer_dp(&p(-1)).unwrap();
        match non_innerness_certificate(&d, 4, 2).unwrap() {
            Innerness::NonInner {
                obstruction,
                inner_obstruction_vanishes,
                ..
            } => {
                assert!(inner_obstruction_vanishes);
                assert_eq!(obstruction[0], (0, "-1".to_string()));
            }
            other => panic!("unexpected {other:?}"),
        }
        let inner = ConformalDerivation::inner(&p(-1), LambdaElement::generator(0));
        match non_innerness_certificate(&inner, 4, 2).unwrap() {
            Innerness::Inner { witness } => assert_eq!(witness, LambdaElement::generator(0)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn hv_restriction() {
        assert_eq!(failures(&hv_restricted_leibniz(&p(-2)).unwrap()), 0);
    }

    #[test]
    fn small_classification() {
        let params = p(-1);
        let bx = DerivationBox {
            n_src: 3,
            n_tgt: default_n_tgt(&params, 3).unwrap(),
            deg_partial: 2,
            deg_lambda: 2,
        };
        let r = classify(&params, &bx).unwrap();
        assert!(r.outer_found, "{r:?}");
        assert_eq!(r.dim_quotient, 1, "{r:?}");
    }
}
