//! Conformal biderivations of `𝔅(p)` and their checkers.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::conformal::{AlgebraParams, BlockAlgebra, GenIndex, LambdaElement};
use crate::error::Result;
use crate::poly::{v, Poly, Var};
use crate::rat::Rat;
use crate::report::CheckEntry;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BiderivationKind {
    /// `d_λ(x, y) = c[x λ y]`.
    InnerC(Rat),
    /// `(1 − δ_{i+j,−p}) c[L_i λ L_j]`.
    Theorem2Family(Rat),
    /// Values on generator pairs; unlisted pairs are zero.
    Tabulated(BTreeMap<(GenIndex, GenIndex), LambdaElement>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Biderivation {
    kind: BiderivationKind,
    alg: BlockAlgebra,
    neg_p: Option<GenIndex>,
}

impl Biderivation {
    pub fn inner(c: Rat, params: &AlgebraParams) -> Self {
        Self::build(BiderivationKind::InnerC(c), params, None)
    }

    pub fn theorem2_family(c: Rat, params: &AlgebraParams) -> Result<Self> {
        let n = params.neg_p_index("the δ_{i+j,-p} biderivation family")?;
        Ok(Self::build(BiderivationKind::Theorem2Family(c), params, Some(n)))
    }

    pub fn tabulated(params: &AlgebraParams, values: BTreeMap<(GenIndex, GenIndex), LambdaElement>) -> Self {
        Self::build(BiderivationKind::Tabulated(values), params, None)
    }

    fn build(kind: BiderivationKind, params: &AlgebraParams, neg_p: Option<GenIndex>) -> Self {
        Biderivation {
            kind,
            alg: BlockAlgebra::new(params.clone()),
            neg_p,
        }
    }

    pub fn kind(&self) -> &BiderivationKind {
        &self.kind
    }

    /// `d_λ(L_i, L_j)`.
    pub fn value(&self, i: GenIndex, j: GenIndex) -> LambdaElement {
        let lam = v(Var::Lambda);
        match &self.kind {
            BiderivationKind::InnerC(c) => self.alg.bracket_gen(i, j, &lam).scale(&Poly::constant(c.clone())),
            BiderivationKind::Theorem2Family(c) => {
                if Some(i + j) == self.neg_p {
                    LambdaElement::zero()
                } else {
                    self.alg.bracket_gen(i, j, &lam).scale(&Poly::constant(c.clone()))
                }
            }
            BiderivationKind::Tabulated(values) => values.get(&(i, j)).cloned().unwrap_or_default(),
        }
    }

    /// `d_θ(x, y)` extended by `d_θ(f(∂)x, g(∂)y) = f(−θ) g(∂+θ) d_θ(x, y)`.
    pub fn eval(&self, x: &LambdaElement, y: &LambdaElement, theta: &Poly) -> LambdaElement {
        let minus_theta = -theta;
        let mut out = LambdaElement::zero();
        for (i, f) in x.components() {
            let f_at = f.substitute(Var::Partial, &minus_theta);
            for (j, g) in y.components() {
                let g_at = g.translate(Var::Partial, theta);
                let value = self.value(i, j).substitute(Var::Lambda, theta);
                out = &out + &value.scale(&(&f_at * &g_at));
            }
        }
        out
    }

    /// Residuals of `d_λ(∂L_i, L_j) = −λ d_λ(L_i, L_j)`,
    /// `d_λ(L_i, ∂L_j) = (∂+λ) d_λ(L_i, L_j)` and of skew-symmetry.
    pub fn bilinear_skew_residual(&self, i: GenIndex, j: GenIndex) -> BilinearSkewResidual {
        let (lam, d) = (v(Var::Lambda), v(Var::Partial));
        let (li, lj) = (LambdaElement::generator(i), LambdaElement::generator(j));
        let base = self.value(i, j);
        let left = &self.eval(&li.scale(&d), &lj, &lam) + &base.scale(&lam);
        let right = &self.eval(&li, &lj.scale(&d), &lam) - &base.scale(&(&d + &lam));
        let skew = &base + &self.value(j, i).substitute(Var::Lambda, &(-&lam - &d));
        BilinearSkewResidual {
            sesquilinear_left: left,
            sesquilinear_right: right,
            skew,
        }
    }

    /// `d_λ(x,[y μ z]) − [(d_λ(x,y))_{λ+μ} z] − [y μ d_λ(x,z)]` at `(L_i, L_j, L_k)`.
    pub fn biderivation_residual(&self, i: GenIndex, j: GenIndex, k: GenIndex) -> LambdaElement {
        let (lam, mu) = (v(Var::Lambda), v(Var::Mu));
        let (li, lj, lk) = (
            LambdaElement::generator(i),
            LambdaElement::generator(j),
            LambdaElement::generator(k),
        );
        let lhs = self.eval(&li, &self.alg.bracket(&lj, &lk, &mu), &lam);
        let t1 = self.alg.bracket(&self.value(i, j), &lk, &(&lam + &mu));
        let t2 = self.alg.bracket(&lj, &self.value(i, k), &mu);
        &(&lhs - &t1) - &t2
    }

    /// `[(d_μ(x,y))_{μ+γ} [u λ v]] − [[x μ y]_{μ+γ} d_λ(u,v)]` at `(L_i, L_j, L_m, L_n)`.
    pub fn bi01_residual(&self, i: GenIndex, j: GenIndex, m: GenIndex, n: GenIndex) -> LambdaElement {
        let (lam, mu, gamma) = (v(Var::Lambda), v(Var::Mu), v(Var::Gamma));
        let mg = &mu + &gamma;
        let d_mu = self.value(i, j).substitute(Var::Lambda, &mu);
        let uv = self.alg.bracket_gen(m, n, &lam);
        let xy = self.alg.bracket_gen(i, j, &mu);
        &self.alg.bracket(&d_mu, &uv, &mg) - &self.alg.bracket(&xy, &self.value(m, n), &mg)
    }

    pub fn bilinear_skew_grid(&self, n: GenIndex) -> Vec<CheckEntry> {
        pairs(n)
            .into_par_iter()
            .map(|(i, j)| {
                let r = self.bilinear_skew_residual(i, j);
                CheckEntry::from_display(vec![i, j], r.is_zero(), &r)
            })
            .collect()
    }

    pub fn biderivation_grid(&self, n: GenIndex) -> Vec<CheckEntry> {
        let triples: Vec<(usize, usize, usize)> = (0..=n)
            .flat_map(|i| (0..=n).flat_map(move |j| (0..=n).map(move |k| (i, j, k))))
            .collect();
        triples
            .into_par_iter()
            .map(|(i, j, k)| CheckEntry::from_element(vec![i, j, k], &self.biderivation_residual(i, j, k)))
            .collect()
    }

    pub fn bi01_grid(&self, n: GenIndex) -> Vec<CheckEntry> {
        let quads: Vec<[usize; 4]> = (0..=n)
            .flat_map(|i| {
                (0..=n).flat_map(move |j| (0..=n).flat_map(move |m| (0..=n).map(move |k| [i, j, m, k])))
            })
            .collect();
        quads
            .into_par_iter()
            .map(|[i, j, m, k]| CheckEntry::from_element(vec![i, j, m, k], &self.bi01_residual(i, j, m, k)))
            .collect()
    }
}

fn pairs(n: GenIndex) -> Vec<(usize, usize)> {
    (0..=n).flat_map(|i| (0..=n).map(move |j| (i, j))).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BilinearSkewResidual {
    pub sesquilinear_left: LambdaElement,
    pub sesquilinear_right: LambdaElement,
    pub skew: LambdaElement,
}

impl BilinearSkewResidual {
    pub fn is_zero(&self) -> bool {
        self.sesquilinear_left.is_zero() && self.sesquilinear_right.is_zero() && self.skew.is_zero()
    }
}

impl std::fmt::Display for BilinearSkewResidual {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "left: {}; right: {}; skew: {}",
            self.sesquilinear_left, self.sesquilinear_right, self.skew
        )
    }
}

/// One row of the `{p⁻¹L₀, L_{−p}}` value table.
#[derive(Debug, Clone, Serialize)]
pub struct HvRow {
    pub pair: (GenIndex, GenIndex),
    pub stated: LambdaElement,
    pub family: LambdaElement,
    pub matches: bool,
}

/// Compares the family with the stated values `d(L₀,L₀) = c[L₀ λ L₀]`,
/// `d(L₀,L_{−p}) = d(L_{−p},L_{−p}) = 0`.
pub fn hv_value_table(c: Rat, params: &AlgebraParams) -> Result<Vec<HvRow>> {
    let d = Biderivation::theorem2_family(c.clone(), params)?;
    let n = params.neg_p_index("Heisenberg-Virasoro value table")?;
    let alg = BlockAlgebra::new(params.clone());
    let stated_00 = alg.bracket_gen(0, 0, &v(Var::Lambda)).scale(&Poly::constant(c));
    Ok([((0, 0), stated_00), ((0, n), LambdaElement::zero()), ((n, n), LambdaElement::zero())]
        .into_iter()
        .map(|(pair, stated)| {
            let family = d.value(pair.0, pair.1);
            HvRow {
                pair,
                matches: family == stated,
                stated,
                family,
            }
        })
        .collect())
}
