use std::fmt;

use serde::Serialize;

use crate::conformal::{AlgebraParams, GenIndex};
use crate::error::{Error, Result};
use crate::poly::{v, Poly, Var};
use crate::rat::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModuleKind {
    Trivial,
    MDeltaAlpha,
    MDeltaAlphaBeta,
}

impl fmt::Display for ModuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModuleKind::Trivial => "trivial",
            ModuleKind::MDeltaAlpha => "m-delta-alpha",
            ModuleKind::MDeltaAlphaBeta => "m-delta-alpha-beta",
        })
    }
}

/// A module parameter Δ, α or β: a rational or its formal symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModuleParam {
    Formal,
    Rational(Rat),
}

impl ModuleParam {
    fn to_poly(&self, var: Var) -> Poly {
        match self {
            ModuleParam::Formal => v(var),
            ModuleParam::Rational(q) => Poly::constant(q.clone()),
        }
    }

    pub fn rational(&self) -> Option<&Rat> {
        match self {
            ModuleParam::Formal => None,
            ModuleParam::Rational(q) => Some(q),
        }
    }
}

impl fmt::Display for ModuleParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModuleParam::Formal => f.write_str("formal"),
            ModuleParam::Rational(q) => write!(f, "{q}"),
        }
    }
}

impl Serialize for ModuleParam {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Free rank-one module `ℂ[∂]v` (or the trivial module `ℂ`), described by the
/// action polynomials `L_i λ v = A_i(∂, λ) v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankOneModule {
    kind: ModuleKind,
    delta: ModuleParam,
    alpha: ModuleParam,
    beta: ModuleParam,
    params: AlgebraParams,
}

impl RankOneModule {
    pub fn trivial(params: &AlgebraParams) -> Self {
        RankOneModule {
            kind: ModuleKind::Trivial,
            delta: ModuleParam::Rational(Rat::default()),
            alpha: ModuleParam::Rational(Rat::default()),
            beta: ModuleParam::Rational(Rat::default()),
            params: params.clone(),
        }
    }

    /// `L₀ λ v = p(∂+Δλ+α)v`, all other generators act by zero.
    pub fn m_delta_alpha(params: &AlgebraParams, delta: ModuleParam, alpha: ModuleParam) -> Self {
        RankOneModule {
            kind: ModuleKind::MDeltaAlpha,
            delta,
            alpha,
            beta: ModuleParam::Rational(Rat::default()),
            params: params.clone(),
        }
    }

    /// `L₀ λ w = −(∂+Δλ+α)w`, `L₁ λ w = βw`; only for `p = −1`.
    pub fn m_delta_alpha_beta(
        params: &AlgebraParams,
        delta: ModuleParam,
        alpha: ModuleParam,
        beta: ModuleParam,
    ) -> Result<Self> {
        if !params.is_minus_one() {
            return Err(Error::NotMinusOne {
                what: "the module M_{Δ,α,β}",
                p: params.to_string(),
            });
        }
        Ok(RankOneModule {
            kind: ModuleKind::MDeltaAlphaBeta,
            delta,
            alpha,
            beta,
            params: params.clone(),
        })
    }

    pub fn kind(&self) -> ModuleKind {
        self.kind
    }

    pub fn params(&self) -> &AlgebraParams {
        &self.params
    }

    pub fn delta(&self) -> &ModuleParam {
        &self.delta
    }

    pub fn alpha(&self) -> &ModuleParam {
        &self.alpha
    }

    pub fn beta(&self) -> &ModuleParam {
        &self.beta
    }

    pub fn is_trivial(&self) -> bool {
        self.kind == ModuleKind::Trivial
    }

    /// `∂^M` as a polynomial: `∂`, or `0` on the trivial module.
    pub fn partial(&self) -> Poly {
        if self.is_trivial() {
            Poly::zero()
        } else {
            v(Var::Partial)
        }
    }

    /// `A_i(∂, x)` with the bracket parameter `x`.
    pub fn action_poly(&self, i: GenIndex, x: &Poly) -> Poly {
        let d = v(Var::Partial);
        let weight = || &(&d + &(&self.delta.to_poly(Var::Delta) * x)) + &self.alpha.to_poly(Var::Alpha);
        match (self.kind, i) {
            (ModuleKind::MDeltaAlpha, 0) => &self.params.p_poly() * &weight(),
            (ModuleKind::MDeltaAlphaBeta, 0) => -weight(),
            (ModuleKind::MDeltaAlphaBeta, 1) => self.beta.to_poly(Var::Beta),
            _ => Poly::zero(),
        }
    }

    /// Largest generator index acting non-trivially.
    pub fn action_support(&self) -> Option<GenIndex> {
        match self.kind {
            ModuleKind::Trivial => None,
            ModuleKind::MDeltaAlpha => Some(0),
            ModuleKind::MDeltaAlphaBeta => Some(1),
        }
    }
}

/// `L_i x (m(∂) v) = m(∂+x) A_i(∂, x) v`.
pub fn module_action(module: &RankOneModule, i: GenIndex, m: &Poly, x: &Poly) -> Poly {
    if module.is_trivial() {
        return Poly::zero();
    }
    &m.translate(Var::Partial, x) * &module.action_poly(i, x)
}

/// `L_i λ (L_j μ v) − L_j μ (L_i λ v) − [L_i λ L_j]_{λ+μ} v`.
pub fn check_module_axioms(module: &RankOneModule, i: GenIndex, j: GenIndex) -> Poly {
    if module.is_trivial() {
        return Poly::zero();
    }
    let (lam, mu) = (v(Var::Lambda), v(Var::Mu));
    let one = Poly::one();
    let first = module_action(module, i, &module_action(module, j, &one, &mu), &lam);
    let second = module_action(module, j, &module_action(module, i, &one, &lam), &mu);
    // (∂a)_θ v = −θ a_θ v turns (i+p)∂ into −(i+p)(λ+μ)
    let params = module.params();
    let coeff = &(&params.affine(j as i64, 1) * &lam) - &(&params.affine(i as i64, 1) * &mu);
    let third = &coeff * &module_action(module, i + j, &one, &(&lam + &mu));
    &(&first - &second) - &third
}
