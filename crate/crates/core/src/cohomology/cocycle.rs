use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::conformal::{AlgebraParams, GenIndex};
use crate::error::{Error, Result};
use crate::poly::{v, Monomial, Poly, Var};
use crate::rat::{self, Rat};
use crate::report::CheckEntry;

use super::module::{module_action, RankOneModule};

/// A 2-λ-bracket on generators, stored on pairs `i ≤ j`; the other half is
/// fixed by skew-symmetry `c(j,i)(∂,λ) = −c(i,j)(∂,−λ−∂^M)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoCocycle {
    module: RankOneModule,
    upper: BTreeMap<(GenIndex, GenIndex), Poly>,
}

impl TwoCocycle {
    pub fn zero(module: &RankOneModule) -> Self {
        TwoCocycle {
            module: module.clone(),
            upper: BTreeMap::new(),
        }
    }

    /// From values on pairs `i ≤ j`; diagonal values must already be skew.
    pub fn from_upper(
        module: &RankOneModule,
        values: impl IntoIterator<Item = ((GenIndex, GenIndex), Poly)>,
    ) -> Result<Self> {
        let mut c = Self::zero(module);
        for ((i, j), f) in values {
            if i > j {
                return Err(Error::OutOfBounds(format!("pair ({i}, {j}) is not in upper form")));
            }
            c.insert_raw(i, j, f);
        }
        for (&(i, j), f) in &c.upper {
            if i == j && *f != c.flip(f) {
                return Err(Error::SkewViolation { i, j });
            }
        }
        Ok(c)
    }

    /// From values on both orders of each pair, checking skew-symmetry.
    pub fn from_table(
        module: &RankOneModule,
        values: &BTreeMap<(GenIndex, GenIndex), Poly>,
    ) -> Result<Self> {
        let upper = values.iter().filter(|((i, j), _)| i <= j).map(|(&k, f)| (k, f.clone()));
        let c = Self::from_upper(module, upper)?;
        for (&(i, j), f) in values {
            if i > j && *f != c.value(i, j) {
                return Err(Error::SkewViolation { i, j });
            }
        }
        for (&(i, j), _) in c.upper.iter().filter(|((i, j), _)| i < j) {
            if !values.contains_key(&(j, i)) && !c.value(j, i).is_zero() {
                return Err(Error::SkewViolation { i: j, j: i });
            }
        }
        Ok(c)
    }

    pub(crate) fn insert_raw(&mut self, i: GenIndex, j: GenIndex, f: Poly) {
        debug_assert!(i <= j);
        if f.is_zero() {
            self.upper.remove(&(i, j));
        } else {
            self.upper.insert((i, j), f);
        }
    }

    pub fn module(&self) -> &RankOneModule {
        &self.module
    }

    pub fn params(&self) -> &AlgebraParams {
        self.module.params()
    }

    pub fn is_zero(&self) -> bool {
        self.upper.is_empty()
    }

    pub fn upper(&self) -> impl Iterator<Item = ((GenIndex, GenIndex), &Poly)> {
        self.upper.iter().map(|(&k, f)| (k, f))
    }

    /// `f(∂, λ) ↦ −f(∂, −λ−∂^M)`.
    fn flip(&self, f: &Poly) -> Poly {
        let lam = v(Var::Lambda);
        -f.substitute(Var::Lambda, &(-&lam - &self.module.partial()))
    }

    /// `{L_i λ L_j}` as the coefficient of the module generator.
    pub fn value(&self, i: GenIndex, j: GenIndex) -> Poly {
        if i <= j {
            self.upper.get(&(i, j)).cloned().unwrap_or_default()
        } else {
            self.upper.get(&(j, i)).map(|f| self.flip(f)).unwrap_or_default()
        }
    }

    pub fn sub(&self, other: &TwoCocycle) -> TwoCocycle {
        let mut out = self.clone();
        for (&(i, j), f) in &other.upper {
            let cur = out.value(i, j);
            out.insert_raw(i, j, &cur - f);
        }
        out
    }

    pub fn scale(&self, q: &Rat) -> TwoCocycle {
        let mut out = Self::zero(&self.module);
        for (&(i, j), f) in &self.upper {
            out.insert_raw(i, j, f.scale(q));
        }
        out
    }

    /// Values on pairs `i ≤ j` with `i + j ≤ n`, keyed `"i,j"`.
    pub fn table(&self, n: usize) -> BTreeMap<String, String> {
        self.upper
            .iter()
            .filter(|((i, j), _)| i + j <= n)
            .map(|((i, j), f)| (format!("{i},{j}"), f.to_string()))
            .collect()
    }
}

impl fmt::Display for TwoCocycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, ((i, j), g)) in self.upper.iter().enumerate() {
            if k > 0 {
                f.write_str("; ")?;
            }
            write!(f, "({i},{j}) ↦ {g}")?;
        }
        Ok(())
    }
}

/// `φ(L_i) = φ_i(∂)·v`; constants for the trivial module.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CochainMap {
    values: BTreeMap<GenIndex, Poly>,
}

impl CochainMap {
    pub fn new(values: impl IntoIterator<Item = (GenIndex, Poly)>) -> Self {
        CochainMap {
            values: values.into_iter().filter(|(_, f)| !f.is_zero()).collect(),
        }
    }

    pub fn get(&self, i: GenIndex) -> Poly {
        self.values.get(&i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_index(&self) -> Option<GenIndex> {
        self.values.keys().next_back().copied()
    }

    pub fn values(&self) -> impl Iterator<Item = (GenIndex, &Poly)> {
        self.values.iter().map(|(&i, f)| (i, f))
    }

    /// Random map with support `≤ max_index`, ∂-degree `≤ deg` and small
    /// integer coefficients.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, max_index: GenIndex, deg: u8) -> Self {
        Self::new((0..=max_index).map(|i| {
            let f = Poly::from_terms(
                (0..=deg).map(|e| (Monomial::var(Var::Partial, e), rat::int(rng.gen_range(-5..=5)))),
            );
            (i, f)
        }))
    }
}

impl Serialize for CochainMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(self.values.len()))?;
        for (i, f) in &self.values {
            m.serialize_entry(&format!("L{i}"), &f.to_string())?;
        }
        m.end()
    }
}

/// `((i+p)∂ + (i+j+2p)x)` with the algebra's `∂` replaced by `shift + ∂^M`,
/// as produced by `{y_x f(∂)L} = f(x+∂^M){y_x L}` and `φ(f(∂)L) = f(∂^M)φ(L)`.
fn bracket_coeff(module: &RankOneModule, i: GenIndex, j: GenIndex, x: &Poly, shift: &Poly) -> Poly {
    let params = module.params();
    let d = shift + &module.partial();
    &(&params.affine(i as i64, 1) * &d) + &(&params.affine((i + j) as i64, 2) * x)
}

/// `−λ−μ−∂^M`, the parameter at which `z` acts in the differential.
fn z_param(module: &RankOneModule) -> Poly {
    -&(&(&v(Var::Lambda) + &v(Var::Mu)) + &module.partial())
}

/// The differential `dc` at `(L_i, L_j, L_k)`:
/// `a_λ{b_μ z} − b_μ{a_λ z} + z_{−λ−μ−∂}{a_λ b} + {a_λ[b_μ z]} − {b_μ[a_λ z]} + {z_{−λ−μ−∂}[a_λ b]}`.
pub fn cocycle_residual(c: &TwoCocycle, i: GenIndex, j: GenIndex, k: GenIndex) -> Poly {
    let module = c.module();
    let (lam, mu, nu) = (v(Var::Lambda), v(Var::Mu), v(Var::Nu));
    let zp = z_param(module);
    let at_mu = |f: Poly| f.substitute(Var::Lambda, &mu);

    let mut total = Poly::zero();
    if !module.is_trivial() {
        total += &module_action(module, i, &at_mu(c.value(j, k)), &lam);
        total -= &module_action(module, j, &c.value(i, k), &mu);
        let t3 = module_action(module, k, &c.value(i, j), &nu);
        total += &t3.substitute(Var::Nu, &zp);
    }
    let inner_jk = bracket_coeff(module, j, k, &mu, &lam);
    total += &(&inner_jk * &c.value(i, j + k));
    let inner_ik = bracket_coeff(module, i, k, &lam, &mu);
    total -= &(&inner_ik * &at_mu(c.value(j, i + k)));
    let inner_ij = bracket_coeff(module, i, j, &lam, &nu);
    let t6 = &inner_ij * &c.value(k, i + j).substitute(Var::Lambda, &nu);
    total += &t6.substitute(Var::Nu, &zp);

    if module.is_trivial() {
        total = total.eval(Var::Partial, &Rat::zero());
    }
    total
}

/// `{a_λ b}_{dφ} = a_λ φ(b) − b_{−λ−∂^M} φ(a) − φ([a_λ b])` on every pair
/// where it can be nonzero.
pub fn coboundary(phi: &CochainMap, module: &RankOneModule) -> TwoCocycle {
    let mut out = TwoCocycle::zero(module);
    let Some(top) = phi.max_index() else {
        return out;
    };
    for i in 0..=top {
        for j in i..=top {
            out.insert_raw(i, j, coboundary_value(phi, module, i, j));
        }
    }
    out
}

pub fn coboundary_value(phi: &CochainMap, module: &RankOneModule, i: GenIndex, j: GenIndex) -> Poly {
    let (lam, nu) = (v(Var::Lambda), v(Var::Nu));
    let mut out = -&(&bracket_coeff(module, i, j, &lam, &Poly::zero()) * &phi.get(i + j));
    if !module.is_trivial() {
        out += &module_action(module, i, &phi.get(j), &lam);
        let back = module_action(module, j, &phi.get(i), &nu);
        out -= &back.substitute(Var::Nu, &(-&lam - &module.partial()));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NamedCocycle {
    Alpha,
    Beta,
    BetaBar,
    BetaTilde,
}

impl NamedCocycle {
    pub const ALL: [NamedCocycle; 4] = [
        NamedCocycle::Alpha,
        NamedCocycle::Beta,
        NamedCocycle::BetaBar,
        NamedCocycle::BetaTilde,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NamedCocycle::Alpha => "alpha",
            NamedCocycle::Beta => "beta",
            NamedCocycle::BetaBar => "beta-bar",
            NamedCocycle::BetaTilde => "beta-tilde",
        }
    }

    /// Whether the class exists for this `p`.
    pub fn applies(self, params: &AlgebraParams) -> bool {
        match self {
            NamedCocycle::Alpha => true,
            NamedCocycle::Beta | NamedCocycle::BetaBar => params.is_2p_neg_int(),
            NamedCocycle::BetaTilde => params.is_minus_one(),
        }
    }
}

impl fmt::Display for NamedCocycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The classes `α`, `β`, `β̄`, `β̃` with trivial coefficients.
pub fn named_cocycle(which: NamedCocycle, params: &AlgebraParams) -> Result<TwoCocycle> {
    let module = RankOneModule::trivial(params);
    let lam = v(Var::Lambda);
    match which {
        NamedCocycle::Alpha => TwoCocycle::from_upper(&module, [((0, 0), lam.pow(3))]),
        NamedCocycle::Beta => {
            let n = params.neg_2p_index("the cocycle β")?;
            let values = (0..=n / 2).map(|i| ((i, n - i), params.affine((n - i) as i64, 1)));
            TwoCocycle::from_upper(&module, values)
        }
        NamedCocycle::BetaBar => {
            let n = params.neg_2p_index("the cocycle β̄")?;
            let minus_one = params.is_minus_one();
            let values = (0..=n / 2)
                .filter(|&i| !(minus_one && n - i == 1))
                .map(|i| ((i, n - i), lam.clone()));
            TwoCocycle::from_upper(&module, values)
        }
        NamedCocycle::BetaTilde => {
            if !params.is_minus_one() {
                return Err(Error::NotMinusOne {
                    what: "the cocycle β̃",
                    p: params.to_string(),
                });
            }
            TwoCocycle::from_upper(&module, [((1, 1), lam)])
        }
    }
}

/// Ordered triples with `i+j, j+k, i+k ≤ n`.
pub fn triples_pairwise(n: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for i in 0..=n {
        for j in 0..=n - i {
            for k in 0..=n - i.max(j) {
                out.push((i, j, k));
            }
        }
    }
    out
}

/// Ordered triples with `i+j+k ≤ n`.
pub fn triples_total(n: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for i in 0..=n {
        for j in 0..=n - i {
            for k in 0..=n - i - j {
                out.push((i, j, k));
            }
        }
    }
    out
}

pub fn residual_grid(c: &TwoCocycle, triples: &[(usize, usize, usize)]) -> Vec<CheckEntry> {
    triples
        .par_iter()
        .map(|&(i, j, k)| {
            let r = cocycle_residual(c, i, j, k);
            CheckEntry::from_display(vec![i, j, k], r.is_zero(), r)
        })
        .collect()
}
