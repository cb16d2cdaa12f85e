//! The λ-bracket of 𝔅(p) and the checks of its conformal-algebra axioms.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{c, v, Poly, Var};
use crate::rat::{self, Rat};
use crate::report::CheckEntry;

/// Index of a generator `L_i`, `i ≥ 0`.
pub type GenIndex = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PValue {
    Formal,
    Rational(Rat),
}

/// The algebra parameter `p ≠ 0`, either a formal symbol or a rational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraParams {
    p: PValue,
}

impl AlgebraParams {
    pub fn formal() -> Self {
        AlgebraParams { p: PValue::Formal }
    }

    pub fn rational(p: Rat) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::ZeroP);
        }
        Ok(AlgebraParams {
            p: PValue::Rational(p),
        })
    }

    pub fn int(p: i64) -> Result<Self> {
        Self::rational(rat::int(p))
    }

    /// Parses `"formal"` or a rational literal.
    pub fn parse(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("formal") {
            Ok(Self::formal())
        } else {
            Self::rational(rat::parse(s)?)
        }
    }

    pub fn value(&self) -> &PValue {
        &self.p
    }

    pub fn is_formal(&self) -> bool {
        matches!(self.p, PValue::Formal)
    }

    pub fn rational_p(&self, what: &'static str) -> Result<&Rat> {
        match &self.p {
            PValue::Rational(q) => Ok(q),
            PValue::Formal => Err(Error::FormalP { what }),
        }
    }

    pub fn p_poly(&self) -> Poly {
        match &self.p {
            PValue::Formal => v(Var::P),
            PValue::Rational(q) => Poly::constant(q.clone()),
        }
    }

    /// `n + k·p` as a polynomial.
    pub fn affine(&self, n: i64, k: i64) -> Poly {
        &c(n) + &(&c(k) * &self.p_poly())
    }

    /// `p ∈ ℤ⁻`; false for formal p.
    pub fn is_neg_int(&self) -> bool {
        matches!(&self.p, PValue::Rational(q) if rat::is_negative_integer(q))
    }

    /// `2p ∈ ℤ⁻`.
    pub fn is_2p_neg_int(&self) -> bool {
        matches!(&self.p, PValue::Rational(q) if rat::is_negative_integer(&(q * rat::int(2))))
    }

    pub fn is_minus_one(&self) -> bool {
        matches!(&self.p, PValue::Rational(q) if *q == rat::int(-1))
    }

    /// The generator index `−p`, available when `p ∈ ℤ⁻`.
    pub fn neg_p_index(&self, what: &'static str) -> Result<GenIndex> {
        let q = self.rational_p(what)?;
        if !rat::is_negative_integer(q) {
            return Err(Error::NotNegativeInteger {
                what,
                p: q.to_string(),
            });
        }
        Ok(usize::try_from(-rat::to_i64(q).expect("small integer")).expect("positive"))
    }

    /// The generator index `−2p`, available when `2p ∈ ℤ⁻`.
    pub fn neg_2p_index(&self, what: &'static str) -> Result<GenIndex> {
        let q = self.rational_p(what)?;
        let two_p = q * rat::int(2);
        if !rat::is_negative_integer(&two_p) {
            return Err(Error::NotHalfNegativeInteger {
                what,
                p: q.to_string(),
            });
        }
        Ok(usize::try_from(-rat::to_i64(&two_p).expect("small integer")).expect("positive"))
    }

    /// Evaluates a polynomial in formal p at this parameter; identity when formal.
    pub fn specialize(&self, poly: &Poly) -> Poly {
        match &self.p {
            PValue::Formal => poly.clone(),
            PValue::Rational(q) => poly.eval(Var::P, q),
        }
    }

    pub fn specialize_element(&self, e: &LambdaElement) -> LambdaElement {
        e.map(|f| self.specialize(f))
    }
}

impl fmt::Display for AlgebraParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.p {
            PValue::Formal => f.write_str("formal"),
            PValue::Rational(q) => write!(f, "{q}"),
        }
    }
}

impl Serialize for AlgebraParams {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A finite sum `Σ f_i · L_i` with polynomial coefficients; elements of
/// `𝔅(p)` itself are the case where every `f_i` only involves ∂.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LambdaElement {
    components: BTreeMap<GenIndex, Poly>,
}

impl LambdaElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn generator(i: GenIndex) -> Self {
        Self::single(i, Poly::one())
    }

    pub fn single(i: GenIndex, coeff: Poly) -> Self {
        let mut e = Self::zero();
        e.add_component(i, &coeff);
        e
    }

    pub fn from_components(it: impl IntoIterator<Item = (GenIndex, Poly)>) -> Self {
        let mut e = Self::zero();
        for (i, f) in it {
            e.add_component(i, &f);
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn component(&self, i: GenIndex) -> Poly {
        self.components.get(&i).cloned().unwrap_or_default()
    }

    pub fn components(&self) -> impl Iterator<Item = (GenIndex, &Poly)> {
        self.components.iter().map(|(&i, f)| (i, f))
    }

    pub fn support(&self) -> Vec<GenIndex> {
        self.components.keys().copied().collect()
    }

    pub fn add_component(&mut self, i: GenIndex, f: &Poly) {
        if f.is_zero() {
            return;
        }
        let slot = self.components.entry(i).or_default();
        *slot += f;
        if slot.is_zero() {
            self.components.remove(&i);
        }
    }

    /// Multiplies every coefficient by `f`.
    pub fn scale(&self, f: &Poly) -> Self {
        self.map(|g| g * f)
    }

    pub fn map(&self, mut op: impl FnMut(&Poly) -> Poly) -> Self {
        Self::from_components(self.components.iter().map(|(&i, g)| (i, op(g))))
    }

    pub fn substitute(&self, var: Var, r: &Poly) -> Self {
        self.map(|g| g.substitute(var, r))
    }

    /// True when every coefficient only uses variables from `allowed`.
    pub fn uses_only(&self, allowed: &[Var]) -> bool {
        self.components
            .values()
            .all(|f| f.vars().iter().all(|x| allowed.contains(x)))
    }
}

impl fmt::Display for LambdaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (i, g)) in self.components.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({g})·L{i}")?;
        }
        Ok(())
    }
}

impl Serialize for LambdaElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Add<&LambdaElement> for &LambdaElement {
    type Output = LambdaElement;
    fn add(self, rhs: &LambdaElement) -> LambdaElement {
        let mut out = self.clone();
        for (&i, f) in &rhs.components {
            out.add_component(i, f);
        }
        out
    }
}

impl Sub<&LambdaElement> for &LambdaElement {
    type Output = LambdaElement;
    fn sub(self, rhs: &LambdaElement) -> LambdaElement {
        let mut out = self.clone();
        for (&i, f) in &rhs.components {
            out.add_component(i, &-f);
        }
        out
    }
}

impl Neg for &LambdaElement {
    type Output = LambdaElement;
    fn neg(self) -> LambdaElement {
        self.map(|g| -g)
    }
}

impl Add for LambdaElement {
    type Output = LambdaElement;
    fn add(self, rhs: LambdaElement) -> LambdaElement {
        &self + &rhs
    }
}

impl Sub for LambdaElement {
    type Output = LambdaElement;
    fn sub(self, rhs: LambdaElement) -> LambdaElement {
        &self - &rhs
    }
}

/// `𝔅(p)` with its λ-bracket.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockAlgebra {
    params: AlgebraParams,
}

impl BlockAlgebra {
    pub fn new(params: AlgebraParams) -> Self {
        BlockAlgebra { params }
    }

    pub fn params(&self) -> &AlgebraParams {
        &self.params
    }

    /// `((i+p)∂ + (i+j+2p)x) L_{i+j}` with `x` the bracket parameter.
    pub fn bracket_gen(&self, i: GenIndex, j: GenIndex, x: &Poly) -> LambdaElement {
        let d = v(Var::Partial);
        let coeff = &(&self.params.affine(i as i64, 1) * &d)
            + &(&self.params.affine((i + j) as i64, 2) * x);
        LambdaElement::single(i + j, coeff)
    }

    /// `bracket_gen` in one of the atomic bracket variables λ, μ, γ.
    pub fn bracket_gen_var(&self, i: GenIndex, j: GenIndex, var: Var) -> LambdaElement {
        debug_assert!(matches!(var, Var::Lambda | Var::Mu | Var::Gamma));
        self.bracket_gen(i, j, &v(var))
    }

    /// `[x_θ y]` for elements with ∂-polynomial coefficients, extended by
    /// sesquilinearity: `[f(∂)L_i θ g(∂)L_j] = f(−θ) g(∂+θ) [L_i θ L_j]`.
    /// Coefficients may carry other bracket variables; `θ` may not contain ∂.
    pub fn bracket(&self, x: &LambdaElement, y: &LambdaElement, theta: &Poly) -> LambdaElement {
        debug_assert!(!theta.contains(Var::Partial), "bracket parameter contains ∂");
        let minus_theta = -theta;
        let mut out = LambdaElement::zero();
        for (i, f) in x.components() {
            let f_at = f.substitute(Var::Partial, &minus_theta);
            for (j, g) in y.components() {
                let g_at = g.translate(Var::Partial, theta);
                let factor = &f_at * &g_at;
                let base = self.bracket_gen(i, j, theta);
                for (k, h) in base.components() {
                    out.add_component(k, &(&factor * h));
                }
            }
        }
        out
    }

    /// `[L_i λ L_j] + [L_j λ L_i]|_{λ ↦ −λ−∂}`; zero for a skew bracket.
    pub fn skew_residual(&self, i: GenIndex, j: GenIndex) -> LambdaElement {
        let lam = v(Var::Lambda);
        let flip = -&lam - v(Var::Partial);
        &self.bracket_gen(i, j, &lam) + &self.bracket_gen(j, i, &lam).substitute(Var::Lambda, &flip)
    }

    /// `[L_i λ [L_j μ L_k]] − [[L_i λ L_j]_{λ+μ} L_k] − [L_j μ [L_i λ L_k]]`.
    pub fn jacobi_residual(&self, i: GenIndex, j: GenIndex, k: GenIndex) -> LambdaElement {
        let (lam, mu) = (v(Var::Lambda), v(Var::Mu));
        let lm = &lam + &mu;
        let (li, lj, lk) = (
            LambdaElement::generator(i),
            LambdaElement::generator(j),
            LambdaElement::generator(k),
        );
        let lhs = self.bracket(&li, &self.bracket(&lj, &lk, &mu), &lam);
        let t1 = self.bracket(&self.bracket(&li, &lj, &lam), &lk, &lm);
        let t2 = self.bracket(&lj, &self.bracket(&li, &lk, &lam), &mu);
        &(&lhs - &t1) - &t2
    }

    /// Skew residuals over the box `0 ≤ i, j ≤ n`, sorted by index.
    pub fn skew_grid(&self, n: GenIndex) -> Vec<CheckEntry> {
        let pairs: Vec<(usize, usize)> = (0..=n).flat_map(|i| (0..=n).map(move |j| (i, j))).collect();
        pairs
            .into_par_iter()
            .map(|(i, j)| CheckEntry::from_element(vec![i, j], &self.skew_residual(i, j)))
            .collect()
    }

    /// Jacobi residuals over the box `0 ≤ i, j, k ≤ n`, sorted by index.
    pub fn jacobi_grid(&self, n: GenIndex) -> Vec<CheckEntry> {
        let triples: Vec<(usize, usize, usize)> = (0..=n)
            .flat_map(|i| (0..=n).flat_map(move |j| (0..=n).map(move |k| (i, j, k))))
            .collect();
        triples
            .into_par_iter()
            .map(|(i, j, k)| CheckEntry::from_element(vec![i, j, k], &self.jacobi_residual(i, j, k)))
            .collect()
    }

    /// Residual of `[x λ x] = (∂+2λ)x` for `x = p⁻¹L₀`. With formal p the
    /// identity is multiplied through by `p²`, i.e. `[L₀ λ L₀] − p(∂+2λ)L₀`.
    pub fn virasoro_residual(&self) -> LambdaElement {
        let lam = v(Var::Lambda);
        let vir = &v(Var::Partial) + &(&c(2) * &lam);
        match self.params.value() {
            PValue::Formal => {
                let l0 = LambdaElement::generator(0);
                &self.bracket(&l0, &l0, &lam) - &l0.scale(&(&self.params.p_poly() * &vir))
            }
            PValue::Rational(q) => {
                let x = LambdaElement::single(0, Poly::constant(q.recip()));
                &self.bracket(&x, &x, &lam) - &x.scale(&vir)
            }
        }
    }

    /// Brackets among `{p⁻¹L₀, L_{−p}}` for `p ∈ ℤ⁻`.
    pub fn heisenberg_virasoro(&self) -> Result<HeisenbergVirasoro> {
        let n = self.params.neg_p_index("Heisenberg-Virasoro subalgebra")?;
        let q = self.params.rational_p("Heisenberg-Virasoro subalgebra")?;
        let lam = v(Var::Lambda);
        let x = LambdaElement::single(0, Poly::constant(q.recip()));
        let y = LambdaElement::generator(n);
        let gens = [("p^-1 L0", &x), ("L_-p", &y)];
        let mut brackets = Vec::new();
        let mut closed = true;
        for (na, a) in gens {
            for (nb, b) in gens {
                let value = self.bracket(a, b, &lam);
                let inside = value.support().iter().all(|&k| k == 0 || k == n)
                    && value.uses_only(&[Var::Partial, Var::Lambda]);
                closed &= inside;
                brackets.push(HvBracket {
                    left: na,
                    right: nb,
                    value,
                    in_span: inside,
                });
            }
        }
        let top = self.bracket_gen(n, n, &lam);
        Ok(HeisenbergVirasoro {
            neg_p: n,
            closed,
            top_bracket_vanishes: top.is_zero(),
            brackets,
        })
    }

    /// Structural audit: the bracket of two generators sits at `i+j` and is
    /// affine in each of ∂ and λ.
    pub fn degree_audit(&self, i: GenIndex, j: GenIndex) -> bool {
        let b = self.bracket_gen_var(i, j, Var::Lambda);
        b.support().iter().all(|&k| k == i + j)
            && b.components().all(|(_, f)| {
                f.degree_in(Var::Partial).unwrap_or(0) <= 1 && f.degree_in(Var::Lambda).unwrap_or(0) <= 1
            })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HvBracket {
    pub left: &'static str,
    pub right: &'static str,
    pub value: LambdaElement,
    pub in_span: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct HeisenbergVirasoro {
    pub neg_p: GenIndex,
    pub closed: bool,
    pub top_bracket_vanishes: bool,
    pub brackets: Vec<HvBracket>,
}

impl HeisenbergVirasoro {
    pub fn ok(&self) -> bool {
        self.closed && self.top_bracket_vanishes
    }
}
