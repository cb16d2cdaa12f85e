//! Exact multivariate polynomials over ℚ in a fixed nine-letter alphabet.
//!
//! The alphabet holds the bracket variables ∂, λ, μ, γ, the reserved
//! substitution variable ν, and the formal parameters p, Δ, α, β. Monomials
//! are dense exponent vectors; the zero polynomial is the empty term map and
//! no zero coefficient is ever stored.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rat::{self, Rat};

pub const NVARS: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Partial,
    Lambda,
    Mu,
    Gamma,
    Nu,
    P,
    Delta,
    Alpha,
    Beta,
}

impl Var {
    pub const ALL: [Var; NVARS] = [
        Var::Partial,
        Var::Lambda,
        Var::Mu,
        Var::Gamma,
        Var::Nu,
        Var::P,
        Var::Delta,
        Var::Alpha,
        Var::Beta,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Var::Partial => "∂",
            Var::Lambda => "λ",
            Var::Mu => "μ",
            Var::Gamma => "γ",
            Var::Nu => "ν",
            Var::P => "p",
            Var::Delta => "Δ",
            Var::Alpha => "α",
            Var::Beta => "β",
        }
    }

    pub fn is_parameter(self) -> bool {
        matches!(self, Var::P | Var::Delta | Var::Alpha | Var::Beta)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Exponent vector, ordered graded-lexicographically with ∂ the most
/// significant variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial([u8; NVARS]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0; NVARS]);

    pub fn var(v: Var, e: u8) -> Self {
        let mut m = Self::ONE;
        m.0[v.index()] = e;
        m
    }

    pub fn from_exponents(exps: [u8; NVARS]) -> Self {
        Monomial(exps)
    }

    pub fn exponent(&self, v: Var) -> u8 {
        self.0[v.index()]
    }

    pub fn exponents(&self) -> &[u8; NVARS] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn with_exponent(mut self, v: Var, e: u8) -> Self {
        self.0[v.index()] = e;
        self
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = [0u8; NVARS];
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = self.0[k]
                .checked_add(other.0[k])
                .expect("monomial exponent overflow");
        }
        Monomial(out)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in Var::ALL {
            let e = self.exponent(v);
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rat>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Self::term(Monomial::ONE, c)
    }

    pub fn int(n: i64) -> Self {
        Self::constant(rat::int(n))
    }

    pub fn var(v: Var) -> Self {
        Self::term(Monomial::var(v, 1), Rat::one())
    }

    pub fn term(m: Monomial, c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    /// Builds from arbitrary `(monomial, coefficient)` pairs, merging repeats.
    pub fn from_terms(it: impl IntoIterator<Item = (Monomial, Rat)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| *m == Monomial::ONE)
    }

    pub fn constant_term(&self) -> Rat {
        self.coeff(&Monomial::ONE)
    }

    pub fn coeff(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.exponent(v) > 0)
    }

    pub fn vars(&self) -> Vec<Var> {
        Var::ALL.into_iter().filter(|&v| self.contains(v)).collect()
    }

    pub fn degree_in(&self, v: Var) -> Option<u32> {
        self.terms.keys().map(|m| m.exponent(v) as u32).max()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Coefficient of `v^k`, as a polynomial in the remaining variables.
    pub fn coefficient_of(&self, v: Var, k: u8) -> Poly {
        Poly::from_terms(
            self.terms
                .iter()
                .filter(|(m, _)| m.exponent(v) == k)
                .map(|(m, c)| (m.with_exponent(v, 0), c.clone())),
        )
    }

    /// Simultaneous substitution `v ↦ r` for every listed pair. Variables
    /// on the right-hand sides are never re-substituted.
    pub fn compose(&self, assignments: &[(Var, &Poly)]) -> Poly {
        let mut out = Poly::zero();
        let mut powers: Vec<Vec<Poly>> = assignments.iter().map(|_| vec![Poly::one()]).collect();
        for (m, c) in &self.terms {
            let mut rest = *m;
            let mut factor = Poly::one();
            for (slot, (v, r)) in assignments.iter().enumerate() {
                let e = m.exponent(*v) as usize;
                if e == 0 {
                    continue;
                }
                rest = rest.with_exponent(*v, 0);
                let cache = &mut powers[slot];
                while cache.len() <= e {
                    let next = cache.last().unwrap() * *r;
                    cache.push(next);
                }
                factor = &factor * &cache[e];
            }
            for (fm, fc) in factor.terms {
                out.add_term(rest.mul(&fm), fc * c);
            }
        }
        out
    }

    /// Replaces every occurrence of `v` by `r` in one pass; occurrences of
    /// `v` inside `r` are left alone, so `λ ↦ −λ−∂` is fine.
    pub fn substitute(&self, v: Var, r: &Poly) -> Poly {
        self.compose(&[(v, r)])
    }

    /// `P(v) ↦ P(v + shift)`.
    pub fn translate(&self, v: Var, shift: &Poly) -> Poly {
        let target = &Poly::var(v) + shift;
        self.compose(&[(v, &target)])
    }

    /// Evaluates `v` at a constant.
    pub fn eval(&self, v: Var, q: &Rat) -> Poly {
        self.compose(&[(v, &Poly::constant(q.clone()))])
    }

    /// Specializes one of the formal parameters p, Δ, α, β.
    pub fn eval_param(&self, v: Var, q: &Rat) -> Result<Poly> {
        if !v.is_parameter() {
            return Err(Error::NotAParameter { var: v });
        }
        Ok(self.eval(v, q))
    }

    /// Formal derivative with respect to `v`.
    pub fn derivative(&self, v: Var) -> Poly {
        Poly::from_terms(self.terms.iter().filter_map(|(m, c)| {
            let e = m.exponent(v);
            (e > 0).then(|| (m.with_exponent(v, e - 1), c * rat::int(e as i64)))
        }))
    }
}

impl From<Rat> for Poly {
    fn from(c: Rat) -> Self {
        Poly::constant(c)
    }
}

impl From<Var> for Poly {
    fn from(v: Var) -> Self {
        Poly::var(v)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if *m == Monomial::ONE {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, c.clone());
        }
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, -c);
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly { (&self).$method(&rhs) }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly { (&self).$method(rhs) }
        }
        impl $tr<Poly> for &Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly { self.$method(&rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

/// Shorthand used throughout the crate: `v(Var::Lambda)`.
pub fn v(var: Var) -> Poly {
    Poly::var(var)
}

/// Shorthand for an integer constant polynomial.
pub fn c(n: i64) -> Poly {
    Poly::int(n)
}
