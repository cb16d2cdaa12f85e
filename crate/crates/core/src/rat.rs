//! Exact rational scalars.
//!
//! `BigRational` already keeps every value in lowest terms with a positive
//! denominator, so it is used directly as the scalar field.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rat = num_rational::BigRational;

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn frac(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"a"`, `"-a"` or `"a/b"`.
pub fn parse(s: &str) -> Result<Rat> {
    let err = || Error::ParseRational(s.to_string());
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| err())?;
    let den: BigInt = den.parse().map_err(|_| err())?;
    if den.is_zero() {
        return Err(err());
    }
    Ok(Rat::new(num, den))
}

pub fn is_integer(q: &Rat) -> bool {
    q.denom().is_one()
}

/// `Some(n)` when `q` is an integer that fits in `i64`.
pub fn to_i64(q: &Rat) -> Option<i64> {
    if is_integer(q) {
        q.numer().to_i64()
    } else {
        None
    }
}

pub fn is_negative_integer(q: &Rat) -> bool {
    is_integer(q) && q.is_negative()
}

/// Least common multiple of the denominators.
pub fn denominator_lcm<'a>(values: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

pub fn binomial(n: u64, k: u64) -> Rat {
    if k > n {
        return Rat::zero();
    }
    let mut acc = BigInt::one();
    for t in 0..k {
        acc = acc * BigInt::from(n - t) / BigInt::from(t + 1);
    }
    Rat::from_integer(acc)
}

pub fn factorial(n: u64) -> Rat {
    Rat::from_integer((1..=n).fold(BigInt::one(), |acc, t| acc * BigInt::from(t)))
}
