use thiserror::Error;

use crate::poly::Var;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("p must be nonzero")]
    ZeroP,

    #[error("{what} needs a concrete rational p, got formal p")]
    FormalP { what: &'static str },

    #[error("{what} needs p to be a negative integer, got p = {p}")]
    NotNegativeInteger { what: &'static str, p: String },

    #[error("{what} needs 2p to be a negative integer, got p = {p}")]
    NotHalfNegativeInteger { what: &'static str, p: String },

    #[error("{what} needs p = -1, got p = {p}")]
    NotMinusOne { what: &'static str, p: String },

    #[error("{var} is not a parameter variable")]
    NotAParameter { var: Var },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("subspace is not contained in the ambient space (basis vector {index} is outside)")]
    NotASubspace { index: usize },

    #[error("value does not fit the truncation: {0}")]
    OutOfBounds(String),

    #[error("invalid coefficient module: {0}")]
    InvalidModule(String),

    #[error("could not parse rational number {0:?}")]
    ParseRational(String),

    #[error("not a 2-cocycle: {0}")]
    NotACocycle(String),

    #[error("skew-symmetry violated at pair ({i}, {j})")]
    SkewViolation { i: usize, j: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
