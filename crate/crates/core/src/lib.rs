//! Exact symbolic computation for the Block-type Lie conformal algebras 𝔅(p).
//!
//! `𝔅(p)` is the free ℂ[∂]-module on generators `L_i` (`i ≥ 0`) with
//! λ-bracket `[L_i λ L_j] = ((i+p)∂ + (i+j+2p)λ) L_{i+j}`. This crate checks
//! its axioms, builds its annihilation algebra, and classifies conformal
//! derivations, biderivations and second cohomology on finite truncations,
//! all over exact rationals.

pub mod annihilation;
pub mod biderivations;
pub mod cohomology;
pub mod conformal;
pub mod derivations;
pub mod error;
pub mod linalg;
pub mod poly;
pub mod rat;
pub mod report;

pub use conformal::{AlgebraParams, BlockAlgebra, LambdaElement};
pub use error::{Error, Result};
pub use poly::{Poly, Var};
pub use rat::Rat;
