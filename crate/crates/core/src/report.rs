//! Per-case results shared by the grid checks.

use serde::Serialize;

use crate::conformal::LambdaElement;

/// One checked index tuple and its residual (`"0"` when the identity holds).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckEntry {
    pub indices: Vec<usize>,
    pub ok: bool,
    pub residual: String,
}

impl CheckEntry {
    pub fn from_element(indices: Vec<usize>, residual: &LambdaElement) -> Self {
        CheckEntry {
            indices,
            ok: residual.is_zero(),
            residual: residual.to_string(),
        }
    }

    pub fn from_display(indices: Vec<usize>, ok: bool, residual: impl ToString) -> Self {
        CheckEntry {
            indices,
            ok,
            residual: residual.to_string(),
        }
    }
}

/// Number of failing entries.
pub fn failures(entries: &[CheckEntry]) -> usize {
    entries.iter().filter(|e| !e.ok).count()
}
