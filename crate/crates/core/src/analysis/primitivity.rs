use serde::Serialize;

use crate::error::Result;
use crate::resolve::Hierarchy;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZeroWitness {
    pub row: usize,
    pub col: usize,
    pub row_label: String,
    pub col_label: String,
    /// The level `N` of the matrix `M_{n,N}` holding the zero.
    pub horizon: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimitivityResult {
    pub level: u64,
    pub max_offset: u64,
    /// Smallest `d` with `M_{n,n+d}` entrywise positive.
    pub minimal_offset: Option<u64>,
    /// A zero of `M_{n,n+max_offset}` when no offset worked.
    pub witness_zero: Option<ZeroWitness>,
}

/// Scans `d = 1..=max_offset` for the first entrywise positive `M_{n,n+d}`.
///
/// The scan stops at the first success: step matrices have no zero column,
/// so positivity of `M_{n,N}` carries over to `M_{n,N+1} = M_{n,N} M_{N,N+1}`.
pub fn primitivity_check(h: &Hierarchy<'_>, n: u64, max_offset: u64) -> Result<PrimitivityResult> {
    let mut acc = h.transition_matrix(n, n)?;
    for d in 1..=max_offset {
        acc = acc.compose(&*h.step_matrix(n + d)?);
        if acc.is_positive() {
            return Ok(PrimitivityResult {
                level: n,
                max_offset,
                minimal_offset: Some(d),
                witness_zero: None,
            });
        }
    }
    let witness_zero = acc.first_zero().map(|(row, col)| ZeroWitness {
        row,
        col,
        row_label: acc.row_labels[row].clone(),
        col_label: acc.col_labels[col].clone(),
        horizon: acc.to_level,
    });
    Ok(PrimitivityResult {
        level: n,
        max_offset,
        minimal_offset: None,
        witness_zero,
    })
}
