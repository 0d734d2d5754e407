//! Inversion monotonicity: inverting a correctly ordered pair never makes a
//! ranking more likely.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::perm::unrank;
use crate::pool::CandidatePool;

use super::table::PermutationTable;

/// A ranking that is less likely than the ranking with one of its correctly
/// ordered pairs swapped.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InversionViolation {
    pub perm: Vec<usize>,
    /// Swapped positions, `first < second`.
    pub positions: (usize, usize),
    pub prob: f64,
    pub swapped_prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneReport {
    pub monotone: bool,
    pub violations: Vec<InversionViolation>,
}

/// Checks `P[perm] >= P[swapped] - slack` for every ranking and every pair
/// of positions holding a strictly higher value before a lower one.
pub fn is_inversion_monotone(table: &PermutationTable, pool: &CandidatePool, slack: f64) -> Result<MonotoneReport> {
    if table.n() != pool.len() {
        return invalid("table size differs from pool size");
    }
    let v = pool.values();
    let n = table.n();
    let mut violations = Vec::new();
    for (r, &p) in table.probs().iter().enumerate() {
        let mut perm = unrank(r, n);
        for a in 0..n {
            for b in a + 1..n {
                if v[perm[a]] <= v[perm[b]] {
                    continue;
                }
                perm.swap(a, b);
                let q = table.prob(&perm);
                perm.swap(a, b);
                if p < q - slack {
                    violations.push(InversionViolation { perm: perm.clone(), positions: (a, b), prob: p, swapped_prob: q });
                }
            }
        }
    }
    Ok(MonotoneReport { monotone: violations.is_empty(), violations })
}
