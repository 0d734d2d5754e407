//! Partial orders on ranking distributions by accuracy.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::perm::unrank;
use crate::pool::CandidatePool;

use super::superstar::SuperstarDistribution;
use super::table::PermutationTable;
use super::swap_pair;

/// Outcome of comparing two distributions `a` and `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccuracyOrder {
    AMoreAccurate,
    BMoreAccurate,
    Incomparable,
    Equal,
}

const REL_TOL: f64 = 1e-12;

fn ge(x: f64, y: f64) -> bool {
    x >= y - REL_TOL * x.abs().max(y.abs())
}

fn gt(x: f64, y: f64) -> bool {
    x > y + REL_TOL * x.abs().max(y.abs())
}

fn check_prefix_support(d: &SuperstarDistribution, name: &str) -> Result<()> {
    let p = d.index_probs();
    if let Some(z) = p.iter().position(|x| *x == 0.0) {
        if p[z..].iter().any(|x| *x > 0.0) {
            return Err(Error::DegenerateComparison(format!(
                "{name} has zero mass at position {z} followed by positive mass"
            )));
        }
    }
    Ok(())
}

fn order_from(a_over_b: bool, b_over_a: bool) -> AccuracyOrder {
    match (a_over_b, b_over_a) {
        (true, false) => AccuracyOrder::AMoreAccurate,
        (false, true) => AccuracyOrder::BMoreAccurate,
        _ => AccuracyOrder::Incomparable,
    }
}

/// Compares superstar distributions.
///
/// `x` is more accurate than `y` when `x[i]/x[j] >= y[i]/y[j]` for all
/// `i < j`, strictly for some pair, and whenever `x[k] < y[k]` also
/// `x[j] <= y[j]` for every `j > k`. Ratios are compared cross-multiplied so
/// trailing zero cells are allowed.
pub fn compare_accuracy_superstar(a: &SuperstarDistribution, b: &SuperstarDistribution) -> Result<AccuracyOrder> {
    if a.n() != b.n() {
        return invalid("distributions differ in length");
    }
    check_prefix_support(a, "a")?;
    check_prefix_support(b, "b")?;
    if a.index_probs().iter().zip(b.index_probs()).all(|(x, y)| (x - y).abs() <= 1e-12) {
        return Ok(AccuracyOrder::Equal);
    }
    Ok(order_from(superstar_dominates(a, b), superstar_dominates(b, a)))
}

fn superstar_dominates(x: &SuperstarDistribution, y: &SuperstarDistribution) -> bool {
    let (x, y) = (x.index_probs(), y.index_probs());
    let n = x.len();
    let mut strict = false;
    for i in 0..n {
        for j in i + 1..n {
            let (lhs, rhs) = (x[i] * y[j], y[i] * x[j]);
            if !ge(lhs, rhs) {
                return false;
            }
            strict |= gt(lhs, rhs);
        }
    }
    strict && single_crossing(x, y)
}

fn single_crossing(x: &[f64], y: &[f64]) -> bool {
    for k in 0..x.len() {
        if gt(y[k], x[k]) && (k + 1..x.len()).any(|j| gt(x[j], y[j])) {
            return false;
        }
    }
    true
}

/// Compares full permutation tables over the same pool.
///
/// `x` is more accurate than `y` when, for every ranking with a higher value
/// at the top than at position `j` and its (top, `j`)-swap, the probability
/// ratio is at least as large under `x` (strictly somewhere); the ratio of
/// the canonical pair (other candidates in value order) grows with `j` under
/// `x`; and top-`k` inclusion probabilities satisfy the majorization clause:
/// if a candidate loses top-`k` mass then so does every lower-valued one.
pub fn compare_accuracy_beyond(a: &PermutationTable, b: &PermutationTable, pool: &CandidatePool) -> Result<AccuracyOrder> {
    if a.n() != b.n() || a.n() != pool.len() {
        return invalid("tables and pool differ in size");
    }
    let swaps = top_swap_pairs(pool);
    for (sigma, tilde) in &swaps {
        for (t, name) in [(a, "a"), (b, "b")] {
            if t.prob(sigma) == 0.0 && t.prob(tilde) == 0.0 {
                return Err(Error::DegenerateComparison(format!(
                    "{name} has zero mass on both {sigma:?} and {tilde:?}"
                )));
            }
        }
    }
    if a.probs().iter().zip(b.probs()).all(|(x, y)| (x - y).abs() <= 1e-12) {
        return Ok(AccuracyOrder::Equal);
    }
    let (ta, tb) = (a.top_k_probs(), b.top_k_probs());
    let a_over_b = table_dominates(a, b, &swaps) && ratios_grow_with_index(a, pool) && majorizes(&ta, &tb, pool);
    let b_over_a = table_dominates(b, a, &swaps) && ratios_grow_with_index(b, pool) && majorizes(&tb, &ta, pool);
    Ok(order_from(a_over_b, b_over_a))
}

/// Every (ranking, top-swapped ranking) pair where the top holds a strictly
/// higher value than the swapped position.
fn top_swap_pairs(pool: &CandidatePool) -> Vec<(Vec<usize>, Vec<usize>)> {
    let n = pool.len();
    let v = pool.values();
    let mut out = Vec::new();
    for r in 0..crate::perm::factorial(n) {
        let perm = unrank(r, n);
        for j in 1..n {
            if v[perm[0]] > v[perm[j]] {
                let mut tilde = perm.clone();
                tilde.swap(0, j);
                out.push((perm.clone(), tilde));
            }
        }
    }
    out
}

fn table_dominates(x: &PermutationTable, y: &PermutationTable, swaps: &[(Vec<usize>, Vec<usize>)]) -> bool {
    let mut strict = false;
    for (sigma, tilde) in swaps {
        let lhs = x.prob(sigma) * y.prob(tilde);
        let rhs = y.prob(sigma) * x.prob(tilde);
        if !ge(lhs, rhs) {
            return false;
        }
        strict |= gt(lhs, rhs);
    }
    strict
}

fn ratios_grow_with_index(x: &PermutationTable, pool: &CandidatePool) -> bool {
    let v = pool.values();
    let n = pool.len();
    for i in 0..n {
        for k in 0..n {
            if v[i] <= v[k] {
                continue;
            }
            let mut prev: Option<(f64, f64)> = None;
            for j in 1..n {
                let (sigma, tilde) = swap_pair(v, i, k, j, false);
                let cur = (x.prob(&sigma), x.prob(&tilde));
                if let Some((ps, pt)) = prev {
                    // cur.0 / cur.1 >= ps / pt
                    if !ge(cur.0 * pt, ps * cur.1) {
                        return false;
                    }
                }
                prev = Some(cur);
            }
        }
    }
    true
}

fn majorizes(tx: &[Vec<f64>], ty: &[Vec<f64>], pool: &CandidatePool) -> bool {
    let v = pool.values();
    let n = pool.len();
    for k in 0..n - 1 {
        for c in 0..n {
            if !gt(ty[c][k], tx[c][k]) {
                continue;
            }
            if (0..n).any(|d| v[d] < v[c] && gt(tx[d][k], ty[d][k])) {
                return false;
            }
        }
    }
    true
}
