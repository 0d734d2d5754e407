//! Plackett-Luce ranking probabilities (random utility with Gumbel noise).

use crate::error::{invalid, Result};
use crate::perm::{all_permutations, check_cap, is_bijection};
use crate::pool::CandidatePool;

use super::table::PermutationTable;

/// Probability of observing `perm` (candidate per position) under
/// Plackett-Luce with temperature `beta`.
pub fn plackett_luce_prob(pool: &CandidatePool, beta: f64, perm: &[usize]) -> Result<f64> {
    check_beta(beta)?;
    if !is_bijection(perm, pool.len()) {
        return invalid(format!("{perm:?} is not a permutation of 0..{}", pool.len()));
    }
    Ok(prob_unchecked(pool.values(), beta, perm))
}

pub(crate) fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        invalid(format!("beta must be positive and finite, got {beta}"))
    }
}

/// Sequential-choice product. Each stage shifts by the largest remaining
/// value so that small `beta` neither overflows nor underflows to 0/0.
pub(crate) fn prob_unchecked(values: &[f64], beta: f64, perm: &[usize]) -> f64 {
    let mut p = 1.0;
    for j in 0..perm.len() - 1 {
        let rest = &perm[j..];
        let top = rest.iter().map(|&c| values[c]).fold(f64::NEG_INFINITY, f64::max);
        let tail: f64 = rest.iter().map(|&c| ((values[c] - top) / beta).exp()).sum();
        p *= ((values[perm[j]] - top) / beta).exp() / tail;
    }
    p
}

/// Full Plackett-Luce table over all `n!` permutations.
pub fn plackett_luce_table(pool: &CandidatePool, beta: f64) -> Result<PermutationTable> {
    check_beta(beta)?;
    check_cap(pool.len())?;
    let probs = all_permutations(pool.len())
        .iter()
        .map(|perm| prob_unchecked(pool.values(), beta, perm))
        .collect();
    PermutationTable::from_dense(pool.len(), probs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pool3() -> CandidatePool {
        CandidatePool::new(vec![1.0, 0.5, 0.0], vec![0.1, 0.3, 0.5], vec![2.0; 3]).unwrap()
    }

    #[test]
    fn matches_hand_evaluation() {
        // e^1/(e^1+e^.5+1) * e^.5/(e^.5+1)
        let e = 1f64.exp();
        let h = 0.5f64.exp();
        let expected = e / (e + h + 1.0) * h / (h + 1.0);
        let p = plackett_luce_prob(&pool3(), 1.0, &[0, 1, 2]).unwrap();
        assert_abs_diff_eq!(p, expected, epsilon = 1e-12);
        assert_abs_diff_eq!(p, 0.31526, epsilon = 5e-6);
    }

    #[test]
    fn table_is_normalized() {
        let t = plackett_luce_table(&pool3(), 1.0).unwrap();
        assert_abs_diff_eq!(t.total(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn huge_beta_is_uniform() {
        let t = plackett_luce_table(&pool3(), 1e9).unwrap();
        for p in t.probs() {
            assert_abs_diff_eq!(*p, 1.0 / 6.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn tiny_beta_does_not_overflow() {
        let p = plackett_luce_prob(&pool3(), 1e-4, &[0, 1, 2]).unwrap();
        assert_abs_diff_eq!(p, 1.0, epsilon = 1e-12);
        let q = plackett_luce_prob(&pool3(), 1e-4, &[2, 1, 0]).unwrap();
        assert_eq!(q, 0.0);
    }

    #[test]
    fn rejects_non_bijection() {
        assert!(plackett_luce_prob(&pool3(), 1.0, &[0, 0, 1]).is_err());
        assert!(plackett_luce_prob(&pool3(), 0.0, &[0, 1, 2]).is_err());
    }
}
