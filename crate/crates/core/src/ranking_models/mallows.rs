//! Mallows distributions: mass decays geometrically with the number of
//! value inversions.

use crate::error::{invalid, Result};
use crate::perm::{all_permutations, check_cap, value_inversions};
use crate::pool::CandidatePool;

use super::table::PermutationTable;

pub(crate) fn check_phi(phi: f64) -> Result<()> {
    if phi > 0.0 && phi < 1.0 {
        Ok(())
    } else {
        invalid(format!("phi must lie in (0, 1), got {phi}"))
    }
}

/// `P[perm]` proportional to `phi^K(perm)`, where `K` counts pairs ranked
/// against strict value order. Tied values never count as inverted.
pub fn mallows_table(pool: &CandidatePool, phi: f64) -> Result<PermutationTable> {
    check_phi(phi)?;
    check_cap(pool.len())?;
    let weights: Vec<f64> = all_permutations(pool.len())
        .iter()
        .map(|perm| phi.powi(value_inversions(perm, pool.values()) as i32))
        .collect();
    let z: f64 = weights.iter().sum();
    PermutationTable::from_dense(pool.len(), weights.into_iter().map(|w| w / z).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pool(n: usize) -> CandidatePool {
        let values = (0..n).map(|i| (n - i) as f64).collect();
        CandidatePool::new(values, vec![0.5; n], vec![1.0; n]).unwrap()
    }

    #[test]
    fn two_candidates() {
        let t = mallows_table(&pool(2), 0.5).unwrap();
        assert_abs_diff_eq!(t.prob(&[0, 1]), 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(t.prob(&[1, 0]), 1.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn three_candidates_by_inversion_count() {
        let t = mallows_table(&pool(3), 0.5).unwrap();
        // Inversion counts: 012:0 021:1 102:1 120:2 201:2 210:3.
        let z = 1.0 + 0.5 + 0.5 + 0.25 + 0.25 + 0.125;
        let expected = [1.0, 0.5, 0.5, 0.25, 0.25, 0.125];
        for (got, want) in t.probs().iter().zip(expected) {
            assert_abs_diff_eq!(*got, want / z, epsilon = 1e-12);
        }
    }

    #[test]
    fn phi_near_one_is_uniform() {
        let t = mallows_table(&pool(4), 0.999999).unwrap();
        for p in t.probs() {
            assert_abs_diff_eq!(*p, 1.0 / 24.0, epsilon = 1e-5);
        }
    }

    #[test]
    fn cap_and_range() {
        assert!(mallows_table(&pool(9), 0.5).is_err());
        assert!(mallows_table(&pool(3), 1.0).is_err());
    }
}
