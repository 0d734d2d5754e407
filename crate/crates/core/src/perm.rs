//! Permutation helpers: lexicographic ranking and enumeration.

use crate::error::{Error, Result};

/// Largest `n` for which full permutation tables are built.
pub const ENUMERATION_CAP: usize = 8;

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

pub(crate) fn check_cap(n: usize) -> Result<()> {
    if n > ENUMERATION_CAP {
        Err(Error::Capacity { n, cap: ENUMERATION_CAP })
    } else {
        Ok(())
    }
}

/// True if `perm` lists each of `0..n` exactly once.
pub fn is_bijection(perm: &[usize], n: usize) -> bool {
    if perm.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &c in perm {
        if c >= n || seen[c] {
            return false;
        }
        seen[c] = true;
    }
    true
}

/// Position of `perm` in lexicographic order.
pub fn rank(perm: &[usize]) -> usize {
    let n = perm.len();
    let mut r = 0;
    for a in 0..n {
        let smaller_after = perm[a + 1..].iter().filter(|&&c| c < perm[a]).count();
        r = r * (n - a) + smaller_after;
    }
    r
}

/// Inverse of [`rank`].
pub fn unrank(mut r: usize, n: usize) -> Vec<usize> {
    let mut digits = vec![0; n];
    for a in (0..n).rev() {
        let base = n - a;
        digits[a] = r % base;
        r /= base;
    }
    let mut pool: Vec<usize> = (0..n).collect();
    digits.iter().map(|&d| pool.remove(d)).collect()
}

/// All permutations of `0..n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    (0..factorial(n)).map(|r| unrank(r, n)).collect()
}

/// Candidates ordered by value, highest first, ties by index.
pub fn value_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    order
}

/// Pairs of positions holding a strictly lower value before a higher one.
pub fn value_inversions(perm: &[usize], values: &[f64]) -> usize {
    let mut count = 0;
    for a in 0..perm.len() {
        for b in a + 1..perm.len() {
            if values[perm[a]] < values[perm[b]] {
                count += 1;
            }
        }
    }
    count
}
