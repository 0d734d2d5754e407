//! Candidate pools and status vectors.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Values, free probabilities and busy penalties of the candidates.
///
/// Candidate `c` has value `values[c]`, is free with probability
/// `free_probs[c]` and is worth `values[c] / busy_penalties[c]` when picked
/// while busy. Candidates are indexed from 0 in nonincreasing value order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidatePool {
    values: Vec<f64>,
    free_probs: Vec<f64>,
    busy_penalties: Vec<f64>,
}

impl CandidatePool {
    pub fn new(values: Vec<f64>, free_probs: Vec<f64>, busy_penalties: Vec<f64>) -> Result<Self> {
        let n = values.len();
        if n < 2 {
            return invalid("a pool needs at least two candidates");
        }
        if free_probs.len() != n || busy_penalties.len() != n {
            return invalid("values, free_probs and busy_penalties differ in length");
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return invalid("values must be finite and nonnegative");
        }
        if values.windows(2).any(|w| w[0] < w[1]) {
            return invalid("values must be nonincreasing");
        }
        if free_probs.iter().any(|p| !(*p > 0.0 && *p < 1.0)) {
            return invalid("free probabilities must lie in (0, 1)");
        }
        if busy_penalties.iter().any(|g| !(g.is_finite() && *g >= 1.0)) {
            return invalid("busy penalties must be finite and at least 1");
        }
        for i in 0..n {
            for j in 0..n {
                if values[i] > values[j] && free_probs[i] > free_probs[j] {
                    return invalid(format!(
                        "candidate {i} outranks candidate {j} in value but is more likely free"
                    ));
                }
            }
        }
        Ok(Self { values, free_probs, busy_penalties })
    }

    /// One high-value candidate and `n - 1` identical low-value ones.
    pub fn superstar(n: usize, v1: f64, v2: f64, p1: f64, p2: f64, gamma1: f64, gamma2: f64) -> Result<Self> {
        if n < 2 {
            return invalid("a pool needs at least two candidates");
        }
        if v1 <= v2 {
            return invalid("the high value must exceed the low value");
        }
        let mut values = vec![v2; n];
        values[0] = v1;
        let mut free_probs = vec![p2; n];
        free_probs[0] = p1;
        let mut busy_penalties = vec![gamma2; n];
        busy_penalties[0] = gamma1;
        Self::new(values, free_probs, busy_penalties)
    }

    /// Same pool with every busy penalty replaced by `gamma`.
    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Self::new(self.values.clone(), self.free_probs.clone(), vec![gamma; self.len()])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn free_probs(&self) -> &[f64] {
        &self.free_probs
    }

    pub fn busy_penalties(&self) -> &[f64] {
        &self.busy_penalties
    }

    pub fn value(&self, c: usize) -> f64 {
        self.values[c]
    }

    pub fn free_prob(&self, c: usize) -> f64 {
        self.free_probs[c]
    }

    pub fn busy_penalty(&self, c: usize) -> f64 {
        self.busy_penalties[c]
    }

    /// Utility of picking candidate `c` with the given status.
    pub fn utility(&self, c: usize, free: bool) -> f64 {
        if free {
            self.values[c]
        } else {
            self.values[c] / self.busy_penalties[c]
        }
    }

    /// `v1 > v2 = ... = vn` and `p2 = ... = pn`.
    pub fn is_superstar(&self) -> bool {
        let (v, p) = (&self.values, &self.free_probs);
        v[0] > v[1] && v[1..].iter().all(|x| *x == v[1]) && p[1..].iter().all(|x| *x == p[1])
    }

    /// Superstar pool whose low-value block also shares one busy penalty.
    pub(crate) fn is_uniform_superstar(&self) -> bool {
        let g = &self.busy_penalties;
        self.is_superstar() && g[1..].iter().all(|x| *x == g[1])
    }

    /// Odds ratio `(p2/(1-p2)) / (p1/(1-p1))` of a superstar pool.
    pub fn free_busy_ratio(&self) -> f64 {
        odds(self.free_probs[1]) / odds(self.free_probs[0])
    }
}

pub(crate) fn odds(p: f64) -> f64 {
    p / (1.0 - p)
}

/// Free (`true`) or busy (`false`) bit per ranked position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StatusVector {
    bits: Vec<bool>,
}

impl StatusVector {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// Parses `1` as free and `0` as busy.
    pub fn from_ints(bits: &[u8]) -> Self {
        Self { bits: bits.iter().map(|b| *b != 0).collect() }
    }

    /// Bit `a` of `mask` is the status of position `a`.
    pub fn from_mask(mask: usize, n: usize) -> Self {
        Self { bits: (0..n).map(|a| mask >> a & 1 == 1).collect() }
    }

    pub fn mask(&self) -> usize {
        self.bits.iter().enumerate().map(|(a, b)| (*b as usize) << a).sum()
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn is_free(&self, position: usize) -> bool {
        self.bits[position]
    }

    /// First position whose status differs from the top position.
    pub fn first_different(&self) -> Option<usize> {
        let top = *self.bits.first()?;
        self.bits.iter().position(|b| *b != top)
    }

    pub fn first_free(&self) -> Option<usize> {
        self.bits.iter().position(|b| *b)
    }

    pub fn first_busy(&self) -> Option<usize> {
        self.bits.iter().position(|b| !*b)
    }

    /// Status bits written as `1`/`0` characters.
    pub fn to_bit_string(&self) -> String {
        self.bits.iter().map(|b| if *b { '1' } else { '0' }).collect()
    }

    /// Every status vector of length `n`, ordered by mask.
    pub fn all(n: usize) -> impl Iterator<Item = StatusVector> {
        (0..1usize << n).map(move |m| StatusVector::from_mask(m, n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_mismatched_lengths() {
        assert!(CandidatePool::new(vec![1.0, 0.0], vec![0.5], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn rejects_valuable_candidate_more_likely_free() {
        assert!(CandidatePool::new(vec![1.0, 0.0], vec![0.6, 0.5], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn superstar_predicate() {
        let pool = CandidatePool::superstar(4, 1.0, 0.2, 0.1, 0.4, 2.0, 2.0).unwrap();
        assert!(pool.is_superstar());
        let other = CandidatePool::new(vec![1.0, 0.5, 0.0], vec![0.1, 0.3, 0.5], vec![2.0; 3]).unwrap();
        assert!(!other.is_superstar());
    }

    #[test]
    fn status_mask_round_trip() {
        let s = StatusVector::from_ints(&[1, 0, 1, 1]);
        assert_eq!(StatusVector::from_mask(s.mask(), 4), s);
        assert_eq!(s.first_different(), Some(1));
        assert_eq!(s.to_bit_string(), "1011");
    }
}
