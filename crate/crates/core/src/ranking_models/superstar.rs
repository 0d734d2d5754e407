//! Superstar distributions: where the single high-value candidate lands.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

use super::plackett_luce::check_beta;

const TOLERANCE: f64 = 1e-9;

/// `index_probs[i]` is the probability that the high-value candidate is
/// ranked at position `i` (0-based).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperstarDistribution {
    index_probs: Vec<f64>,
}

impl SuperstarDistribution {
    /// Requires normalization and nonincreasing probabilities.
    pub fn new(index_probs: Vec<f64>) -> Result<Self> {
        let d = Self::from_probs(index_probs)?;
        if d.index_probs.windows(2).any(|w| w[1] > w[0] + TOLERANCE) {
            return invalid(format!("index probabilities must be nonincreasing: {:?}", d.index_probs));
        }
        Ok(d)
    }

    /// Requires normalization only. Useful for comparing arbitrary vectors.
    pub fn from_probs(index_probs: Vec<f64>) -> Result<Self> {
        if index_probs.len() < 2 {
            return invalid("need at least two positions");
        }
        if index_probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return invalid("index probabilities must be finite and nonnegative");
        }
        let total: f64 = index_probs.iter().sum();
        if (total - 1.0).abs() > TOLERANCE {
            return invalid(format!("index probabilities sum to {total}"));
        }
        Ok(Self { index_probs })
    }

    pub fn uniform(n: usize) -> Self {
        Self { index_probs: vec![1.0 / n as f64; n] }
    }

    pub fn n(&self) -> usize {
        self.index_probs.len()
    }

    pub fn index_probs(&self) -> &[f64] {
        &self.index_probs
    }

    pub fn prob(&self, i: usize) -> f64 {
        self.index_probs[i]
    }

    /// `P[high-value candidate within the first k positions]`.
    pub fn prefix_mass(&self, k: usize) -> f64 {
        self.index_probs[..k].iter().sum()
    }
}

/// Closed form of the Plackett-Luce index probabilities for a superstar pool.
pub fn superstar_index_probs(v1: f64, v2: f64, n: usize, beta: f64) -> Result<SuperstarDistribution> {
    check_beta(beta)?;
    if v1.is_nan() || v2.is_nan() || v1 <= v2 || v2 < 0.0 {
        return invalid(format!("need v1 > v2 >= 0, got v1 = {v1}, v2 = {v2}"));
    }
    if n < 2 {
        return invalid("need at least two candidates");
    }
    let e = ((v1 - v2) / beta).exp();
    let nf = n as f64;
    let mut probs = Vec::with_capacity(n);
    let mut p = 1.0 / (1.0 + (nf - 1.0) * (-(v1 - v2) / beta).exp());
    for i in 0..n {
        probs.push(p);
        // Factor 1 / (1 + (e - 1) / (n - k)) with k = i + 1.
        let rest = nf - (i + 1) as f64;
        p *= if rest > 0.0 { rest / (rest + e - 1.0) } else { 0.0 };
    }
    SuperstarDistribution::new(probs)
}

/// `P[high at i] / P[high at j]` for positions `i < j`.
pub fn superstar_ratio(dist: &SuperstarDistribution, i: usize, j: usize) -> Result<f64> {
    if i >= j || j >= dist.n() {
        return invalid(format!("need i < j < n, got i = {i}, j = {j}"));
    }
    if dist.prob(j) == 0.0 {
        return Err(Error::DegenerateComparison(format!("position {j} has zero probability")));
    }
    Ok(dist.prob(i) / dist.prob(j))
}

/// Product form of [`superstar_ratio`] for Plackett-Luce:
/// `prod_{k=i+1}^{j} (1 + (e - 1)/(n - k))` with `e = exp((v1 - v2)/beta)`.
pub fn superstar_ratio_closed_form(v1: f64, v2: f64, n: usize, beta: f64, i: usize, j: usize) -> f64 {
    let e = ((v1 - v2) / beta).exp();
    (i + 1..=j).map(|k| 1.0 + (e - 1.0) / (n - k) as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::E;

    #[test]
    fn three_candidates_at_unit_beta() {
        let d = superstar_index_probs(1.0, 0.0, 3, 1.0).unwrap();
        assert_abs_diff_eq!(d.prob(0), E / (E + 2.0), epsilon = 1e-12);
        for (got, want) in d.index_probs().iter().zip([0.57612, 0.30988, 0.11400]) {
            assert_abs_diff_eq!(*got, want, epsilon = 5e-6);
        }
    }

    #[test]
    fn limits() {
        let d = superstar_index_probs(1.0, 0.0, 4, 1e9).unwrap();
        for p in d.index_probs() {
            assert_abs_diff_eq!(*p, 0.25, epsilon = 1e-6);
        }
        let d = superstar_index_probs(1.0, 0.0, 5, 1e-3).unwrap();
        assert_abs_diff_eq!(d.prob(0), 1.0, epsilon = 1e-12);
        assert!(d.index_probs()[1..].iter().all(|p| *p < 1e-12));
    }

    #[test]
    fn ratios_at_unit_beta() {
        let d = superstar_index_probs(1.0, 0.0, 3, 1.0).unwrap();
        assert_abs_diff_eq!(superstar_ratio(&d, 0, 1).unwrap(), 1.0 + (E - 1.0) / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(superstar_ratio(&d, 1, 2).unwrap(), E, epsilon = 1e-12);
        assert_abs_diff_eq!(superstar_ratio(&SuperstarDistribution::uniform(4), 0, 3).unwrap(), 1.0);
    }

    #[test]
    fn ratio_of_zero_cell_is_degenerate() {
        let d = SuperstarDistribution::new(vec![1.0, 0.0]).unwrap();
        assert!(matches!(superstar_ratio(&d, 0, 1), Err(Error::DegenerateComparison(_))));
    }

    #[test]
    fn rejects_inverted_values() {
        assert!(superstar_index_probs(0.0, 1.0, 3, 1.0).is_err());
        assert!(superstar_index_probs(1.0, 1.0, 3, 1.0).is_err());
    }
}
