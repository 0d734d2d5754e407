//! Random utility model with Gaussian noise, tabulated empirically.

use rand_distr::{Distribution, Normal};

use crate::error::{invalid, Result};
use crate::perm::{check_cap, factorial, rank};
use crate::pool::CandidatePool;
use crate::rng::stream_rng;

use super::sampling::rum_order;
use super::table::PermutationTable;

/// Frequency table of `samples` Gaussian-noise rankings, with the binomial
/// standard error of every cell.
pub fn gaussian_rum_table(pool: &CandidatePool, sigma: f64, samples: usize, seed: u64) -> Result<PermutationTable> {
    check_cap(pool.len())?;
    if samples == 0 {
        return invalid("samples must be positive");
    }
    let noise = normal(sigma)?;
    let mut rng = stream_rng(seed, 0);
    let mut counts = vec![0u64; factorial(pool.len())];
    let mut scores = vec![0.0; pool.len()];
    for _ in 0..samples {
        for (s, v) in scores.iter_mut().zip(pool.values()) {
            *s = v + noise.sample(&mut rng);
        }
        counts[rank(&rum_order(&scores))] += 1;
    }
    let m = samples as f64;
    let probs: Vec<f64> = counts.iter().map(|&c| c as f64 / m).collect();
    let stderr = probs.iter().map(|p| (p * (1.0 - p) / m).sqrt()).collect();
    Ok(PermutationTable::from_dense(pool.len(), probs)?.with_stderr(stderr))
}

pub(crate) fn normal(sigma: f64) -> Result<Normal<f64>> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return invalid(format!("sigma must be positive and finite, got {sigma}"));
    }
    Normal::new(0.0, sigma).map_err(|e| crate::error::Error::InvalidInput(e.to_string()))
}
