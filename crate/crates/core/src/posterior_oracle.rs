//! Exact posterior over rankings given a status vector, and the
//! Bayes-optimal pick.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::pool::{CandidatePool, StatusVector};
use crate::ranking_models::{ModelSpec, RankingDistribution, RankingSampler};
use crate::rng::stream_rng;

/// Largest pool for which policies over all `2^n` status vectors are built.
pub const POLICY_CAP: usize = 12;

/// `P[s | perm]`: independent free draws per candidate.
pub fn status_likelihood(pool: &CandidatePool, perm: &[usize], s: &StatusVector) -> f64 {
    perm.iter()
        .zip(s.bits())
        .map(|(&c, &free)| if free { pool.free_prob(c) } else { 1.0 - pool.free_prob(c) })
        .product()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorReport {
    /// `E[v at position a | s]`.
    pub expected_values: Vec<f64>,
    /// `E[v / gamma^(1 - s_a) at position a | s]`.
    pub expected_utilities: Vec<f64>,
    /// Utilities before dividing by `P[s]`: `sum P[perm] P[s|perm] u`.
    pub joint_utilities: Vec<f64>,
    pub status_prob: f64,
    /// Argmax of `expected_utilities`, lowest position on ties.
    pub best_index: usize,
}

pub fn posterior_report(dist: &RankingDistribution, pool: &CandidatePool, s: &StatusVector) -> Result<PosteriorReport> {
    if s.len() != pool.len() {
        return invalid("status vector length differs from pool size");
    }
    let outcomes = dist.outcomes(pool)?;
    report_from_outcomes(&outcomes, pool, s)
}

fn report_from_outcomes(outcomes: &[(f64, Vec<usize>)], pool: &CandidatePool, s: &StatusVector) -> Result<PosteriorReport> {
    let n = pool.len();
    let mut values = vec![0.0; n];
    let mut utilities = vec![0.0; n];
    let mut z = 0.0;
    for (p, perm) in outcomes {
        let w = p * status_likelihood(pool, perm, s);
        if w == 0.0 {
            continue;
        }
        z += w;
        for (a, &c) in perm.iter().enumerate() {
            values[a] += w * pool.value(c);
            utilities[a] += w * pool.utility(c, s.is_free(a));
        }
    }
    if z <= 0.0 {
        return Err(Error::ImpossibleStatus);
    }
    let expected_values = values.iter().map(|x| x / z).collect();
    let expected_utilities: Vec<f64> = utilities.iter().map(|x| x / z).collect();
    let best_index = argmax_first(&expected_utilities);
    Ok(PosteriorReport { expected_values, expected_utilities, joint_utilities: utilities, status_prob: z, best_index })
}

/// Index of the largest entry; earliest wins ties.
pub(crate) fn argmax_first(xs: &[f64]) -> usize {
    let mut best = 0;
    for (a, x) in xs.iter().enumerate() {
        if *x > xs[best] {
            best = a;
        }
    }
    best
}

/// A pick (position) for every status vector, indexed by
/// [`StatusVector::mask`]. `None` marks status vectors that cannot occur.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyTable {
    n: usize,
    picks: Vec<Option<usize>>,
}

/// The Bayes-optimal policy.
pub type OraclePolicy = PolicyTable;

impl PolicyTable {
    pub fn from_fn(n: usize, f: impl Fn(&StatusVector) -> Option<usize>) -> Self {
        Self { n, picks: StatusVector::all(n).map(|s| f(&s)).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pick(&self, s: &StatusVector) -> Option<usize> {
        self.picks[s.mask()]
    }

    pub fn picks(&self) -> &[Option<usize>] {
        &self.picks
    }
}

pub(crate) fn check_policy_cap(n: usize) -> Result<()> {
    if n > POLICY_CAP {
        Err(Error::Capacity { n, cap: POLICY_CAP })
    } else {
        Ok(())
    }
}

/// Posterior argmax for every status vector.
pub fn oracle_policy(dist: &RankingDistribution, pool: &CandidatePool) -> Result<OraclePolicy> {
    let n = pool.len();
    check_policy_cap(n)?;
    let outcomes = dist.outcomes(pool)?;
    let picks = (0..1usize << n)
        .into_par_iter()
        .map(|mask| match report_from_outcomes(&outcomes, pool, &StatusVector::from_mask(mask, n)) {
            Ok(r) => Ok(Some(r.best_index)),
            Err(Error::ImpossibleStatus) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PolicyTable { n, picks })
}

/// Posterior reports for every status vector, `None` where unreachable.
pub fn all_posterior_reports(dist: &RankingDistribution, pool: &CandidatePool) -> Result<Vec<Option<PosteriorReport>>> {
    let n = pool.len();
    check_policy_cap(n)?;
    let outcomes = dist.outcomes(pool)?;
    (0..1usize << n)
        .into_par_iter()
        .map(|mask| match report_from_outcomes(&outcomes, pool, &StatusVector::from_mask(mask, n)) {
            Ok(r) => Ok(Some(r)),
            Err(Error::ImpossibleStatus) => Ok(None),
            Err(e) => Err(e),
        })
        .collect()
}

/// Per status vector, the posterior utility lost by `policy` against the
/// oracle, paired with the status probability. `None` where unreachable.
pub fn status_regrets(policy: &PolicyTable, dist: &RankingDistribution, pool: &CandidatePool) -> Result<Vec<Option<(f64, f64)>>> {
    if policy.n() != pool.len() {
        return invalid("policy size differs from pool size");
    }
    let reports = all_posterior_reports(dist, pool)?;
    Ok(reports
        .iter()
        .enumerate()
        .map(|(mask, r)| {
            r.as_ref().map(|r| {
                let s = StatusVector::from_mask(mask, pool.len());
                let a = policy.pick(&s).unwrap_or(0);
                (r.expected_utilities[r.best_index] - r.expected_utilities[a], r.status_prob)
            })
        })
        .collect())
}

/// `sum_perm P[perm] sum_s P[s|perm] u(pick(s))`, by direct enumeration.
pub fn policy_expected_utility(policy: &PolicyTable, dist: &RankingDistribution, pool: &CandidatePool) -> Result<f64> {
    let n = pool.len();
    if policy.n() != n {
        return invalid("policy size differs from pool size");
    }
    let outcomes = dist.outcomes(pool)?;
    let total = outcomes
        .par_iter()
        .map(|(p, perm)| {
            let mut acc = 0.0;
            for s in StatusVector::all(n) {
                let a = policy.pick(&s).unwrap_or(0);
                acc += status_likelihood(pool, perm, &s) * pool.utility(perm[a], s.is_free(a));
            }
            p * acc
        })
        .collect::<Vec<f64>>();
    Ok(total.iter().sum())
}

/// Monte Carlo estimate of a policy's utility with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let m = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / m;
        let var = if xs.len() > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0) } else { 0.0 };
        Self { mean, stderr: (var / m).sqrt() }
    }
}

/// Draws one ranking and one status vector (by position).
pub(crate) fn draw_market<R: Rng + ?Sized>(
    sampler: &RankingSampler,
    pool: &CandidatePool,
    rng: &mut R,
) -> (Vec<usize>, StatusVector) {
    let perm = sampler.sample(rng);
    let free: Vec<bool> = (0..pool.len()).map(|c| rng.random::<f64>() < pool.free_prob(c)).collect();
    let s = StatusVector::new(perm.iter().map(|&c| free[c]).collect());
    (perm, s)
}

pub fn policy_expected_utility_mc(
    policy: &PolicyTable,
    spec: &ModelSpec,
    pool: &CandidatePool,
    samples: usize,
    seed: u64,
) -> Result<Estimate> {
    if samples == 0 {
        return invalid("samples must be positive");
    }
    let sampler = RankingSampler::new(spec, pool)?;
    let mut rng = stream_rng(seed, 0);
    let xs: Vec<f64> = (0..samples)
        .map(|_| {
            let (perm, s) = draw_market(&sampler, pool, &mut rng);
            let a = policy.pick(&s).unwrap_or(0);
            pool.utility(perm[a], s.is_free(a))
        })
        .collect();
    Ok(Estimate::from_samples(&xs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ranking_models::{superstar_index_probs, PermutationTable};
    use approx::assert_abs_diff_eq;

    fn fixture() -> (RankingDistribution, CandidatePool) {
        let pool = CandidatePool::new(vec![1.0, 2.0 / 3.0, 0.0], vec![0.1, 0.4, 0.4], vec![1.0; 3]).unwrap();
        let table =
            PermutationTable::from_entries(3, &[(vec![0, 1, 2], 0.9), (vec![2, 1, 0], 0.1)], pool.values()).unwrap();
        (RankingDistribution::Table(table), pool)
    }

    #[test]
    fn two_point_fixture_picks_second() {
        let (dist, pool) = fixture();
        let r = posterior_report(&dist, &pool, &StatusVector::from_ints(&[1, 1, 0])).unwrap();
        assert_eq!(r.best_index, 1);
        assert_eq!(oracle_policy(&dist, &pool).unwrap().pick(&StatusVector::from_ints(&[1, 1, 0])), Some(1));
    }

    #[test]
    fn status_probabilities_sum_to_one() {
        let pool = CandidatePool::superstar(4, 1.0, 0.3, 0.2, 0.6, 2.0, 2.0).unwrap();
        let dist = RankingDistribution::Superstar(superstar_index_probs(1.0, 0.3, 4, 0.7).unwrap());
        let total: f64 = all_posterior_reports(&dist, &pool).unwrap().iter().flatten().map(|r| r.status_prob).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn all_free_picks_top() {
        let pool = CandidatePool::new(vec![1.0, 0.5, 0.2], vec![0.2, 0.4, 0.6], vec![3.0; 3]).unwrap();
        let dist = ModelSpec::Mallows { phi: 0.6 }.distribution(&pool).unwrap();
        let r = posterior_report(&dist, &pool, &StatusVector::from_ints(&[1, 1, 1])).unwrap();
        assert_eq!(r.best_index, 0);
    }

    #[test]
    fn always_free_limit_is_top_value() {
        let p = 1.0 - 1e-12;
        let pool = CandidatePool::new(vec![1.0, 0.5, 0.0], vec![p; 3], vec![2.0; 3]).unwrap();
        let dist = ModelSpec::PlackettLuce { beta: 1.0 }.distribution(&pool).unwrap();
        let follow = PolicyTable::from_fn(3, |_| Some(0));
        let u = policy_expected_utility(&follow, &dist, &pool).unwrap();
        let RankingDistribution::Table(t) = &dist else { unreachable!() };
        assert_abs_diff_eq!(u, t.position_values(pool.values())[0], epsilon = 1e-9);
    }

    #[test]
    fn argmax_prefers_earliest() {
        assert_eq!(argmax_first(&[1.0, 2.0, 2.0]), 1);
        assert_eq!(argmax_first(&[3.0, 3.0]), 0);
    }
}
