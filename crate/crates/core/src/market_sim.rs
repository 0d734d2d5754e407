//! A repeated hiring market: a background firm picks from a fresh noisy
//! ranking every step, picked candidates turn busy, and busy candidates
//! recover at a fixed rate. Candidate strategies are scored on the same
//! rankings and statuses without affecting the market.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::pool::{CandidatePool, StatusVector};
use crate::posterior_oracle::{Estimate, POLICY_CAP};
use crate::ranking_models::{ModelSpec, RankingSampler};
use crate::rng::stream_rng;
use crate::strategies::StrategySpec;
use crate::welfare_metrics::{picker, Picker};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub pool: CandidatePool,
    pub model: ModelSpec,
    /// Chance that a busy candidate becomes free at the start of a step.
    pub refresh_prob: f64,
    pub background_strategy: StrategySpec,
    pub candidate_strategies: Vec<StrategySpec>,
    pub steps: usize,
    pub replicates: usize,
    pub seed: u64,
    /// Leading fraction of steps left out of every average.
    #[serde(default = "default_burn_in")]
    pub burn_in_fraction: f64,
}

fn default_burn_in() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyScore {
    pub strategy: StrategySpec,
    pub mean_utility: f64,
    pub stderr: f64,
    /// Within two paired standard errors of the best strategy.
    pub in_best_band: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    /// Per candidate, fraction of step ends spent free.
    pub steady_free_prob: Vec<f64>,
    /// Per candidate, fraction of rankings observed with the candidate free.
    pub observed_free_prob: Vec<f64>,
    /// Largest per-candidate gap between the free fraction over the last
    /// half of the run and over the second quarter.
    pub stationarity_gap: f64,
    pub background_utility: Estimate,
    pub strategy_utilities: Vec<StrategyScore>,
    pub best_strategy: Option<StrategySpec>,
}

impl SimReport {
    pub fn best_band(&self) -> Vec<StrategySpec> {
        self.strategy_utilities.iter().filter(|s| s.in_best_band).map(|s| s.strategy).collect()
    }

    pub fn score(&self, strategy: &StrategySpec) -> Option<&StrategyScore> {
        self.strategy_utilities.iter().find(|s| s.strategy == *strategy)
    }
}

struct ReplicateOutcome {
    end_free: Vec<f64>,
    observed_free: Vec<f64>,
    second_quarter: Vec<f64>,
    second_half: Vec<f64>,
    background: f64,
    strategies: Vec<f64>,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.refresh_prob > 0.0 && self.refresh_prob <= 1.0) {
            return invalid("refresh_prob must lie in (0, 1]");
        }
        if self.steps == 0 || self.replicates == 0 {
            return invalid("steps and replicates must be positive");
        }
        if !(0.0..1.0).contains(&self.burn_in_fraction) {
            return invalid("burn_in_fraction must lie in [0, 1)");
        }
        self.model.validate()?;
        self.background_strategy.validate(self.pool.len())?;
        for s in &self.candidate_strategies {
            s.validate(self.pool.len())?;
        }
        Ok(())
    }
}

fn make_picker(strategy: &StrategySpec, config: &SimConfig) -> Result<Picker> {
    let exact = if config.pool.len() <= POLICY_CAP { config.model.distribution(&config.pool).ok() } else { None };
    picker(strategy, &config.pool, exact.as_ref())
}

pub fn run_sim(config: &SimConfig) -> Result<SimReport> {
    config.validate()?;
    let sampler = RankingSampler::new(&config.model, &config.pool)?;
    let background = make_picker(&config.background_strategy, config)?;
    let pickers = config.candidate_strategies.iter().map(|s| make_picker(s, config)).collect::<Result<Vec<_>>>()?;
    let outcomes: Vec<ReplicateOutcome> = (0..config.replicates)
        .into_par_iter()
        .map(|rep| run_replicate(config, &sampler, &background, &pickers, rep as u64))
        .collect();
    Ok(summarize(config, &outcomes))
}

fn run_replicate(
    config: &SimConfig,
    sampler: &RankingSampler,
    background: &Picker,
    pickers: &[Picker],
    replicate: u64,
) -> ReplicateOutcome {
    let pool = &config.pool;
    let n = pool.len();
    let t_total = config.steps;
    let burn = (config.burn_in_fraction * t_total as f64).floor() as usize;
    let (q1, q2) = (t_total / 4, t_total / 2);
    let mut rng = stream_rng(config.seed, replicate);
    let mut free = vec![true; n];
    // A busy candidate picked again keeps its busy spell for one more step.
    let mut renewed = vec![false; n];
    let mut out = ReplicateOutcome {
        end_free: vec![0.0; n],
        observed_free: vec![0.0; n],
        second_quarter: vec![0.0; n],
        second_half: vec![0.0; n],
        background: 0.0,
        strategies: vec![0.0; pickers.len()],
    };
    for t in 0..t_total {
        for c in 0..n {
            let u: f64 = rng.random();
            if !free[c] && !renewed[c] && u < config.refresh_prob {
                free[c] = true;
            }
            renewed[c] = false;
        }
        let perm = sampler.sample(&mut rng);
        let s = StatusVector::new(perm.iter().map(|&c| free[c]).collect());
        let counted = t >= burn;
        if counted {
            for (acc, pick) in out.strategies.iter_mut().zip(pickers) {
                let a = pick(&s);
                *acc += pool.utility(perm[a], s.is_free(a));
            }
            for (acc, &f) in out.observed_free.iter_mut().zip(&free) {
                *acc += f64::from(f);
            }
        }
        let b = background(&s);
        let chosen = perm[b];
        if counted {
            out.background += pool.utility(chosen, s.is_free(b));
        }
        if s.is_free(b) {
            free[chosen] = false;
        } else {
            renewed[chosen] = true;
        }
        for (c, &f) in free.iter().enumerate() {
            let x = f64::from(f);
            if counted {
                out.end_free[c] += x;
            }
            if (q1..q2).contains(&t) {
                out.second_quarter[c] += x;
            } else if t >= q2 {
                out.second_half[c] += x;
            }
        }
    }
    let m = (t_total - burn) as f64;
    for x in out.end_free.iter_mut().chain(out.observed_free.iter_mut()).chain(out.strategies.iter_mut()) {
        *x /= m;
    }
    out.background /= m;
    let (lq, lh) = ((q2 - q1).max(1) as f64, (t_total - q2).max(1) as f64);
    out.second_quarter.iter_mut().for_each(|x| *x /= lq);
    out.second_half.iter_mut().for_each(|x| *x /= lh);
    out
}

fn column_mean(rows: &[&[f64]], n: usize) -> Vec<f64> {
    (0..n).map(|c| rows.iter().map(|r| r[c]).sum::<f64>() / rows.len() as f64).collect()
}

fn summarize(config: &SimConfig, outcomes: &[ReplicateOutcome]) -> SimReport {
    let n = config.pool.len();
    let end: Vec<&[f64]> = outcomes.iter().map(|o| o.end_free.as_slice()).collect();
    let obs: Vec<&[f64]> = outcomes.iter().map(|o| o.observed_free.as_slice()).collect();
    let sq: Vec<&[f64]> = outcomes.iter().map(|o| o.second_quarter.as_slice()).collect();
    let sh: Vec<&[f64]> = outcomes.iter().map(|o| o.second_half.as_slice()).collect();
    let (sq, sh) = (column_mean(&sq, n), column_mean(&sh, n));
    let stationarity_gap = sq.iter().zip(&sh).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let bg: Vec<f64> = outcomes.iter().map(|o| o.background).collect();

    let per_strategy: Vec<Vec<f64>> =
        (0..config.candidate_strategies.len()).map(|i| outcomes.iter().map(|o| o.strategies[i]).collect()).collect();
    let estimates: Vec<Estimate> = per_strategy.iter().map(|xs| Estimate::from_samples(xs)).collect();
    let best = (0..estimates.len()).fold(None, |best: Option<usize>, i| match best {
        Some(b) if estimates[b].mean >= estimates[i].mean => Some(b),
        _ => Some(i),
    });
    let strategy_utilities = config
        .candidate_strategies
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let in_best_band = best.is_some_and(|b| {
                let diffs: Vec<f64> = per_strategy[b].iter().zip(&per_strategy[i]).map(|(x, y)| x - y).collect();
                let d = Estimate::from_samples(&diffs);
                d.mean <= 2.0 * d.stderr
            });
            StrategyScore { strategy: *s, mean_utility: estimates[i].mean, stderr: estimates[i].stderr, in_best_band }
        })
        .collect();
    SimReport {
        steady_free_prob: column_mean(&end, n),
        observed_free_prob: column_mean(&obs, n),
        stationarity_gap,
        background_utility: Estimate::from_samples(&bg),
        strategy_utilities,
        best_strategy: best.map(|b| config.candidate_strategies[b]),
    }
}

/// Follow-the-ranking plus every first-free and first-busy window.
pub fn window_family(n: usize) -> Vec<StrategySpec> {
    let mut out = vec![StrategySpec::FollowRanking];
    out.extend((1..=n).map(|k| StrategySpec::KFree { k }));
    out.extend((1..=n).map(|k| StrategySpec::KBusy { k }));
    out
}

/// Runs the market scoring every strategy in `family` (the full window family
/// when empty) and returns the scores ranked best first.
pub fn strategy_sweep(config: &SimConfig, family: &[StrategySpec]) -> Result<(SimReport, Vec<StrategyScore>)> {
    let mut config = config.clone();
    config.candidate_strategies = if family.is_empty() { window_family(config.pool.len()) } else { family.to_vec() };
    let report = run_sim(&config)?;
    let mut ranked = report.strategy_utilities.clone();
    ranked.sort_by(|a, b| b.mean_utility.total_cmp(&a.mean_utility));
    Ok((report, ranked))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(q: f64, background: StrategySpec) -> SimConfig {
        SimConfig {
            pool: CandidatePool::superstar(5, 5.0, 0.0, 0.3, 0.6, 2.0, 2.0).unwrap(),
            model: ModelSpec::PlackettLuce { beta: 3.0 },
            refresh_prob: q,
            background_strategy: background,
            candidate_strategies: vec![StrategySpec::FollowRanking, background],
            steps: 200,
            replicates: 8,
            seed: 5,
            burn_in_fraction: 0.1,
        }
    }

    #[test]
    fn full_refresh_means_everyone_observed_free() {
        let r = run_sim(&config(1.0, StrategySpec::KFree { k: 5 })).unwrap();
        assert!(r.observed_free_prob.iter().all(|p| *p == 1.0));
    }

    #[test]
    fn background_copy_matches_background_stream() {
        let r = run_sim(&config(0.4, StrategySpec::KFree { k: 5 })).unwrap();
        assert_eq!(r.strategy_utilities[1].mean_utility, r.background_utility.mean);
    }

    #[test]
    fn deterministic_for_a_seed() {
        let c = config(0.4, StrategySpec::KBusy { k: 3 });
        assert_eq!(run_sim(&c).unwrap(), run_sim(&c).unwrap());
    }

    #[test]
    fn rejects_bad_refresh() {
        assert!(run_sim(&config(0.0, StrategySpec::FollowRanking)).is_err());
    }
}
