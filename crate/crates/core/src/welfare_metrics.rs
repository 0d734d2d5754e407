//! Welfare quantities: how often the pick is busy, how often the top-ranked
//! candidate is picked, and the firm's expected utility.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::pool::{CandidatePool, StatusVector};
use crate::posterior_oracle::{draw_market, oracle_policy, status_likelihood, Estimate, PolicyTable, POLICY_CAP};
use crate::ranking_models::{superstar_index_probs, ModelSpec, RankingDistribution, RankingSampler, SuperstarDistribution};
use crate::rng::stream_rng;
use crate::strategies::{strategy_as_policy, superstar_window, Direction, StrategySpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub p_picked_busy: f64,
    pub p_top_picked: f64,
    pub firm_utility: f64,
    /// Oracle utility minus `firm_utility`, when an oracle is available.
    pub regret_vs_oracle: Option<f64>,
    pub p_picked_busy_stderr: Option<f64>,
    pub p_top_picked_stderr: Option<f64>,
    pub firm_utility_stderr: Option<f64>,
    pub regret_stderr: Option<f64>,
}

/// Window direction and size of a fixed-window strategy.
fn window_of(strategy: &StrategySpec, n: usize) -> Result<(bool, usize)> {
    strategy.validate(n)?;
    match strategy {
        StrategySpec::FollowRanking => Ok((true, 1)),
        StrategySpec::KFree { k } => Ok((true, *k)),
        StrategySpec::KBusy { k } => Ok((false, *k)),
        other => invalid(format!("no closed form for {other}")),
    }
}

/// Probability that a fixed-window strategy picks a busy candidate in the
/// superstar setting.
pub fn p_picked_busy_closed(dist: &SuperstarDistribution, p1: f64, p2: f64, strategy: &StrategySpec) -> Result<f64> {
    let (free, k) = window_of(strategy, dist.n())?;
    let head = dist.prefix_mass(k);
    let km1 = (k - 1) as i32;
    Ok(if free {
        // Busy only if the whole window is busy.
        (1.0 - p2).powi(km1) * (head * (p2 - p1) + (1.0 - p2))
    } else {
        1.0 - p2.powi(km1) * (head * (p1 - p2) + p2)
    })
}

/// Probability that a fixed-window strategy picks the top-ranked candidate
/// in the superstar setting.
pub fn p_top_picked_closed(dist: &SuperstarDistribution, p1: f64, p2: f64, strategy: &StrategySpec) -> Result<f64> {
    let (free, k) = window_of(strategy, dist.n())?;
    let head = dist.prefix_mass(k);
    let top = dist.prob(0);
    let km1 = (k - 1) as i32;
    Ok(if free {
        p2 + (1.0 - p2).powi(k as i32) + (p2 - p1) * ((1.0 - p2).powi(km1) * head - top)
    } else {
        1.0 - p2 + p2.powi(k as i32) + (p2 - p1) * (top - p2.powi(km1) * head)
    })
}

/// Utility, busy-pick and top-pick probabilities of a policy by full
/// enumeration over rankings and status vectors.
pub fn policy_metrics(policy: &PolicyTable, dist: &RankingDistribution, pool: &CandidatePool) -> Result<(f64, f64, f64)> {
    let n = pool.len();
    let (mut utility, mut busy, mut top) = (0.0, 0.0, 0.0);
    for (p, perm) in dist.outcomes(pool)? {
        for s in StatusVector::all(n) {
            let w = p * status_likelihood(pool, &perm, &s);
            let a = policy.pick(&s).unwrap_or(0);
            utility += w * pool.utility(perm[a], s.is_free(a));
            if !s.is_free(a) {
                busy += w;
            }
            if a == 0 {
                top += w;
            }
        }
    }
    Ok((utility, busy, top))
}

pub fn metrics_exact(strategy: &StrategySpec, dist: &RankingDistribution, pool: &CandidatePool) -> Result<MetricsRecord> {
    let policy = strategy_as_policy(strategy, pool, dist)?;
    let (firm_utility, p_picked_busy, p_top_picked) = policy_metrics(&policy, dist, pool)?;
    let oracle = oracle_policy(dist, pool)?;
    let (oracle_utility, _, _) = policy_metrics(&oracle, dist, pool)?;
    Ok(MetricsRecord {
        p_picked_busy,
        p_top_picked,
        firm_utility,
        regret_vs_oracle: Some(oracle_utility - firm_utility),
        p_picked_busy_stderr: None,
        p_top_picked_stderr: None,
        firm_utility_stderr: None,
        regret_stderr: None,
    })
}

pub(crate) type Picker = Box<dyn Fn(&StatusVector) -> usize + Sync>;

pub(crate) fn picker(strategy: &StrategySpec, pool: &CandidatePool, dist: Option<&RankingDistribution>) -> Result<Picker> {
    strategy.validate(pool.len())?;
    if strategy.simple_pick(&StatusVector::new(vec![true; pool.len()])).is_some() {
        let s = *strategy;
        return Ok(Box::new(move |status| s.simple_pick(status).unwrap()));
    }
    let Some(dist) = dist else {
        return invalid(format!("{strategy} needs an exact ranking distribution"));
    };
    let table = strategy_as_policy(strategy, pool, dist)?;
    Ok(Box::new(move |status| table.pick(status).unwrap_or(0)))
}

/// Monte Carlo metrics from `samples` draws of ranking and status.
///
/// The regret is estimated on the same draws as the strategy (paired) when
/// an exact distribution exists for the model and `n <= 12`.
pub fn metrics_mc(strategy: &StrategySpec, spec: &ModelSpec, pool: &CandidatePool, samples: usize, seed: u64) -> Result<MetricsRecord> {
    if samples == 0 {
        return invalid("samples must be positive");
    }
    let exact = if pool.len() <= POLICY_CAP { spec.distribution(pool).ok() } else { None };
    let pick = picker(strategy, pool, exact.as_ref())?;
    let oracle = match &exact {
        Some(d) => Some(oracle_policy(d, pool)?),
        None => None,
    };
    let sampler = RankingSampler::new(spec, pool)?;
    let mut rng = stream_rng(seed, 0);
    let (mut u, mut busy, mut top, mut regret) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for _ in 0..samples {
        let (perm, s) = draw_market(&sampler, pool, &mut rng);
        let a = pick(&s);
        let ua = pool.utility(perm[a], s.is_free(a));
        u.push(ua);
        busy.push(f64::from(!s.is_free(a)));
        top.push(f64::from(a == 0));
        if let Some(o) = &oracle {
            let b = o.pick(&s).unwrap_or(0);
            regret.push(pool.utility(perm[b], s.is_free(b)) - ua);
        }
    }
    let (eu, eb, et) = (Estimate::from_samples(&u), Estimate::from_samples(&busy), Estimate::from_samples(&top));
    let er = (!regret.is_empty()).then(|| Estimate::from_samples(&regret));
    Ok(MetricsRecord {
        p_picked_busy: eb.mean,
        p_top_picked: et.mean,
        firm_utility: eu.mean,
        regret_vs_oracle: er.map(|e| e.mean),
        p_picked_busy_stderr: Some(eb.stderr),
        p_top_picked_stderr: Some(et.stderr),
        firm_utility_stderr: Some(eu.stderr),
        regret_stderr: er.map(|e| e.stderr),
    })
}

/// Strategy followed at each point of an accuracy sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StrategyRule {
    /// Bayes-optimal pick per status vector.
    Oracle,
    /// The window strategy recomputed at every noise level.
    SuperstarWindow,
    Fixed { strategy: StrategySpec },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionRow {
    pub beta: f64,
    pub direction: Direction,
    pub window_jstar: usize,
    pub strategy: String,
    /// Closed forms, when the strategy is a fixed-window one.
    pub p_picked_busy_closed: Option<f64>,
    pub p_top_picked_closed: Option<f64>,
    pub p_picked_busy: f64,
    pub p_top_picked: f64,
    pub firm_utility: f64,
    pub oracle_utility: f64,
    pub regret_vs_oracle: f64,
}

/// Steps between consecutive grid points where a metric rose or fell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricTrend {
    pub metric: String,
    pub rises: Vec<usize>,
    pub falls: Vec<usize>,
}

impl MetricTrend {
    fn from_column(metric: &str, xs: &[f64], tol: f64) -> Self {
        let mut rises = Vec::new();
        let mut falls = Vec::new();
        for (t, w) in xs.windows(2).enumerate() {
            if w[1] > w[0] + tol {
                rises.push(t);
            } else if w[1] < w[0] - tol {
                falls.push(t);
            }
        }
        Self { metric: metric.to_string(), rises, falls }
    }

    pub fn nondecreasing(&self) -> bool {
        self.falls.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionReport {
    pub rows: Vec<DirectionRow>,
    pub trends: Vec<MetricTrend>,
}

impl DirectionReport {
    pub fn trend(&self, metric: &str) -> Option<&MetricTrend> {
        self.trends.iter().find(|t| t.metric == metric)
    }
}

/// Metrics along a descending `beta` grid (increasing accuracy) for a
/// superstar pool, with rises and falls of every column flagged.
pub fn accuracy_direction_report(pool: &CandidatePool, beta_grid: &[f64], rule: StrategyRule) -> Result<DirectionReport> {
    if !pool.is_superstar() {
        return invalid("accuracy sweeps need a superstar pool");
    }
    if beta_grid.is_empty() || beta_grid.windows(2).any(|w| w[1] >= w[0]) {
        return invalid("beta grid must be nonempty and strictly descending");
    }
    let n = pool.len();
    let (p1, p2) = (pool.free_prob(0), pool.free_prob(1));
    let mut rows = Vec::with_capacity(beta_grid.len());
    for &beta in beta_grid {
        let sd = superstar_index_probs(pool.value(0), pool.value(1), n, beta)?;
        let window = superstar_window(pool, &sd)?;
        let dist = RankingDistribution::Superstar(sd.clone());
        let strategy = match rule {
            StrategyRule::Oracle => StrategySpec::OraclePolicyRef,
            StrategyRule::SuperstarWindow => match window.direction {
                Direction::FirstFree => StrategySpec::KFree { k: window.window_jstar },
                Direction::FirstBusy => StrategySpec::KBusy { k: window.window_jstar },
            },
            StrategyRule::Fixed { strategy } => strategy,
        };
        let policy = strategy_as_policy(&strategy, pool, &dist)?;
        let (firm_utility, p_picked_busy, p_top_picked) = policy_metrics(&policy, &dist, pool)?;
        let (oracle_utility, _, _) = policy_metrics(&oracle_policy(&dist, pool)?, &dist, pool)?;
        rows.push(DirectionRow {
            beta,
            direction: window.direction,
            window_jstar: window.window_jstar,
            strategy: strategy.to_string(),
            p_picked_busy_closed: p_picked_busy_closed(&sd, p1, p2, &strategy).ok(),
            p_top_picked_closed: p_top_picked_closed(&sd, p1, p2, &strategy).ok(),
            p_picked_busy,
            p_top_picked,
            firm_utility,
            oracle_utility,
            regret_vs_oracle: oracle_utility - firm_utility,
        });
    }
    let col = |f: fn(&DirectionRow) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
    let tol = 1e-12;
    let trends = vec![
        MetricTrend::from_column("p_picked_busy", &col(|r| r.p_picked_busy), tol),
        MetricTrend::from_column("p_top_picked", &col(|r| r.p_top_picked), tol),
        MetricTrend::from_column("firm_utility", &col(|r| r.firm_utility), tol),
        MetricTrend::from_column("oracle_utility", &col(|r| r.oracle_utility), tol),
        MetricTrend::from_column("window_jstar", &col(|r| r.window_jstar as f64), 0.0),
    ];
    Ok(DirectionReport { rows, trends })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn fixture() -> (SuperstarDistribution, CandidatePool) {
        let d = superstar_index_probs(1.0, 0.0, 3, 1.0).unwrap();
        let pool = CandidatePool::superstar(3, 1.0, 0.0, 0.2, 0.5, 2.0, 2.0).unwrap();
        (d, pool)
    }

    #[test]
    fn window_of_one_coincides() {
        let (d, _) = fixture();
        let expected = 1.0 - 0.5 + d.prob(0) * (0.5 - 0.2);
        for s in [StrategySpec::KFree { k: 1 }, StrategySpec::KBusy { k: 1 }] {
            assert_abs_diff_eq!(p_picked_busy_closed(&d, 0.2, 0.5, &s).unwrap(), expected, epsilon = 1e-15);
            assert_abs_diff_eq!(p_top_picked_closed(&d, 0.2, 0.5, &s).unwrap(), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn closed_forms_at_window_two() {
        let (d, pool) = fixture();
        let dist = RankingDistribution::Superstar(d.clone());
        for s in [StrategySpec::KFree { k: 2 }, StrategySpec::KBusy { k: 2 }] {
            let m = metrics_exact(&s, &dist, &pool).unwrap();
            assert_abs_diff_eq!(p_picked_busy_closed(&d, 0.2, 0.5, &s).unwrap(), m.p_picked_busy, epsilon = 1e-12);
            assert_abs_diff_eq!(p_top_picked_closed(&d, 0.2, 0.5, &s).unwrap(), m.p_top_picked, epsilon = 1e-12);
        }
    }

    #[test]
    fn uniform_without_status_signal() {
        let d = SuperstarDistribution::uniform(4);
        let got = p_top_picked_closed(&d, 0.3, 0.3, &StrategySpec::KFree { k: 3 }).unwrap();
        assert_abs_diff_eq!(got, 0.3 + 0.7f64.powi(3), epsilon = 1e-15);
    }

    #[test]
    fn oracle_has_no_regret() {
        let (d, pool) = fixture();
        let m = metrics_exact(&StrategySpec::OraclePolicyRef, &RankingDistribution::Superstar(d), &pool).unwrap();
        assert_abs_diff_eq!(m.regret_vs_oracle.unwrap(), 0.0, epsilon = 1e-15);
    }
}
