//! One function per experiment kind, each producing a row table.

use rayon::prelude::*;
use serde_json::{json, Value};

use super::config::{ExperimentConfig, ExperimentKind, ModelPoint};
use super::output::{Cell, Table};
use crate::error::{Error, Result};
use crate::market_sim::{strategy_sweep, SimConfig};
use crate::pool::{CandidatePool, StatusVector};
use crate::posterior_oracle::{all_posterior_reports, status_regrets, POLICY_CAP};
use crate::ranking_models::{gaussian_rum_table, is_inversion_monotone, ModelSpec, RankingDistribution};
use crate::strategies::{strategy_as_policy, superstar_error_bound, superstar_window, StrategySpec, VoteMode};
use crate::welfare_metrics::{metrics_exact, metrics_mc, p_picked_busy_closed, p_top_picked_closed, MetricsRecord};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub table: Table,
    /// Invariant violations found while building the rows.
    pub flags: Vec<String>,
    /// Kind-specific extras for the summary.
    pub details: Value,
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.check()?;
    let mut out = match config.experiment {
        ExperimentKind::StrategyMap => strategy_map(config)?,
        ExperimentKind::WelfareSweep => welfare_sweep(config)?,
        ExperimentKind::RegretCurve => regret_curve(config)?,
        ExperimentKind::MonotoneCheck => monotone_check(config)?,
        ExperimentKind::MarketSim => market_sim(config)?,
        ExperimentKind::OracleDump => oracle_dump(config)?,
    };
    check_ranges(&mut out);
    Ok(out)
}

/// Every `p_*` column in [0, 1] and every regret at least -1e-9.
fn check_ranges(out: &mut ExperimentOutput) {
    for (c, name) in out.table.columns.iter().enumerate() {
        let is_prob = name.starts_with("p_") && !name.ends_with("_stderr") || name.ends_with("_free_prob");
        let is_regret = name.contains("regret") && !name.ends_with("_stderr");
        for (r, row) in out.table.rows.iter().enumerate() {
            let Some(x) = row[c].as_f64() else { continue };
            if x.is_nan() {
                continue;
            }
            if is_prob && !(-1e-12..=1.0 + 1e-12).contains(&x) {
                out.flags.push(format!("row {r}: {name} = {x} outside [0, 1]"));
            }
            if is_regret && x < -1e-9 {
                out.flags.push(format!("row {r}: {name} = {x} is negative"));
            }
        }
    }
}

/// Grid points in output order: busy penalty outermost, model parameter inner.
fn grid(config: &ExperimentConfig) -> Result<Vec<(f64, CandidatePool, ModelPoint)>> {
    let points = config.model_points()?;
    let mut out = Vec::new();
    for g in config.gammas() {
        let pool = config.pool_for(g)?;
        let gamma = g.unwrap_or_else(|| pool.busy_penalty(0));
        for p in &points {
            out.push((gamma, pool.clone(), p.clone()));
        }
    }
    Ok(out)
}

/// Seed for the `index`-th grid point, so points draw independent streams.
fn point_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add((index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn samples(config: &ExperimentConfig) -> usize {
    config.sim.samples.unwrap_or(100_000)
}

fn exact(point: &ModelPoint, pool: &CandidatePool) -> Result<RankingDistribution> {
    let n = pool.len();
    if n > POLICY_CAP {
        return Err(Error::Capacity { n, cap: POLICY_CAP });
    }
    point.spec.distribution(pool)
}

fn strategy_map(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let mut table = Table::new(&[
        "gamma",
        "model",
        "param",
        "ratio_r",
        "threshold_r",
        "direction",
        "ratio_limit",
        "window_jstar",
    ]);
    for (gamma, pool, point) in grid(config)? {
        let dist = exact(&point, &pool)?.superstar_view()?;
        let w = superstar_window(&pool, &dist)?;
        table.push(vec![
            gamma.into(),
            point.param_name.into(),
            point.param.into(),
            w.ratio_r.into(),
            w.threshold_r.into(),
            w.direction.as_str().into(),
            w.ratio_limit.into(),
            w.window_jstar.into(),
        ]);
    }
    Ok(ExperimentOutput { table, flags: Vec::new(), details: Value::Null })
}

fn opt(x: Option<f64>) -> Cell {
    Cell::Float(x.unwrap_or(f64::NAN))
}

fn metrics_cells(m: &MetricsRecord) -> Vec<Cell> {
    vec![
        m.p_picked_busy.into(),
        m.p_top_picked.into(),
        m.firm_utility.into(),
        opt(m.regret_vs_oracle),
        opt(m.p_picked_busy_stderr),
        opt(m.p_top_picked_stderr),
        opt(m.firm_utility_stderr),
    ]
}

const METRIC_COLUMNS: [&str; 7] = [
    "p_picked_busy",
    "p_top_picked",
    "firm_utility",
    "regret_vs_oracle",
    "p_picked_busy_stderr",
    "p_top_picked_stderr",
    "firm_utility_stderr",
];

fn columns(head: &[&'static str], tail: &[&'static str]) -> Vec<&'static str> {
    head.iter().chain(METRIC_COLUMNS.iter()).chain(tail).copied().collect()
}

fn welfare_sweep(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let mut table = Table::new(&columns(
        &["gamma", "model", "param", "strategy", "k"],
        &["p_picked_busy_closed", "p_top_picked_closed"],
    ));
    let mut flags = Vec::new();
    for (index, (gamma, pool, point)) in grid(config)?.into_iter().enumerate() {
        let ks = config.window_sizes(pool.len())?;
        let family: Vec<StrategySpec> = ks
            .iter()
            .map(|&k| StrategySpec::KFree { k })
            .chain(ks.iter().map(|&k| StrategySpec::KBusy { k }))
            .collect();
        let dist = match &point.spec {
            ModelSpec::GaussianRum { .. } => None,
            _ => Some(exact(&point, &pool)?),
        };
        let superstar = match &dist {
            Some(RankingDistribution::Superstar(d)) => Some(d.clone()),
            _ => None,
        };
        let rows = family
            .par_iter()
            .map(|s| {
                let m = match &dist {
                    Some(d) => metrics_exact(s, d, &pool)?,
                    None => metrics_mc(s, &point.spec, &pool, samples(config), point_seed(config.seed(), index))?,
                };
                let closed = match &superstar {
                    Some(d) => {
                        let (p1, p2) = (pool.free_prob(0), pool.free_prob(1));
                        (Some(p_picked_busy_closed(d, p1, p2, s)?), Some(p_top_picked_closed(d, p1, p2, s)?))
                    }
                    None => (None, None),
                };
                Ok((*s, m, closed))
            })
            .collect::<Result<Vec<_>>>()?;
        for (s, m, (busy, top)) in rows {
            if let (Some(b), Some(t)) = (busy, top) {
                if (b - m.p_picked_busy).abs() > 1e-9 || (t - m.p_top_picked).abs() > 1e-9 {
                    flags.push(format!("gamma {gamma}, {} {}: closed form differs from enumeration", point.param, s));
                }
            }
            let (family, k) = match s {
                StrategySpec::KFree { k } => ("kfree", k),
                StrategySpec::KBusy { k } => ("kbusy", k),
                _ => unreachable!("welfare sweeps use fixed windows"),
            };
            let mut row: Vec<Cell> =
                vec![gamma.into(), point.param_name.into(), point.param.into(), family.into(), k.into()];
            row.extend(metrics_cells(&m));
            row.extend([opt(busy), opt(top)]);
            table.push(row);
        }
    }
    Ok(ExperimentOutput { table, flags, details: Value::Null })
}

fn regret_curve(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let mut table = Table::new(&columns(
        &["gamma", "model", "param", "strategy"],
        &["oracle_utility", "max_status_regret", "expected_bound", "bound_violations"],
    ));
    let mut flags = Vec::new();
    for (gamma, pool, point) in grid(config)? {
        let dist = exact(&point, &pool)?;
        let superstar = pool.is_superstar();
        let mut strategies = vec![StrategySpec::FollowRanking];
        if superstar {
            strategies.push(StrategySpec::SuperstarAlgo);
        }
        strategies.push(StrategySpec::PairwiseVoteAlgo { vote_mode: VoteMode::Magnitude });
        strategies.push(StrategySpec::PairwiseVoteAlgo { vote_mode: VoteMode::Count });
        for s in strategies {
            let m = metrics_exact(&s, &dist, &pool)?;
            let policy = strategy_as_policy(&s, &pool, &dist)?;
            let regrets = status_regrets(&policy, &dist, &pool)?;
            let max_regret = regrets.iter().flatten().map(|r| r.0).fold(0.0, f64::max);
            let (expected_bound, violations) = if s == StrategySpec::SuperstarAlgo {
                let sd = dist.superstar_view()?;
                let mut expected = 0.0;
                let mut violations = 0usize;
                for (mask, r) in regrets.iter().enumerate() {
                    let Some((regret, prob)) = r else { continue };
                    let st = StatusVector::from_mask(mask, pool.len());
                    let j = st.first_different().unwrap_or(pool.len() - 1);
                    let bound = superstar_error_bound(&pool, &sd, j)?.bound_value;
                    expected += prob * bound;
                    if *regret > bound + 1e-9 {
                        violations += 1;
                    }
                }
                if violations > 0 {
                    flags.push(format!("gamma {gamma}, {} {}: {violations} status vectors exceed the window bound", point.param_name, point.param));
                }
                (Some(expected), Cell::from(violations))
            } else {
                (None, Cell::Int(0))
            };
            let oracle = m.firm_utility + m.regret_vs_oracle.unwrap_or(0.0);
            let mut row: Vec<Cell> = vec![gamma.into(), point.param_name.into(), point.param.into(), s.to_string().into()];
            row.extend(metrics_cells(&m));
            row.extend([oracle.into(), max_regret.into(), opt(expected_bound), violations]);
            table.push(row);
        }
    }
    Ok(ExperimentOutput { table, flags, details: Value::Null })
}

fn monotone_check(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let mut table = Table::new(&["gamma", "model", "param", "monotone", "violations", "worst_gap", "slack"]);
    let mut flags = Vec::new();
    for (index, (gamma, pool, point)) in grid(config)?.into_iter().enumerate() {
        let (tab, slack) = match &point.spec {
            ModelSpec::GaussianRum { sigma } => {
                let t = gaussian_rum_table(&pool, *sigma, samples(config), point_seed(config.seed(), index))?;
                let slack = config.sim.slack.unwrap_or(4.0) * t.max_stderr();
                (t, slack)
            }
            spec => (spec.exact_table(&pool)?, config.sim.slack.unwrap_or(0.0)),
        };
        let report = is_inversion_monotone(&tab, &pool, slack)?;
        let worst = report.violations.iter().map(|v| v.swapped_prob - v.prob).fold(0.0, f64::max);
        if !report.monotone {
            flags.push(format!("{} {}: {} inversion violations", point.param_name, point.param, report.violations.len()));
        }
        table.push(vec![
            gamma.into(),
            point.param_name.into(),
            point.param.into(),
            report.monotone.into(),
            report.violations.len().into(),
            worst.into(),
            slack.into(),
        ]);
    }
    Ok(ExperimentOutput { table, flags, details: Value::Null })
}

fn market_sim(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let mut table = Table::new(&[
        "gamma",
        "model",
        "param",
        "strategy",
        "mean_utility",
        "stderr",
        "in_best_band",
        "is_best",
        "steady_free_prob_top",
        "steady_free_prob_bottom",
        "observed_free_prob_top",
        "observed_free_prob_bottom",
        "stationarity_gap",
    ]);
    let mut flags = Vec::new();
    let mut details = Vec::new();
    for (gamma, pool, point) in grid(config)? {
        let n = pool.len();
        let sim = SimConfig {
            pool: pool.clone(),
            model: point.spec.clone(),
            refresh_prob: config.sim.refresh_prob.unwrap_or(0.4),
            background_strategy: config.background(n)?,
            candidate_strategies: Vec::new(),
            steps: config.sim.steps.unwrap_or(2000),
            replicates: config.sim.replicates.unwrap_or(200),
            seed: config.seed(),
            burn_in_fraction: config.sim.burn_in_fraction.unwrap_or(0.1),
        };
        sim.validate().map_err(|e| Error::Config(e.to_string()))?;
        let (report, _) = strategy_sweep(&sim, &config.sim_strategies(n)?)?;
        if report.stationarity_gap >= 0.02 {
            flags.push(format!("gamma {gamma}: stationarity gap {:.4}", report.stationarity_gap));
        }
        let (top, bottom) = (0, n - 1);
        for s in &report.strategy_utilities {
            table.push(vec![
                gamma.into(),
                point.param_name.into(),
                point.param.into(),
                s.strategy.to_string().into(),
                s.mean_utility.into(),
                s.stderr.into(),
                s.in_best_band.into(),
                (report.best_strategy == Some(s.strategy)).into(),
                report.steady_free_prob[top].into(),
                report.steady_free_prob[bottom].into(),
                report.observed_free_prob[top].into(),
                report.observed_free_prob[bottom].into(),
                report.stationarity_gap.into(),
            ]);
        }
        details.push(json!({
            "gamma": gamma,
            point.param_name: point.param,
            "steady_free_prob": report.steady_free_prob,
            "observed_free_prob": report.observed_free_prob,
            "best_strategy": report.best_strategy.map(|s| s.to_string()),
            "best_band": report.best_band().iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        }));
    }
    Ok(ExperimentOutput { table, flags, details: Value::Array(details) })
}

fn oracle_dump(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let mut table = Table::new(&[
        "gamma",
        "model",
        "param",
        "status",
        "status_prob",
        "best_index",
        "best_expected_utility",
        "expected_utilities",
    ]);
    for (gamma, pool, point) in grid(config)? {
        let dist = exact(&point, &pool)?;
        for (mask, report) in all_posterior_reports(&dist, &pool)?.into_iter().enumerate() {
            let Some(r) = report else { continue };
            let s = StatusVector::from_mask(mask, pool.len());
            let utilities: Vec<String> = r.expected_utilities.iter().map(|u| Cell::Float(*u).to_text()).collect();
            table.push(vec![
                gamma.into(),
                point.param_name.into(),
                point.param.into(),
                s.to_bit_string().into(),
                r.status_prob.into(),
                r.best_index.into(),
                r.expected_utilities[r.best_index].into(),
                utilities.join(";").into(),
            ]);
        }
    }
    Ok(ExperimentOutput { table, flags: Vec::new(), details: Value::Null })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(kind: &str, extra: &str) -> ExperimentConfig {
        let text = format!(
            r#"
experiment = "{kind}"
[pool]
n = 4
v1 = 1.0
v2 = 0.0
p1 = 0.1
p2 = 0.4
gamma = 2.0
[model]
beta_grid = [2.0, 1.0, 0.5]
[rng]
seed = 7
{extra}
"#
        );
        ExperimentConfig::from_toml(&text).unwrap()
    }

    #[test]
    fn every_kind_runs_without_flags() {
        for kind in ExperimentKind::ALL {
            let extra = if kind == ExperimentKind::MarketSim { "[sim]\nsteps = 2000\nreplicates = 40" } else { "" };
            let out = run_experiment(&config(kind.as_str(), extra)).unwrap();
            assert!(!out.table.is_empty(), "{}", kind.as_str());
            assert!(out.flags.is_empty(), "{}: {:?}", kind.as_str(), out.flags);
        }
    }

    #[test]
    fn welfare_rows_cover_both_families() {
        let out = run_experiment(&config("welfare_sweep", "")).unwrap();
        assert_eq!(out.table.len(), 3 * 2 * 4);
    }

    #[test]
    fn zero_low_value_means_zero_regret() {
        let out = run_experiment(&config("regret_curve", "")).unwrap();
        let strategies = out.table.column("strategy").unwrap();
        let regrets = out.table.column("regret_vs_oracle").unwrap();
        for (s, r) in strategies.iter().zip(regrets) {
            if **s == Cell::from("superstar_algo") {
                assert!(r.as_f64().unwrap().abs() < 1e-9);
            }
        }
    }

    #[test]
    fn over_cap_is_capacity_error() {
        let c = config("oracle_dump", "").clone();
        let mut c = c;
        c.pool.n = Some(13);
        assert!(matches!(run_experiment(&c), Err(Error::Capacity { .. })));
    }
}
