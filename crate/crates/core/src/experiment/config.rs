//! Experiment configuration read from TOML.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pool::CandidatePool;
use crate::ranking_models::ModelSpec;
use crate::strategies::StrategySpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    StrategyMap,
    WelfareSweep,
    RegretCurve,
    MonotoneCheck,
    MarketSim,
    OracleDump,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::StrategyMap,
        ExperimentKind::WelfareSweep,
        ExperimentKind::RegretCurve,
        ExperimentKind::MonotoneCheck,
        ExperimentKind::MarketSim,
        ExperimentKind::OracleDump,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::StrategyMap => "strategy_map",
            ExperimentKind::WelfareSweep => "welfare_sweep",
            ExperimentKind::RegretCurve => "regret_curve",
            ExperimentKind::MonotoneCheck => "monotone_check",
            ExperimentKind::MarketSim => "market_sim",
            ExperimentKind::OracleDump => "oracle_dump",
        }
    }
}

impl std::str::FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment kind {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown output format {other:?}"))),
        }
    }
}

/// Either explicit per-candidate vectors or superstar shorthand.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoolSection {
    pub values: Option<Vec<f64>>,
    pub free_probs: Option<Vec<f64>>,
    pub busy_penalties: Option<Vec<f64>>,
    pub n: Option<usize>,
    pub v1: Option<f64>,
    pub v2: Option<f64>,
    pub p1: Option<f64>,
    pub p2: Option<f64>,
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    #[default]
    PlackettLuce,
    GaussianRum,
    Mallows,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(default)]
    pub kind: ModelKind,
    /// Plackett-Luce temperatures.
    pub beta_grid: Option<Vec<f64>>,
    /// Plackett-Luce accuracies `1/beta`, used when `beta_grid` is absent.
    pub inv_beta_grid: Option<Vec<f64>>,
    pub sigma_grid: Option<Vec<f64>>,
    pub phi_grid: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    /// Common busy penalty applied to every candidate.
    pub gamma: Option<Vec<f64>>,
    /// Window sizes for fixed-window strategies; defaults to `1..=n`.
    pub k: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    pub steps: Option<usize>,
    pub replicates: Option<usize>,
    pub refresh_prob: Option<f64>,
    pub background: Option<String>,
    pub strategies: Option<Vec<String>>,
    /// Monte Carlo draws for sampled quantities.
    pub samples: Option<usize>,
    pub burn_in_fraction: Option<f64>,
    /// Slack added to inversion comparisons, in standard errors for
    /// sampled tables.
    pub slack: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RngSection {
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<String>,
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub pool: PoolSection,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub sim: SimSection,
    #[serde(default)]
    pub rng: RngSection,
    #[serde(default)]
    pub output: OutputSection,
}

fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

/// A labelled point on the model-parameter grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelPoint {
    pub param_name: &'static str,
    pub param: f64,
    pub spec: ModelSpec,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.check()?;
        Ok(config)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Structural checks that do not need a run.
    pub fn check(&self) -> Result<()> {
        self.base_pool()?;
        let points = self.model_points()?;
        if points.is_empty() {
            return config_err("model grid is empty");
        }
        for p in &points {
            p.spec.validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        if self.gammas().is_empty() {
            return config_err("grid.gamma is empty");
        }
        if self.grid.k.as_ref().is_some_and(|k| k.is_empty()) {
            return config_err("grid.k is empty");
        }
        if self.is_stochastic() && self.rng.seed.is_none() {
            return config_err(format!("{} needs rng.seed", self.experiment.as_str()));
        }
        Ok(())
    }

    pub fn is_stochastic(&self) -> bool {
        self.experiment == ExperimentKind::MarketSim || self.model.kind == ModelKind::GaussianRum
    }

    pub fn seed(&self) -> u64 {
        self.rng.seed.unwrap_or(0)
    }

    pub fn format(&self) -> OutputFormat {
        self.output.format.unwrap_or_default()
    }

    /// Pool before any `grid.gamma` override.
    pub fn base_pool(&self) -> Result<CandidatePool> {
        let p = &self.pool;
        let wrap = |r: Result<CandidatePool>| r.map_err(|e| Error::Config(e.to_string()));
        if let Some(values) = &p.values {
            let n = values.len();
            let free = match (&p.free_probs, p.p1, p.p2) {
                (Some(f), _, _) => f.clone(),
                _ => return config_err("pool.values needs pool.free_probs"),
            };
            let gammas = match (&p.busy_penalties, p.gamma) {
                (Some(g), _) => g.clone(),
                (None, Some(g)) => vec![g; n],
                (None, None) => vec![1.0; n],
            };
            return wrap(CandidatePool::new(values.clone(), free, gammas));
        }
        match (p.n, p.v1, p.v2, p.p1, p.p2) {
            (Some(n), Some(v1), Some(v2), Some(p1), Some(p2)) => {
                let g = p.gamma.unwrap_or(1.0);
                wrap(CandidatePool::superstar(n, v1, v2, p1, p2, g, g))
            }
            _ => config_err("pool needs values/free_probs or n, v1, v2, p1, p2"),
        }
    }

    /// Busy penalties to sweep; the pool's own when `grid.gamma` is absent.
    pub fn gammas(&self) -> Vec<Option<f64>> {
        match &self.grid.gamma {
            Some(g) => g.iter().map(|&x| Some(x)).collect(),
            None => vec![None],
        }
    }

    pub fn pool_for(&self, gamma: Option<f64>) -> Result<CandidatePool> {
        let pool = self.base_pool()?;
        match gamma {
            Some(g) => pool.with_gamma(g).map_err(|e| Error::Config(e.to_string())),
            None => Ok(pool),
        }
    }

    pub fn window_sizes(&self, n: usize) -> Result<Vec<usize>> {
        let ks = self.grid.k.clone().unwrap_or_else(|| (1..=n).collect());
        if ks.iter().any(|&k| k == 0 || k > n) {
            return config_err(format!("grid.k entries must lie in 1..={n}"));
        }
        Ok(ks)
    }

    pub fn model_points(&self) -> Result<Vec<ModelPoint>> {
        let m = &self.model;
        Ok(match m.kind {
            ModelKind::PlackettLuce => {
                let betas = match (&m.beta_grid, &m.inv_beta_grid) {
                    (Some(b), _) => b.clone(),
                    (None, Some(inv)) => {
                        if inv.iter().any(|x| x.is_nan() || *x <= 0.0) {
                            return config_err("model.inv_beta_grid entries must be positive");
                        }
                        inv.iter().map(|x| 1.0 / x).collect()
                    }
                    (None, None) => return config_err("plackett_luce needs model.beta_grid"),
                };
                betas
                    .into_iter()
                    .map(|beta| ModelPoint { param_name: "beta", param: beta, spec: ModelSpec::PlackettLuce { beta } })
                    .collect()
            }
            ModelKind::GaussianRum => m
                .sigma_grid
                .clone()
                .ok_or_else(|| Error::Config("gaussian_rum needs model.sigma_grid".into()))?
                .into_iter()
                .map(|sigma| ModelPoint { param_name: "sigma", param: sigma, spec: ModelSpec::GaussianRum { sigma } })
                .collect(),
            ModelKind::Mallows => m
                .phi_grid
                .clone()
                .ok_or_else(|| Error::Config("mallows needs model.phi_grid".into()))?
                .into_iter()
                .map(|phi| ModelPoint { param_name: "phi", param: phi, spec: ModelSpec::Mallows { phi } })
                .collect(),
        })
    }

    pub fn sim_strategies(&self, n: usize) -> Result<Vec<StrategySpec>> {
        match &self.sim.strategies {
            Some(names) => names.iter().map(|s| parse_strategy(s, n)).collect(),
            None => Ok(crate::market_sim::window_family(n)),
        }
    }

    pub fn background(&self, n: usize) -> Result<StrategySpec> {
        match &self.sim.background {
            Some(name) => parse_strategy(name, n),
            None => Ok(StrategySpec::KFree { k: n }),
        }
    }
}

fn parse_strategy(name: &str, n: usize) -> Result<StrategySpec> {
    let s: StrategySpec = name.parse().map_err(|e: Error| Error::Config(e.to_string()))?;
    s.validate(n).map_err(|e| Error::Config(e.to_string()))?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
experiment = "strategy_map"
[pool]
n = 5
v1 = 1.0
v2 = 0.0
p1 = 0.1
p2 = 0.4
[model]
kind = "plackett_luce"
inv_beta_grid = [0.5, 1.0]
[grid]
gamma = [1.5, 2.0]
"#;

    #[test]
    fn parses_superstar_shorthand() {
        let c = ExperimentConfig::from_toml(BASE).unwrap();
        assert_eq!(c.experiment, ExperimentKind::StrategyMap);
        assert_eq!(c.base_pool().unwrap().len(), 5);
        let betas: Vec<f64> = c.model_points().unwrap().iter().map(|p| p.param).collect();
        assert_eq!(betas, vec![2.0, 1.0]);
        assert_eq!(c.pool_for(Some(2.0)).unwrap().busy_penalty(3), 2.0);
    }

    #[test]
    fn market_sim_needs_seed() {
        let text = BASE.replace("strategy_map", "market_sim");
        assert!(matches!(ExperimentConfig::from_toml(&text), Err(Error::Config(_))));
        let seeded = format!("{text}\n[rng]\nseed = 3\n");
        assert!(ExperimentConfig::from_toml(&seeded).is_ok());
    }

    #[test]
    fn rejects_unknown_keys_and_kinds() {
        assert!(ExperimentConfig::from_toml(&BASE.replace("v2 = 0.0", "v2 = 0.0\nbogus = 1")).is_err());
        assert!(ExperimentConfig::from_toml(&BASE.replace("strategy_map", "nope")).is_err());
        assert!("welfare_sweep".parse::<ExperimentKind>().is_ok());
    }

    #[test]
    fn explicit_vectors() {
        let text = r#"
experiment = "oracle_dump"
[pool]
values = [1.0, 0.5, 0.0]
free_probs = [0.1, 0.3, 0.5]
busy_penalties = [2.0, 2.0, 2.0]
[model]
beta_grid = [1.0]
"#;
        let c = ExperimentConfig::from_toml(text).unwrap();
        assert_eq!(c.base_pool().unwrap().values(), &[1.0, 0.5, 0.0]);
    }
}
