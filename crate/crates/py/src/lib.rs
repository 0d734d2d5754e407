//! Python bindings. Structured results come back as plain dicts and lists.

use pyo3::exceptions::{PyMemoryError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyAny;
use serde::Serialize;

use ranksel_core::experiment::{render, run_experiment as run_core_experiment, write_output, ExperimentConfig};
use ranksel_core::market_sim::{self, SimConfig};
use ranksel_core::posterior_oracle::{self, policy_expected_utility};
use ranksel_core::ranking_models::{self, ModelSpec};
use ranksel_core::strategies::{self, StrategySpec};
use ranksel_core::{welfare_metrics, Error, StatusVector};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Capacity { .. } => PyMemoryError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// Serializes through JSON into native Python objects.
fn to_object<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn parse_strategy(name: &str) -> PyResult<StrategySpec> {
    name.parse().map_err(to_py)
}

fn model_spec(kind: &str, param: f64) -> PyResult<ModelSpec> {
    let spec = match kind {
        "plackett_luce" => ModelSpec::PlackettLuce { beta: param },
        "gaussian_rum" => ModelSpec::GaussianRum { sigma: param },
        "mallows" => ModelSpec::Mallows { phi: param },
        other => return Err(PyValueError::new_err(format!("unknown model kind {other:?}"))),
    };
    spec.validate().map_err(to_py)?;
    Ok(spec)
}

/// Candidates with values, free probabilities and busy penalties, sorted by
/// value from the top.
#[pyclass(frozen, module = "ranksel")]
struct CandidatePool {
    inner: ranksel_core::CandidatePool,
}

#[pymethods]
impl CandidatePool {
    #[new]
    fn new(values: Vec<f64>, free_probs: Vec<f64>, busy_penalties: Vec<f64>) -> PyResult<Self> {
        let inner = ranksel_core::CandidatePool::new(values, free_probs, busy_penalties).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (n, v1, v2, p1, p2, gamma1, gamma2=None))]
    fn superstar(n: usize, v1: f64, v2: f64, p1: f64, p2: f64, gamma1: f64, gamma2: Option<f64>) -> PyResult<Self> {
        let inner = ranksel_core::CandidatePool::superstar(n, v1, v2, p1, p2, gamma1, gamma2.unwrap_or(gamma1))
            .map_err(to_py)?;
        Ok(Self { inner })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    #[getter]
    fn free_probs(&self) -> Vec<f64> {
        self.inner.free_probs().to_vec()
    }

    #[getter]
    fn busy_penalties(&self) -> Vec<f64> {
        self.inner.busy_penalties().to_vec()
    }

    fn is_superstar(&self) -> bool {
        self.inner.is_superstar()
    }

    fn free_busy_ratio(&self) -> f64 {
        self.inner.free_busy_ratio()
    }

    fn __repr__(&self) -> String {
        format!(
            "CandidatePool(values={:?}, free_probs={:?}, busy_penalties={:?})",
            self.inner.values(),
            self.inner.free_probs(),
            self.inner.busy_penalties()
        )
    }
}

/// A ranking model bound to a pool, with its exact distribution when one
/// exists.
#[pyclass(frozen, module = "ranksel")]
struct RankingModel {
    spec: ModelSpec,
    pool: ranksel_core::CandidatePool,
}

impl RankingModel {
    fn distribution(&self) -> PyResult<ranksel_core::RankingDistribution> {
        self.spec.distribution(&self.pool).map_err(to_py)
    }
}

#[pymethods]
impl RankingModel {
    /// `kind` is one of plackett_luce, gaussian_rum or mallows; `param` is
    /// beta, sigma or phi respectively.
    #[new]
    fn new(pool: &CandidatePool, kind: &str, param: f64) -> PyResult<Self> {
        Ok(Self { spec: model_spec(kind, param)?, pool: pool.inner.clone() })
    }

    fn perm_prob(&self, perm: Vec<usize>) -> PyResult<f64> {
        if !ranksel_core::perm::is_bijection(&perm, self.pool.len()) {
            return Err(PyValueError::new_err("not a permutation"));
        }
        Ok(self.distribution()?.perm_prob(&perm))
    }

    fn superstar_index_probs(&self) -> PyResult<Vec<f64>> {
        Ok(self.distribution()?.superstar_view().map_err(to_py)?.index_probs().to_vec())
    }

    fn sample(&self, seed: u64) -> PyResult<Vec<usize>> {
        ranking_models::sample_ranking(&self.spec, &self.pool, seed).map_err(to_py)
    }

    /// Direction and window of the superstar rule.
    fn superstar_window<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let dist = self.distribution()?.superstar_view().map_err(to_py)?;
        to_object(py, &strategies::superstar_window(&self.pool, &dist).map_err(to_py)?)
    }

    /// Posterior expectations for a status vector of 0/1 per position.
    fn posterior<'py>(&self, py: Python<'py>, status: Vec<u8>) -> PyResult<Bound<'py, PyAny>> {
        let s = StatusVector::from_ints(&status);
        to_object(py, &posterior_oracle::posterior_report(&self.distribution()?, &self.pool, &s).map_err(to_py)?)
    }

    /// Oracle pick per status vector, indexed by bit mask (bit `a` set when
    /// position `a` is free). `None` for unreachable vectors.
    fn oracle_policy(&self) -> PyResult<Vec<Option<usize>>> {
        let policy = posterior_oracle::oracle_policy(&self.distribution()?, &self.pool).map_err(to_py)?;
        Ok(policy.picks().to_vec())
    }

    fn pick(&self, strategy: &str, status: Vec<u8>) -> PyResult<Option<usize>> {
        let dist = self.distribution()?;
        let policy = strategies::strategy_as_policy(&parse_strategy(strategy)?, &self.pool, &dist).map_err(to_py)?;
        Ok(policy.pick(&StatusVector::from_ints(&status)))
    }

    fn expected_utility(&self, strategy: &str) -> PyResult<f64> {
        let dist = self.distribution()?;
        let policy = strategies::strategy_as_policy(&parse_strategy(strategy)?, &self.pool, &dist).map_err(to_py)?;
        policy_expected_utility(&policy, &dist, &self.pool).map_err(to_py)
    }

    fn metrics<'py>(&self, py: Python<'py>, strategy: &str) -> PyResult<Bound<'py, PyAny>> {
        let record =
            welfare_metrics::metrics_exact(&parse_strategy(strategy)?, &self.distribution()?, &self.pool).map_err(to_py)?;
        to_object(py, &record)
    }

    fn metrics_mc<'py>(&self, py: Python<'py>, strategy: &str, samples: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let record = welfare_metrics::metrics_mc(&parse_strategy(strategy)?, &self.spec, &self.pool, samples, seed)
            .map_err(to_py)?;
        to_object(py, &record)
    }

    fn __repr__(&self) -> String {
        format!("RankingModel({:?}, n={})", self.spec, self.pool.len())
    }
}

/// Superstar index probabilities under Plackett-Luce.
#[pyfunction]
fn superstar_index_probs(v1: f64, v2: f64, n: usize, beta: f64) -> PyResult<Vec<f64>> {
    Ok(ranking_models::superstar_index_probs(v1, v2, n, beta).map_err(to_py)?.index_probs().to_vec())
}

/// Runs the repeated market and scores each named strategy.
#[pyfunction]
#[pyo3(signature = (pool, beta, refresh_prob, background, strategies, steps, replicates, seed))]
#[allow(clippy::too_many_arguments)]
fn run_sim<'py>(
    py: Python<'py>,
    pool: &CandidatePool,
    beta: f64,
    refresh_prob: f64,
    background: &str,
    strategies: Vec<String>,
    steps: usize,
    replicates: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let candidate_strategies = strategies.iter().map(|s| parse_strategy(s)).collect::<PyResult<Vec<_>>>()?;
    let config = SimConfig {
        pool: pool.inner.clone(),
        model: model_spec("plackett_luce", beta)?,
        refresh_prob,
        background_strategy: parse_strategy(background)?,
        candidate_strategies,
        steps,
        replicates,
        seed,
        burn_in_fraction: 0.1,
    };
    let report = py.detach(|| market_sim::run_sim(&config)).map_err(to_py)?;
    to_object(py, &report)
}

/// Runs an experiment from TOML text and returns `(summary, rendered rows)`.
/// Writes the rows to disk only when the config names an output path.
#[pyfunction]
fn run_experiment<'py>(py: Python<'py>, config_toml: &str) -> PyResult<(Bound<'py, PyAny>, String)> {
    let config = ExperimentConfig::from_toml(config_toml).map_err(to_py)?;
    let out = py.detach(|| run_core_experiment(&config)).map_err(to_py)?;
    let summary = write_output(&config, &out).map_err(to_py)?;
    let text = render(&config, &out).map_err(to_py)?;
    Ok((to_object(py, &summary)?, text))
}

#[pymodule]
fn ranksel(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<CandidatePool>()?;
    m.add_class::<RankingModel>()?;
    m.add_function(wrap_pyfunction!(superstar_index_probs, m)?)?;
    m.add_function(wrap_pyfunction!(run_sim, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
