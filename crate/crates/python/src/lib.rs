//! Python bindings for the `pcmcts` planner and benchmark harness.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use pcmcts::action::{ActionBounds, ContinuousAction, Interval};
use pcmcts::env::preset;
use pcmcts::harness::{self, ExperimentPlan};
use pcmcts::search::{self, ActionStat};
use pcmcts::{Error, Strategy, StrategyKind};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidConfig(_)
        | Error::InvalidPlan(_)
        | Error::UnknownPreset(_)
        | Error::InvertedBounds { .. }
        | Error::DimensionMismatch { .. }
        | Error::Toml(_) => PyValueError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

/// Search constants; mirrors the Rust `SearchConfig` field for field.
#[pyclass(name = "SearchConfig", get_all, set_all, skip_from_py_object)]
#[derive(Clone)]
struct PySearchConfig {
    uct_exploration_c: f64,
    pw_coefficient: f64,
    pw_exponent: f64,
    kernel_bandwidth: f64,
    discount_factor: f64,
    planning_horizon: usize,
    iteration_budget: usize,
    initial_action_count: usize,
    similarity_floor: f64,
    rng_seed: u64,
}

impl From<search::SearchConfig> for PySearchConfig {
    fn from(c: search::SearchConfig) -> Self {
        Self {
            uct_exploration_c: c.uct_exploration_c,
            pw_coefficient: c.pw_coefficient,
            pw_exponent: c.pw_exponent,
            kernel_bandwidth: c.kernel_bandwidth,
            discount_factor: c.discount_factor,
            planning_horizon: c.planning_horizon,
            iteration_budget: c.iteration_budget,
            initial_action_count: c.initial_action_count,
            similarity_floor: c.similarity_floor,
            rng_seed: c.rng_seed,
        }
    }
}

impl From<&PySearchConfig> for search::SearchConfig {
    fn from(c: &PySearchConfig) -> Self {
        Self {
            uct_exploration_c: c.uct_exploration_c,
            pw_coefficient: c.pw_coefficient,
            pw_exponent: c.pw_exponent,
            kernel_bandwidth: c.kernel_bandwidth,
            discount_factor: c.discount_factor,
            planning_horizon: c.planning_horizon,
            iteration_budget: c.iteration_budget,
            initial_action_count: c.initial_action_count,
            similarity_floor: c.similarity_floor,
            rng_seed: c.rng_seed,
        }
    }
}

#[pymethods]
impl PySearchConfig {
    #[new]
    fn new() -> Self {
        search::SearchConfig::default().into()
    }

    /// Tuned defaults of a scenario preset.
    #[staticmethod]
    fn for_preset(name: &str) -> PyResult<Self> {
        Ok(preset(name).map_err(to_py)?.config.into())
    }

    fn validate(&self) -> PyResult<()> {
        search::SearchConfig::from(self).validate().map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("{:?}", search::SearchConfig::from(self))
    }
}

fn config_or_preset(name: &str, config: Option<&PySearchConfig>) -> PyResult<search::SearchConfig> {
    match config {
        Some(c) => Ok(c.into()),
        None => Ok(preset(name).map_err(to_py)?.config),
    }
}

fn strategy(kind: &str, workers: usize) -> PyResult<Strategy> {
    let kind: StrategyKind = kind.parse().map_err(to_py)?;
    Strategy::new(kind, workers).map_err(to_py)
}

fn joint_values(joint: Vec<ContinuousAction>) -> Vec<Vec<f64>> {
    joint.into_iter().map(ContinuousAction::into_inner).collect()
}

#[pyfunction]
fn preset_names() -> Vec<&'static str> {
    pcmcts::env::preset_names().to_vec()
}

#[pyfunction]
fn strategy_names() -> Vec<&'static str> {
    StrategyKind::ALL.iter().map(|k| k.as_str()).collect()
}

/// UCT priority of an action with mean `value` visited `visits` times under
/// a node visited `node_visits` times.
#[pyfunction]
fn uct_value(value: f64, visits: u64, node_visits: u64, c: f64) -> PyResult<f64> {
    let mut stat = ActionStat::new(ContinuousAction::new(vec![0.0]));
    stat.value_estimate = value;
    stat.visit_count = visits as f64;
    stat.raw_visit_count = visits;
    search::uct_value(&stat, node_visits, c).map_err(to_py)
}

/// Progressive widening bound `max(initial, floor(k · n^alpha))`.
#[pyfunction]
fn widening_bound(node_visits: u64, k: f64, alpha: f64, initial: usize) -> usize {
    let cfg = search::SearchConfig {
        pw_coefficient: k,
        pw_exponent: alpha,
        initial_action_count: initial,
        ..Default::default()
    };
    search::widening_bound(node_visits, &cfg)
}

/// RBF similarity of two actions after per-dimension min-max normalization.
#[pyfunction]
fn similarity(a: Vec<f64>, b: Vec<f64>, bounds: Vec<(f64, f64)>, gamma: f64) -> PyResult<f64> {
    let bounds = ActionBounds::new(bounds.into_iter().map(|(lo, hi)| Interval::new(lo, hi)).collect())
        .map_err(to_py)?;
    search::similarity(
        &ContinuousAction::new(a),
        &ContinuousAction::new(b),
        &bounds,
        gamma,
    )
    .map_err(to_py)
}

/// Plans once from the preset's initial state; returns the chosen joint
/// action as one list per agent.
#[pyfunction]
#[pyo3(signature = (scenario, strategy_name="single", workers=1, budget=1000, seed=0, config=None))]
fn plan(
    scenario: &str,
    strategy_name: &str,
    workers: usize,
    budget: usize,
    seed: u64,
    config: Option<PyRef<'_, PySearchConfig>>,
) -> PyResult<Vec<Vec<f64>>> {
    let p = preset(scenario).map_err(to_py)?;
    let cfg = config_or_preset(scenario, config.as_deref())?
        .with_budget(budget)
        .with_seed(seed);
    let s = strategy(strategy_name, workers)?;
    let d = s.plan(p.env.as_ref(), &p.env.initial_state(), &cfg).map_err(to_py)?;
    Ok(joint_values(d.joint))
}

/// Runs one closed-loop episode; returns `(success, steps, trace)`.
#[pyfunction]
#[pyo3(signature = (scenario, strategy_name="single", workers=1, budget=1000, seed=0, config=None))]
fn run_episode(
    scenario: &str,
    strategy_name: &str,
    workers: usize,
    budget: usize,
    seed: u64,
    config: Option<PyRef<'_, PySearchConfig>>,
) -> PyResult<(bool, usize, Vec<Vec<Vec<f64>>>)> {
    let p = preset(scenario).map_err(to_py)?;
    let cfg = config_or_preset(scenario, config.as_deref())?.with_budget(budget);
    let s = strategy(strategy_name, workers)?;
    let ep = harness::run_episode(p.env.as_ref(), &s, &cfg, seed);
    if let Some(e) = ep.error {
        return Err(PyRuntimeError::new_err(e));
    }
    Ok((ep.success, ep.steps, ep.trace.into_iter().map(joint_values).collect()))
}

/// Runs a TOML experiment plan and returns the results as CSV text.
#[pyfunction]
fn run_plan(plan_toml: &str) -> PyResult<String> {
    let plan = ExperimentPlan::from_toml_str(plan_toml).map_err(to_py)?;
    let records: Vec<_> = harness::run_plan(&plan)
        .map_err(to_py)?
        .into_iter()
        .map(|r| r.record)
        .collect();
    harness::to_csv_string(&records).map_err(to_py)
}

/// Aggregates results CSV text into per-combination summary CSV text.
#[pyfunction]
fn aggregate(results_csv: &str) -> PyResult<String> {
    let records = harness::read_csv(results_csv.as_bytes()).map_err(to_py)?;
    let mut out = Vec::new();
    harness::write_aggregate_csv(&mut out, &harness::aggregate(&records)).map_err(to_py)?;
    String::from_utf8(out).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

#[pymodule]
fn pcmcts_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySearchConfig>()?;
    m.add("CSV_HEADER", harness::CSV_HEADER)?;
    m.add_function(wrap_pyfunction!(preset_names, m)?)?;
    m.add_function(wrap_pyfunction!(strategy_names, m)?)?;
    m.add_function(wrap_pyfunction!(uct_value, m)?)?;
    m.add_function(wrap_pyfunction!(widening_bound, m)?)?;
    m.add_function(wrap_pyfunction!(similarity, m)?)?;
    m.add_function(wrap_pyfunction!(plan, m)?)?;
    m.add_function(wrap_pyfunction!(run_episode, m)?)?;
    m.add_function(wrap_pyfunction!(run_plan, m)?)?;
    m.add_function(wrap_pyfunction!(aggregate, m)?)?;
    Ok(())
}
