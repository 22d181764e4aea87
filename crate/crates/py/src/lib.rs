//! Python bindings: scenarios, weights, planning, mutants, oracles and the
//! full coverage analysis.

use std::path::PathBuf;

use pyo3::exceptions::{PyIndexError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use weightcov::coverage::{self, emit_report, render, ReportFormat};
use weightcov::mutation::{self, canonical_operators, generate_mutants};
use weightcov::oracles::{self, OracleKind, OracleThresholds};
use weightcov::path::Path;
use weightcov::planner::{self, PlannerConfig as CorePlannerConfig, Weights as CoreWeights};
use weightcov::propagate::propagate_all;
use weightcov::scenario::{parse_scenario, Scenario as CoreScenario};

fn value_err(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl ToString) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn thresholds(theta_p: f64, theta_s: f64, theta_c: f64) -> PyResult<OracleThresholds> {
    let t = OracleThresholds { theta_p, theta_s, theta_c };
    if !t.is_valid() {
        return Err(value_err("thresholds must be finite and >= 0"));
    }
    Ok(t)
}

fn oracle_kind(name: &str) -> PyResult<OracleKind> {
    name.parse().map_err(value_err)
}

/// The six cost weights.
#[pyclass(module = "pyweightcov", skip_from_py_object)]
#[derive(Clone)]
pub struct Weights {
    inner: CoreWeights,
}

#[pymethods]
impl Weights {
    #[new]
    fn new(w1: f64, w2: f64, w3: f64, w4: f64, w5: f64, w6: f64) -> PyResult<Self> {
        let inner = CoreWeights::from_array([w1, w2, w3, w4, w5, w6]);
        inner.validate().map_err(value_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        CoreWeights::from_json(text).map(|inner| Self { inner }).map_err(value_err)
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        let text = std::fs::read_to_string(&path).map_err(value_err)?;
        Self::from_json(&text)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn to_list(&self) -> Vec<f64> {
        self.inner.to_array().to_vec()
    }

    /// Copy with weight `i` (1-based) multiplied by `factor`.
    fn mutate(&self, i: usize, factor: f64) -> PyResult<Self> {
        mutation::apply(&self.inner, i, factor).map(|inner| Self { inner }).map_err(value_err)
    }

    fn __getitem__(&self, i: usize) -> PyResult<f64> {
        self.inner.get(i).ok_or_else(|| PyIndexError::new_err(format!("weight index {i} outside 1..=6")))
    }

    fn __eq__(&self, other: PyRef<'_, Self>) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        let w = self.inner.to_array();
        format!("Weights(w1={}, w2={}, w3={}, w4={}, w5={}, w6={})", w[0], w[1], w[2], w[3], w[4], w[5])
    }
}

/// Planner grid, thresholds and timing. Defaults match the command line.
#[pyclass(module = "pyweightcov", skip_from_py_object)]
#[derive(Clone)]
pub struct PlannerConfig {
    inner: CorePlannerConfig,
}

#[pymethods]
impl PlannerConfig {
    #[new]
    fn new() -> Self {
        Self { inner: CorePlannerConfig::default() }
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        CorePlannerConfig::from_json(text).map(|inner| Self { inner }).map_err(value_err)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn dt_dec(&self) -> f64 {
        self.inner.dt_dec
    }

    #[getter]
    fn dt_sim(&self) -> f64 {
        self.inner.dt_sim
    }

    #[getter]
    fn lateral_offsets(&self) -> Vec<f64> {
        self.inner.lateral_offsets.clone()
    }

    #[getter]
    fn speed_deltas(&self) -> Vec<f64> {
        self.inner.speed_deltas.clone()
    }

    #[getter]
    fn thresholds(&self) -> (f64, f64, f64, f64) {
        (self.inner.tau_lat, self.inner.tau_acc, self.inner.tau_dec, self.inner.tau_curv)
    }

    fn __repr__(&self) -> String {
        format!("PlannerConfig({})", compact(&self.inner.to_json()))
    }
}

fn compact(pretty: &str) -> String {
    pretty.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn config_or_default(config: Option<PyRef<'_, PlannerConfig>>) -> CorePlannerConfig {
    config.map(|c| c.inner.clone()).unwrap_or_default()
}

/// A parsed and validated scenario.
#[pyclass(module = "pyweightcov", skip_from_py_object)]
#[derive(Clone)]
pub struct Scenario {
    inner: CoreScenario,
}

#[pymethods]
impl Scenario {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        parse_scenario(text).map(|inner| Self { inner }).map_err(value_err)
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        let text = std::fs::read_to_string(&path).map_err(value_err)?;
        parse_scenario(&text)
            .map(|inner| Self { inner })
            .map_err(|e| value_err(format!("{}: {e}", path.display())))
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn id(&self) -> &str {
        &self.inner.id
    }

    #[getter]
    fn timeout(&self) -> f64 {
        self.inner.timeout
    }

    #[getter]
    fn object_ids(&self) -> Vec<String> {
        self.inner.objects.iter().map(|o| o.id.clone()).collect()
    }

    #[getter]
    fn lane_ids(&self) -> Vec<String> {
        self.inner.map.lanes.iter().map(|l| l.id.clone()).collect()
    }

    fn __repr__(&self) -> String {
        format!("Scenario(id={:?}, objects={}, timeout={})", self.inner.id, self.inner.objects.len(), self.inner.timeout)
    }
}

type Row = (f64, f64, f64, f64, f64, f64);
/// `(t, candidate index or None for the fallback, offset, speed delta, cost)`.
type DecisionRow = (f64, Option<usize>, f64, f64, Option<f64>);

fn rows(path: &Path) -> Vec<Row> {
    path.points.iter().map(|p| (p.t, p.location.x, p.location.y, p.direction, p.speed, p.acceleration)).collect()
}

/// Ego path of `scenario` as `(t, x, y, heading, speed, accel)` rows.
#[pyfunction]
#[pyo3(signature = (scenario, weights, config=None))]
fn plan(
    py: Python<'_>,
    scenario: PyRef<'_, Scenario>,
    weights: PyRef<'_, Weights>,
    config: Option<PyRef<'_, PlannerConfig>>,
) -> PyResult<Vec<Row>> {
    let (s, w, cfg) = (scenario.inner.clone(), weights.inner, config_or_default(config));
    let path = py.detach(move || planner::plan(&s, &w, &cfg)).map_err(runtime_err)?;
    Ok(rows(&path))
}

/// Like `plan`, plus per-decision records and guard-firing counts.
#[pyfunction]
#[pyo3(signature = (scenario, weights, config=None))]
fn plan_traced<'py>(
    py: Python<'py>,
    scenario: PyRef<'py, Scenario>,
    weights: PyRef<'py, Weights>,
    config: Option<PyRef<'py, PlannerConfig>>,
) -> PyResult<Bound<'py, PyDict>> {
    let (s, w, cfg) = (scenario.inner.clone(), weights.inner, config_or_default(config));
    let out = py.detach(move || planner::plan_traced(&s, &w, &cfg)).map_err(runtime_err)?;
    let decisions: Vec<DecisionRow> = out
        .decisions
        .iter()
        .map(|d| {
            let index = match d.choice {
                planner::Choice::Candidate(i) => Some(i),
                planner::Choice::Fallback => None,
            };
            (d.t, index, d.lateral_offset, d.speed_delta, d.cost.map(|c| c.total))
        })
        .collect();
    let dict = PyDict::new(py);
    dict.set_item("path", rows(&out.path))?;
    dict.set_item("decisions", decisions)?;
    dict.set_item("guard_firings", out.guard_firings.to_vec())?;
    Ok(dict)
}

/// The 42 canonical mutants as `(name, weight, factor, Weights)`.
#[pyfunction]
fn mutants(weights: PyRef<'_, Weights>) -> PyResult<Vec<(String, usize, f64, Weights)>> {
    let all = generate_mutants(&weights.inner, &canonical_operators()).map_err(value_err)?;
    Ok(all.iter().map(|m| (m.file_stem(), m.weight, m.operator.factor, Weights { inner: m.weights })).collect())
}

/// Plan `scenario` under both weight vectors and apply the three oracles.
#[pyfunction]
#[pyo3(signature = (scenario, original, mutant, theta_p=0.0, theta_s=0.0, theta_c=0.0, config=None))]
#[allow(clippy::too_many_arguments)]
fn compare<'py>(
    py: Python<'py>,
    scenario: PyRef<'py, Scenario>,
    original: PyRef<'py, Weights>,
    mutant: PyRef<'py, Weights>,
    theta_p: f64,
    theta_s: f64,
    theta_c: f64,
    config: Option<PyRef<'py, PlannerConfig>>,
) -> PyResult<Bound<'py, PyDict>> {
    let theta = thresholds(theta_p, theta_s, theta_c)?;
    let (s, a, b, cfg) = (scenario.inner.clone(), original.inner, mutant.inner, config_or_default(config));
    let (v, deviation) = py
        .detach(move || -> Result<_, String> {
            let objects = propagate_all(&s, cfg.dt_sim).map_err(|e| e.to_string())?;
            let p = planner::plan_with_objects(&s, &objects, &a, &cfg).map_err(|e| e.to_string())?.path;
            let q = planner::plan_with_objects(&s, &objects, &b, &cfg).map_err(|e| e.to_string())?.path;
            let v = oracles::evaluate(&p, &q, &objects, &theta).map_err(|e| e.to_string())?;
            let d = oracles::max_deviation(&p, &q).map_err(|e| e.to_string())?;
            Ok((v, d))
        })
        .map_err(runtime_err)?;
    let dict = PyDict::new(py);
    dict.set_item("PO", v.po)?;
    dict.set_item("SO", v.so)?;
    dict.set_item("CO", v.co)?;
    dict.set_item("max_deviation", deviation)?;
    Ok(dict)
}

/// Kill matrix of a finished analysis.
#[pyclass(module = "pyweightcov")]
pub struct Analysis {
    inner: coverage::KillMatrix,
}

#[pymethods]
impl Analysis {
    /// Re-open an analysis directory written by `write` or the CLI.
    #[staticmethod]
    fn load(dir: PathBuf) -> PyResult<Self> {
        coverage::read_matrix(&dir).map(|inner| Self { inner }).map_err(value_err)
    }

    #[getter]
    fn scenarios(&self) -> Vec<String> {
        self.inner.scenarios.clone()
    }

    /// Whether some mutant of weight `i` (1-based) is killed under `oracle`.
    fn covered(&self, i: usize, oracle: &str) -> PyResult<bool> {
        Ok(coverage::covered(&self.inner, i, oracle_kind(oracle)?))
    }

    /// `{weight: {"PO": bool, "SO": bool, "CO": bool}}` for w1..w6.
    fn overall<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let dict = PyDict::new(py);
        for i in 1..=6 {
            let row = PyDict::new(py);
            for kind in OracleKind::ALL {
                row.set_item(kind.to_string(), coverage::covered(&self.inner, i, kind))?;
            }
            dict.set_item(format!("w{i}"), row)?;
        }
        Ok(dict)
    }

    /// Guard firings of the unmutated planner, per scenario.
    fn guard_firings(&self) -> Vec<(String, Vec<usize>)> {
        self.inner.base.iter().map(|b| (b.scenario.clone(), b.guard_firings.to_vec())).collect()
    }

    /// One dict per (scenario, mutant) cell.
    fn records<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        self.inner
            .records
            .iter()
            .map(|r| {
                let d = PyDict::new(py);
                d.set_item("scenario", &r.scenario)?;
                d.set_item("weight", r.weight)?;
                d.set_item("operator", r.operator.index)?;
                d.set_item("factor", r.operator.factor)?;
                d.set_item("PO", r.verdicts.po)?;
                d.set_item("SO", r.verdicts.so)?;
                d.set_item("CO", r.verdicts.co)?;
                d.set_item("max_deviation", r.max_deviation)?;
                Ok(d)
            })
            .collect()
    }

    #[pyo3(signature = (format="text"))]
    fn render(&self, format: &str) -> PyResult<String> {
        let f: ReportFormat = format.parse().map_err(value_err)?;
        Ok(render(&self.inner, f))
    }

    /// Write the report directory, same layout as `weightcov analyze`.
    fn write(&self, dir: PathBuf) -> PyResult<()> {
        emit_report(&self.inner, &dir).map(|_| ()).map_err(runtime_err)
    }

    fn __len__(&self) -> usize {
        self.inner.records.len()
    }
}

/// Run the full mutation analysis over a suite file.
#[pyfunction]
#[pyo3(signature = (suite, weights, theta_p=0.0, theta_s=0.0, theta_c=0.0, jobs=None, config=None))]
#[allow(clippy::too_many_arguments)]
fn analyze(
    py: Python<'_>,
    suite: PathBuf,
    weights: PyRef<'_, Weights>,
    theta_p: f64,
    theta_s: f64,
    theta_c: f64,
    jobs: Option<usize>,
    config: Option<PyRef<'_, PlannerConfig>>,
) -> PyResult<Analysis> {
    let theta = thresholds(theta_p, theta_s, theta_c)?;
    let scenarios = coverage::TestSuite::load(&suite).map_err(value_err)?;
    let (w, cfg) = (weights.inner, config_or_default(config));
    let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)).max(1);
    let inner = py
        .detach(move || coverage::evaluate_suite(&scenarios, &w, &canonical_operators(), &cfg, &theta, jobs))
        .map_err(runtime_err)?;
    Ok(Analysis { inner })
}

#[pymodule]
pub fn pyweightcov(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Weights>()?;
    m.add_class::<PlannerConfig>()?;
    m.add_class::<Scenario>()?;
    m.add_class::<Analysis>()?;
    m.add_function(wrap_pyfunction!(plan, m)?)?;
    m.add_function(wrap_pyfunction!(plan_traced, m)?)?;
    m.add_function(wrap_pyfunction!(mutants, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add("CANONICAL_FACTORS", mutation::CANONICAL_FACTORS.to_vec())?;
    Ok(())
}
