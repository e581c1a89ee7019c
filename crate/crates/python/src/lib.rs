//! Python bindings for the femtoho simulator.
//!
//! Exposes configuration, single and comparison runs, distance sweeps and
//! the building blocks (path loss, RSRP filter, two-cell trace replay) as
//! the `femtoho_py` module. Bad input raises `ValueError`; failures while
//! simulating or writing raise `RuntimeError`.

use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use femtoho::filtering::FilterState;
use femtoho::scenario::Traffic;
use femtoho::{Algorithm, MetricsReport, PropagationModel};

fn to_py(e: femtoho::Error) -> PyErr {
    if e.is_validation() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn parse_algorithm(token: &str) -> PyResult<Algorithm> {
    token.parse().map_err(|e: String| PyValueError::new_err(e))
}

fn parse_traffic(token: &str) -> PyResult<Traffic> {
    match token {
        "voip" => Ok(Traffic::RealTimeVoip),
        "video" => Ok(Traffic::RealTimeVideo),
        "nrt" | "non-real-time" => Ok(Traffic::NonRealTime),
        other => Err(PyValueError::new_err(format!(
            "unknown traffic `{other}` (expected voip, video or nrt)"
        ))),
    }
}

fn report_dict<'py>(py: Python<'py>, r: &MetricsReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("algorithm", r.algorithm.token())?;
    d.set_item("eligible_ues", r.eligible_ues)?;
    d.set_item("ue_ticks", r.ue_ticks)?;
    d.set_item("fap_ue_ticks", r.fap_ue_ticks)?;
    d.set_item("fap_assignment_probability", r.fap_assignment_probability)?;
    d.set_item("ho_count", r.ho_count)?;
    d.set_item("pingpong_count", r.pingpong_count)?;
    d.set_item("ho_failure_count", r.ho_failure_count)?;
    Ok(d)
}

/// Simulation configuration. Keyword arguments set config keys by name,
/// e.g. `SimConfig(seed=3, algorithm="speed", hmm_db=4.0)`; the result is
/// validated on construction.
#[pyclass(name = "SimConfig", module = "femtoho_py", skip_from_py_object)]
#[derive(Clone)]
struct PySimConfig {
    inner: femtoho::SimConfig,
}

#[pymethods]
impl PySimConfig {
    #[new]
    #[pyo3(signature = (**kwargs))]
    fn new(kwargs: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let mut cfg = PySimConfig {
            inner: femtoho::SimConfig::default(),
        };
        if let Some(kwargs) = kwargs {
            for (k, v) in kwargs.iter() {
                cfg.set(&k.extract::<String>()?, &v)?;
            }
        }
        cfg.inner.ensure_valid().map_err(to_py)?;
        Ok(cfg)
    }

    /// Reads a `key = value` config file.
    #[staticmethod]
    fn from_file(path: PathBuf) -> PyResult<Self> {
        femtoho::SimConfig::from_file(&path)
            .map(|inner| PySimConfig { inner })
            .map_err(to_py)
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        femtoho::SimConfig::from_text(text)
            .map(|inner| PySimConfig { inner })
            .map_err(to_py)
    }

    /// Sets one key; the value may be any object whose `str()` parses.
    fn set(&mut self, key: &str, value: &Bound<'_, PyAny>) -> PyResult<()> {
        let text = if let Ok(b) = value.extract::<bool>() {
            b.to_string()
        } else if let Ok(items) = value.cast::<PyList>() {
            let parts: Vec<String> = items.iter().map(|i| i.str().map(|s| s.to_string())).collect::<PyResult<_>>()?;
            parts.join(",")
        } else {
            value.str()?.to_string()
        };
        self.inner.set(key, &text).map_err(to_py)
    }

    /// Violations of the config invariants; empty when valid.
    fn validate(&self) -> Vec<String> {
        self.inner.validate()
    }

    #[staticmethod]
    fn keys() -> Vec<&'static str> {
        femtoho::SimConfig::KEYS.to_vec()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[getter]
    fn algorithm(&self) -> &'static str {
        self.inner.algorithm.token()
    }

    #[getter]
    fn enb_fap_distance_m(&self) -> f64 {
        self.inner.enb_fap_distance_m
    }

    #[getter]
    fn sim_duration_s(&self) -> f64 {
        self.inner.sim_duration_s
    }

    #[getter]
    fn tick_count(&self) -> u64 {
        self.inner.tick_count()
    }

    fn __repr__(&self) -> String {
        format!(
            "SimConfig(algorithm={:?}, seed={}, enb_fap_distance_m={}, sim_duration_s={})",
            self.inner.algorithm.token(),
            self.inner.seed,
            self.inner.enb_fap_distance_m,
            self.inner.sim_duration_s
        )
    }
}

fn config_or_default(config: Option<&PySimConfig>) -> femtoho::SimConfig {
    config.map(|c| c.inner.clone()).unwrap_or_default()
}

/// Single run of `config.algorithm`; returns `(event_log_csv, report)`.
#[pyfunction]
#[pyo3(signature = (config=None))]
fn run<'py>(py: Python<'py>, config: Option<&PySimConfig>) -> PyResult<(String, Bound<'py, PyDict>)> {
    let cfg = config_or_default(config);
    let (log, report) = py.detach(|| femtoho::run(&cfg)).map_err(to_py)?;
    Ok((log.to_csv(), report_dict(py, &report)?))
}

/// All four algorithms on one shared trace; one report dict per algorithm.
#[pyfunction]
#[pyo3(signature = (config=None))]
fn compare<'py>(py: Python<'py>, config: Option<&PySimConfig>) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let cfg = config_or_default(config);
    let runs = py
        .detach(|| femtoho::run_algorithms(&cfg, &Algorithm::ALL))
        .map_err(to_py)?;
    runs.iter().map(|r| report_dict(py, &r.report)).collect()
}

/// Distance sweep; returns the CSV text
/// (`distance_m,algorithm,metric,mean,std,replications`).
#[pyfunction]
#[pyo3(signature = (distances, replications, config=None, algorithms=None))]
fn sweep(
    py: Python<'_>,
    distances: Vec<f64>,
    replications: u32,
    config: Option<&PySimConfig>,
    algorithms: Option<Vec<String>>,
) -> PyResult<String> {
    let cfg = config_or_default(config);
    let algs = match algorithms {
        Some(tokens) => tokens.iter().map(|t| parse_algorithm(t)).collect::<PyResult<Vec<_>>>()?,
        None => Algorithm::ALL.to_vec(),
    };
    let table = py
        .detach(|| femtoho::sweep(&cfg, &distances, replications, &algs))
        .map_err(to_py)?;
    Ok(table.to_csv())
}

/// Macro path loss in dB at `distance_m`; `indoor` adds penetration loss.
#[pyfunction]
#[pyo3(signature = (distance_m, indoor=false))]
fn path_loss_macro(distance_m: f64, indoor: bool) -> f64 {
    let m = PropagationModel::default();
    m.path_loss_macro(distance_m) + if indoor { m.penetration_loss_db } else { 0.0 }
}

/// Femto path loss in dB at `distance_m` through `walls` walls.
#[pyfunction]
#[pyo3(signature = (distance_m, walls=0))]
fn path_loss_femto(distance_m: f64, walls: u32) -> f64 {
    PropagationModel::default().path_loss_femto(distance_m, walls)
}

/// Runs the exponential RSRP filter over `samples`.
#[pyfunction]
fn filter_series(samples: Vec<f64>, beta: f64) -> PyResult<Vec<f64>> {
    if !(0.0..1.0).contains(&beta) {
        return Err(PyValueError::new_err("beta must be in [0, 1)"));
    }
    let mut f = FilterState::new(beta);
    Ok(samples.into_iter().map(|s| f.update(s)).collect())
}

/// Replays raw macro/femto RSRP samples (one per tick) through one
/// algorithm. Returns a dict with counters and the serving cell per tick
/// (0 = macro, 1 = femto).
#[pyfunction]
#[pyo3(signature = (algorithm, macro_dbm, femto_dbm, speed_kmh=3.0, traffic="voip", config=None))]
fn replay_two_cell<'py>(
    py: Python<'py>,
    algorithm: &str,
    macro_dbm: Vec<f64>,
    femto_dbm: Vec<f64>,
    speed_kmh: f64,
    traffic: &str,
    config: Option<&PySimConfig>,
) -> PyResult<Bound<'py, PyDict>> {
    if macro_dbm.len() != femto_dbm.len() {
        return Err(PyValueError::new_err("macro_dbm and femto_dbm differ in length"));
    }
    let cfg = config_or_default(config);
    cfg.ensure_valid().map_err(to_py)?;
    let out = femtoho::replay_two_cell_trace(
        &cfg,
        parse_algorithm(algorithm)?,
        &macro_dbm,
        &femto_dbm,
        speed_kmh,
        parse_traffic(traffic)?,
    );
    let d = PyDict::new(py);
    d.set_item("ho_count", out.counters.ho_count)?;
    d.set_item("pingpong_count", out.counters.pingpong_count)?;
    d.set_item("ho_failures", out.counters.ho_failures)?;
    d.set_item("serving", out.serving.iter().map(|c| c.0).collect::<Vec<u32>>())?;
    Ok(d)
}

#[pymodule]
fn femtoho_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySimConfig>()?;
    m.add("ALGORITHMS", Algorithm::ALL.iter().map(|a| a.token()).collect::<Vec<_>>())?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(path_loss_macro, m)?)?;
    m.add_function(wrap_pyfunction!(path_loss_femto, m)?)?;
    m.add_function(wrap_pyfunction!(filter_series, m)?)?;
    m.add_function(wrap_pyfunction!(replay_two_cell, m)?)?;
    Ok(())
}
