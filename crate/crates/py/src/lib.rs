//! Python module `evframe`: single checks, suites, reports and term reduction.

use std::path::Path;

use evframe_core::heyting::Builtin;
use evframe_core::reduce::reduce;
use evframe_core::term::parse_term;
use evframe_core::workbench::{self, Record, Report, RunOptions};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn record_dict<'py>(py: Python<'py>, r: &Record) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("id", &r.id)?;
    d.set_item("op", &r.op)?;
    d.set_item("verdict", r.verdict.name())?;
    d.set_item("status", r.status.name())?;
    d.set_item("bounds", &r.bounds)?;
    d.set_item("witness", &r.witness.label)?;
    d.set_item("lines", r.witness.lines.clone())?;
    d.set_item("replay", &r.replay)?;
    Ok(d)
}

/// Collects the optional keyword inputs of a check, in CLI order.
fn fields(
    frame: Option<String>,
    topology: Option<String>,
    object: Option<String>,
    props: Option<String>,
    bounds: String,
    samples: Option<usize>,
    seed: Option<u64>,
) -> Vec<(&'static str, String)> {
    let mut out: Vec<(&str, String)> = [("frame", frame), ("topology", topology), ("object", object), ("props", props)]
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k, v)))
        .collect();
    out.push(("bounds", bounds));
    out.extend(samples.map(|s| ("samples", s.to_string())));
    out.extend(seed.map(|s| ("seed", s.to_string())));
    out
}

/// Runs one check and returns its record as a dict
/// (`verdict`, `status`, `witness`, `lines`, `replay`, ...).
#[pyfunction]
#[pyo3(signature = (op, frame=None, topology=None, object=None, props=None, bounds="exhaustive".to_string(), samples=None, seed=None))]
#[allow(clippy::too_many_arguments)]
fn run_check<'py>(
    py: Python<'py>,
    op: &str,
    frame: Option<String>,
    topology: Option<String>,
    object: Option<String>,
    props: Option<String>,
    bounds: String,
    samples: Option<usize>,
    seed: Option<u64>,
) -> PyResult<Bound<'py, PyDict>> {
    let given = fields(frame, topology, object, props, bounds, samples, seed);
    let suite = workbench::single_suite(op, &given, Path::new(".")).map_err(err)?;
    let report = py
        .allow_threads(|| workbench::run_suite(&suite, &RunOptions::default()))
        .map_err(err)?;
    record_dict(py, &report.records[0])
}

/// Runs a suite file (or `builtin:finite-oracle`); returns `(exit_code, report_text)`.
#[pyfunction]
#[pyo3(signature = (suite, only=None, fail_on_inconclusive=false))]
fn run_suite(py: Python<'_>, suite: &str, only: Option<String>, fail_on_inconclusive: bool) -> PyResult<(i32, String)> {
    let s = workbench::load_suite(suite).map_err(err)?;
    let report = py
        .allow_threads(|| workbench::run_suite(&s, &RunOptions { only }))
        .map_err(err)?;
    Ok((report.exit_code(fail_on_inconclusive), report.render()))
}

/// The records of a rendered report.
#[pyfunction]
fn parse_report<'py>(py: Python<'py>, text: &str) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let r = Report::parse(text).map_err(err)?;
    r.records.iter().map(|x| record_dict(py, x)).collect()
}

/// The explanation of one record of a rendered report.
#[pyfunction]
fn explain(text: &str, id: &str) -> PyResult<String> {
    let r = Report::parse(text).map_err(err)?;
    workbench::explain(&r, id).map_err(err)
}

/// Normal form of a combinator term within `budget` steps, or `None`.
#[pyfunction]
#[pyo3(signature = (term, budget=10_000))]
fn normalize(term: &str, budget: u64) -> PyResult<Option<String>> {
    let t = parse_term(term).map_err(err)?;
    let out = reduce(&t, budget).map_err(err)?;
    Ok(out.value().map(|v| v.to_string()))
}

#[pyfunction]
fn builtin_algebras() -> Vec<&'static str> {
    Builtin::ALL.iter().map(|b| b.name()).collect()
}

#[pyfunction]
fn operations() -> Vec<&'static str> {
    workbench::Op::ALL.iter().map(|o| o.name()).collect()
}

/// Whether a record returned by `run_check` is verified.
#[pyfunction]
fn is_verified(record: &Bound<'_, PyDict>) -> PyResult<bool> {
    let v: String = record
        .get_item("verdict")?
        .ok_or_else(|| err("record has no verdict"))?
        .extract()?;
    Ok(v == workbench::Kind::Verified.name())
}

#[pymodule]
fn evframe(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(run_check, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    m.add_function(wrap_pyfunction!(parse_report, m)?)?;
    m.add_function(wrap_pyfunction!(explain, m)?)?;
    m.add_function(wrap_pyfunction!(normalize, m)?)?;
    m.add_function(wrap_pyfunction!(builtin_algebras, m)?)?;
    m.add_function(wrap_pyfunction!(operations, m)?)?;
    m.add_function(wrap_pyfunction!(is_verified, m)?)?;
    Ok(())
}
