//! Python bindings: reports come back as plain dicts, instances and clause
//! sets go in as text in the same syntax the command line reads.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use qcsp::horn::{models_of, ClauseSet};
use qcsp::interp::{homotopy_witness, lookup, run_homotopy_check, translate_instance};
use qcsp::poly::{preserved_by, tractability_report, ReportInput, ThresholdOp};
use qcsp::solve::{parse_instance, SolveOptions};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, value: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(err)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn clause_set(text: &str) -> PyResult<ClauseSet> {
    ClauseSet::parse(&text.replace(';', "\n")).map_err(err)
}

/// Solves an instance given as text; returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (text, method = "auto", seed = 0, max_slots = 10))]
fn solve<'py>(py: Python<'py>, text: &str, method: &str, seed: u64, max_slots: usize) -> PyResult<Bound<'py, PyAny>> {
    let inst = parse_instance(text).map_err(err)?;
    let opts = SolveOptions {
        strategy: method.parse().map_err(err)?,
        max_slots,
        seed,
    };
    let report = qcsp::solve::solve(&inst, &opts).map_err(err)?;
    to_py(py, &report)
}

/// The instance translated through a catalog interpretation, as text.
#[pyfunction]
fn translate(text: &str, via: &str) -> PyResult<String> {
    let inst = parse_instance(text).map_err(err)?;
    let out = translate_instance(&inst, &lookup(via).map_err(err)?).map_err(err)?;
    Ok(out.to_string())
}

/// Class memberships and polymorphism checks for clause-defined relations.
#[pyfunction]
fn classify<'py>(py: Python<'py>, relations: Vec<String>) -> PyResult<Bound<'py, PyAny>> {
    let mut inputs = Vec::new();
    for text in relations {
        let cs = clause_set(&text)?;
        inputs.push(ReportInput {
            relation: models_of(&cs, cs.arity()).map_err(err)?,
            id: text,
            clauses: Some(cs),
        });
    }
    to_py(py, &tractability_report(&inputs).map_err(err)?)
}

/// Number of weak orders satisfying a clause set.
#[pyfunction]
fn count_models(clauses: &str) -> PyResult<usize> {
    let cs = clause_set(clauses)?;
    Ok(models_of(&cs, cs.arity()).map_err(err)?.len())
}

/// Whether `op` ("pp" or "dual-pp") preserves a clause-defined relation.
#[pyfunction]
fn preserved<'py>(py: Python<'py>, clauses: &str, op: &str) -> PyResult<Bound<'py, PyAny>> {
    let op = match op {
        "pp" => ThresholdOp::Pp,
        "dual-pp" => ThresholdOp::DualPp,
        other => return Err(err(format!("unknown operation `{other}`"))),
    };
    let cs = clause_set(clauses)?;
    let r = models_of(&cs, cs.arity()).map_err(err)?;
    to_py(py, &preserved_by(&r, op).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (calculus, samples = 1000, seed = 0))]
fn check_homotopy<'py>(py: Python<'py>, calculus: &str, samples: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let w = homotopy_witness(calculus).map_err(err)?;
    to_py(py, &run_homotopy_check(&w, samples, seed).map_err(err)?)
}

#[pymodule]
fn qcsp_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(translate, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(count_models, m)?)?;
    m.add_function(wrap_pyfunction!(preserved, m)?)?;
    m.add_function(wrap_pyfunction!(check_homotopy, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
