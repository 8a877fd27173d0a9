//! Python bindings. Every function takes and returns JSON text so results
//! match the CLI reports byte for byte.

use lie_hermitian::spec_file::SpecFile;
use lie_hermitian::suite::{run_suite, SuiteFamily, SuiteOptions};
use lie_hermitian::verify::{self, VerifyOptions};
use lie_hermitian::{commands, report, Error};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Numerical(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse(spec_json: &str) -> PyResult<SpecFile> {
    SpecFile::parse(spec_json).map_err(to_py)
}

/// Property report of a spec file.
#[pyfunction]
#[pyo3(signature = (spec_json, tol=None, classify=false))]
fn check(spec_json: &str, tol: Option<f64>, classify: bool) -> PyResult<String> {
    let v = commands::check(&parse(spec_json)?, tol, classify).map_err(to_py)?;
    Ok(report::to_json(&v))
}

/// Sparse tensor dump of a spec file.
#[pyfunction]
#[pyo3(signature = (spec_json, tol=None))]
fn tensors(spec_json: &str, tol: Option<f64>) -> PyResult<String> {
    Ok(report::to_json(&commands::tensors(&parse(spec_json)?, tol).map_err(to_py)?))
}

/// Normal-form classification of codim-2 or generator data.
#[pyfunction]
#[pyo3(signature = (spec_json, tol=None))]
fn classify(spec_json: &str, tol: Option<f64>) -> PyResult<String> {
    Ok(report::to_json(&commands::classify(&parse(spec_json)?, tol).map_err(to_py)?))
}

/// Seeded sample suite of a family.
#[pyfunction]
#[pyo3(signature = (family, count=100, seed=0, tol=None))]
fn sample(family: &str, count: usize, seed: u64, tol: Option<f64>) -> PyResult<String> {
    let family = SuiteFamily::parse(family).map_err(to_py)?;
    let rep = run_suite(&SuiteOptions { family, count, seed, tol }).map_err(to_py)?;
    Ok(report::to_json(&rep.to_value(tol)))
}

/// Acceptance battery; returns the JSON report.
#[pyfunction]
#[pyo3(signature = (filter=None, seed=0, tol=None))]
fn verify_paper(filter: Option<String>, seed: u64, tol: Option<f64>) -> PyResult<String> {
    let opts = VerifyOptions { seed, tol, filter };
    let results = verify::run(&opts);
    if results.is_empty() {
        return Err(PyValueError::new_err("filter selects no criterion"));
    }
    Ok(report::to_json(&verify::results_json(&results, &opts)))
}

#[pymodule]
fn lie_hermitian_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(tensors, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(verify_paper, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
