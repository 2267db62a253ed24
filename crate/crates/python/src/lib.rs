//! Python bindings for the `descm` solver.

use std::collections::BTreeMap;

use descm::{DecayKind, Error, GeneralizedSystem, Method, SturmLiouvilleProblem};
use nalgebra::{DMatrix, DVector};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    if e.is_configuration() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn parse_method(method: &str) -> PyResult<Method> {
    method.parse().map_err(to_py)
}

/// A Sturm-Liouville problem with its maps and decay data.
#[pyclass(name = "Problem", module = "pydescm", frozen)]
struct PyProblem {
    inner: SturmLiouvilleProblem,
}

#[pymethods]
impl PyProblem {
    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn interval(&self) -> String {
        self.inner.interval.to_string()
    }

    #[getter]
    fn params(&self) -> BTreeMap<String, f64> {
        self.inner.params.clone()
    }

    #[getter]
    fn default_method(&self) -> String {
        self.inner.default_method.to_string()
    }

    fn q(&self, x: f64) -> f64 {
        (self.inner.q)(x)
    }

    fn rho(&self, x: f64) -> f64 {
        (self.inner.rho)(x)
    }

    /// Closed-form eigenvalue `lambda_index` (1-based), or None.
    fn reference_eigenvalue(&self, index: usize) -> Option<f64> {
        self.inner.reference_eigenvalue(index)
    }

    /// Ascending generalized eigenvalues for governing index `n`.
    fn eigenvalues(&self, py: Python<'_>, method: &str, n: usize) -> PyResult<Vec<f64>> {
        let method = parse_method(method)?;
        let problem = &self.inner;
        py.detach(|| descm::solve_problem(problem, method, n, false))
            .map(|(_, spectrum)| spectrum.eigenvalues)
            .map_err(to_py)
    }

    /// Convergence study over `n_values` for the given eigenvalue indices.
    #[pyo3(signature = (method, n_values, eig_indices = vec![1]))]
    fn study(
        &self,
        py: Python<'_>,
        method: &str,
        n_values: Vec<usize>,
        eig_indices: Vec<usize>,
    ) -> PyResult<Vec<PyStudyRecord>> {
        let method = parse_method(method)?;
        let problem = &self.inner;
        let records = py
            .detach(|| descm::convergence_study(problem, method, &n_values, &eig_indices))
            .map_err(to_py)?;
        Ok(records
            .into_iter()
            .map(|inner| PyStudyRecord { inner })
            .collect())
    }

    /// Every applicable method, merged by matrix size.
    #[pyo3(signature = (n_values, eig_index = 1))]
    fn compare(
        &self,
        py: Python<'_>,
        n_values: Vec<usize>,
        eig_index: usize,
    ) -> PyResult<Vec<PyStudyRecord>> {
        let problem = &self.inner;
        let records = py
            .detach(|| descm::compare_methods(problem, &n_values, eig_index))
            .map_err(to_py)?;
        Ok(records
            .into_iter()
            .map(|inner| PyStudyRecord { inner })
            .collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "Problem(name={:?}, interval={}, de_map={})",
            self.inner.name, self.inner.interval, self.inner.de_map
        )
    }
}

/// One row of a convergence study.
#[pyclass(name = "StudyRecord", module = "pydescm", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyStudyRecord {
    inner: descm::StudyRecord,
}

#[pymethods]
impl PyStudyRecord {
    #[getter]
    fn method(&self) -> &'static str {
        self.inner.method.label()
    }

    #[getter]
    fn problem(&self) -> String {
        self.inner.problem.clone()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter(M)]
    fn m_left(&self) -> usize {
        self.inner.m_left
    }

    #[getter(N)]
    fn n_right(&self) -> usize {
        self.inner.n_right
    }

    #[getter]
    fn h(&self) -> f64 {
        self.inner.h
    }

    #[getter]
    fn size(&self) -> usize {
        self.inner.size
    }

    #[getter]
    fn eig_index(&self) -> usize {
        self.inner.eig_index
    }

    #[getter]
    fn mu(&self) -> f64 {
        self.inner.mu
    }

    #[getter]
    fn abs_error(&self) -> Option<f64> {
        self.inner.abs_error
    }

    #[getter]
    fn succ_error(&self) -> Option<f64> {
        self.inner.succ_error
    }

    #[getter]
    fn runtime_ms(&self) -> f64 {
        self.inner.runtime_ms
    }

    /// The available error, absolute first.
    fn error(&self) -> Option<f64> {
        self.inner.error()
    }

    fn __repr__(&self) -> String {
        let r = &self.inner;
        format!(
            "StudyRecord(method={:?}, problem={:?}, n={}, size={}, eig_index={}, mu={:?})",
            r.method.label(),
            r.problem,
            r.n,
            r.size,
            r.eig_index,
            r.mu
        )
    }
}

fn unwrap_records(records: &[PyRef<'_, PyStudyRecord>]) -> Vec<descm::StudyRecord> {
    records.iter().map(|r| r.inner.clone()).collect()
}

/// Built-in problem: "bessel" (n), "laguerre" (alpha) or "singular" (kappa).
#[pyfunction]
#[pyo3(signature = (name, params = None))]
fn builtin(name: &str, params: Option<BTreeMap<String, f64>>) -> PyResult<PyProblem> {
    let inner = descm::builtin(name, &params.unwrap_or_default()).map_err(to_py)?;
    Ok(PyProblem { inner })
}

/// Problem from the `key = value` description format.
#[pyfunction]
fn parse_problem_config(text: &str) -> PyResult<PyProblem> {
    let inner = descm::parse_problem_config(text).map_err(to_py)?;
    Ok(PyProblem { inner })
}

/// Evaluate an expression in `x`.
#[pyfunction]
#[pyo3(signature = (text, x, params = None))]
fn eval_expression(text: &str, x: f64, params: Option<BTreeMap<String, f64>>) -> PyResult<f64> {
    let e = descm::parse_expression(text, &params.unwrap_or_default()).map_err(to_py)?;
    Ok(e.eval(x))
}

/// Fit `ln(error) ~ -kappa n / ln(n)` over the pre-plateau records.
/// Returns `(kappa_hat, r_squared)`.
#[pyfunction]
fn rate_fit(records: Vec<PyRef<'_, PyStudyRecord>>) -> PyResult<(f64, f64)> {
    let records = unwrap_records(&records);
    let fit = descm::rate_fit(descm::pre_plateau(&records)).map_err(to_py)?;
    Ok((fit.kappa_hat, fit.r_squared))
}

#[pyfunction]
fn write_csv(records: Vec<PyRef<'_, PyStudyRecord>>, path: &str) -> PyResult<()> {
    descm::write_csv(&unwrap_records(&records), path).map_err(to_py)
}

#[pyfunction]
fn read_csv(path: &str) -> PyResult<Vec<PyStudyRecord>> {
    let file = std::fs::File::open(path).map_err(|e| to_py(e.into()))?;
    let records = descm::read_csv(file).map_err(to_py)?;
    Ok(records
        .into_iter()
        .map(|inner| PyStudyRecord { inner })
        .collect())
}

/// Eigenvalues of `(A - mu diag(d2)) v = 0` for symmetric `A`, ascending.
#[pyfunction]
fn solve_generalized(a: Vec<Vec<f64>>, d2: Vec<f64>) -> PyResult<Vec<f64>> {
    let n = a.len();
    if a.iter().any(|row| row.len() != n) {
        return Err(PyValueError::new_err("A must be a square list of lists"));
    }
    let a = DMatrix::from_fn(n, n, |i, j| a[i][j]);
    let sys = GeneralizedSystem::new(a, DVector::from_vec(d2)).map_err(to_py)?;
    Ok(descm::solve_generalized(&sys, false)
        .map_err(to_py)?
        .eigenvalues)
}

#[pyfunction]
fn lambert_w0(x: f64) -> PyResult<f64> {
    descm::lambert_w0(x).map_err(to_py)
}

#[pyfunction]
fn bessel_zero(order: u32, index: u32) -> PyResult<f64> {
    descm::bessel_zero(order, index).map_err(to_py)
}

#[pyfunction]
fn sinc(x: f64) -> PyResult<f64> {
    descm::sinc(x).map_err(to_py)
}

/// Transformed potential of a built-in or parsed problem at `t`.
#[pyfunction]
#[pyo3(signature = (problem, t, method = "de"))]
fn qtilde(problem: &PyProblem, t: f64, method: &str) -> PyResult<f64> {
    let decay: DecayKind = method.parse().map_err(to_py)?;
    problem
        .inner
        .transformed(decay)
        .and_then(|tp| tp.qtilde(t))
        .map_err(to_py)
}

#[pymodule]
fn pydescm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProblem>()?;
    m.add_class::<PyStudyRecord>()?;
    m.add_function(wrap_pyfunction!(builtin, m)?)?;
    m.add_function(wrap_pyfunction!(parse_problem_config, m)?)?;
    m.add_function(wrap_pyfunction!(eval_expression, m)?)?;
    m.add_function(wrap_pyfunction!(rate_fit, m)?)?;
    m.add_function(wrap_pyfunction!(write_csv, m)?)?;
    m.add_function(wrap_pyfunction!(read_csv, m)?)?;
    m.add_function(wrap_pyfunction!(solve_generalized, m)?)?;
    m.add_function(wrap_pyfunction!(lambert_w0, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_zero, m)?)?;
    m.add_function(wrap_pyfunction!(sinc, m)?)?;
    m.add_function(wrap_pyfunction!(qtilde, m)?)?;
    Ok(())
}
