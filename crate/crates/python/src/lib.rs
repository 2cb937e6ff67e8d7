//! Python bindings: `import funm`.

use funm_core as core;
use funm_core::{
    AnalyticFunction, ComplexMatrix, ComplexVector, Exp, ExperimentConfig, FunmError, FunmParams,
    ImpulseSystem, Polynomial,
};
use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: FunmError) -> PyErr {
    if e.is_numerical() {
        PyArithmeticError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn matrix(rows: Vec<Vec<Complex64>>) -> PyResult<ComplexMatrix> {
    ComplexMatrix::from_rows(&rows).map_err(to_py)
}

fn params(delta: f64, gamma: i32) -> PyResult<FunmParams> {
    FunmParams::new(delta, gamma).map_err(to_py)
}

/// `None` or `"exp"` for the exponential, otherwise ascending polynomial coefficients.
fn function(f: Option<&Bound<'_, PyAny>>) -> PyResult<Box<dyn AnalyticFunction>> {
    let Some(f) = f else {
        return Ok(Box::new(Exp::new()));
    };
    if let Ok(name) = f.extract::<String>() {
        return match name.as_str() {
            "exp" => Ok(Box::new(Exp::new())),
            other => Err(PyValueError::new_err(format!("unknown function {other:?}"))),
        };
    }
    let coeffs: Vec<Complex64> = f.extract()?;
    if coeffs.is_empty() {
        return Err(PyValueError::new_err("empty coefficient list"));
    }
    Ok(Box::new(Polynomial::new(coeffs)))
}

/// f(A) for a matrix with known eigenvalues.
#[pyfunction(name = "funm")]
#[pyo3(signature = (a, eigenvalues, function=None, delta=core::DEFAULT_DELTA, gamma=core::DEFAULT_GAMMA))]
fn matrix_function(
    a: Vec<Vec<Complex64>>,
    eigenvalues: Vec<Complex64>,
    function: Option<&Bound<'_, PyAny>>,
    delta: f64,
    gamma: i32,
) -> PyResult<Vec<Vec<Complex64>>> {
    let a = matrix(a)?;
    let f = self::function(function)?;
    let out = core::funm(&a, &eigenvalues, f.as_ref(), params(delta, gamma)?).map_err(to_py)?;
    Ok(out.to_rows())
}

/// Newton interpolating polynomial of f at a spectrum.
#[pyclass(name = "NewtonPolynomial")]
struct PyNewton(core::NewtonPolynomial<Complex64>);

#[pymethods]
impl PyNewton {
    /// Nodes in the order used by the Newton form (clusters contiguous).
    #[getter]
    fn points(&self) -> Vec<Complex64> {
        self.0.points().to_vec()
    }

    #[getter]
    fn coefficients(&self) -> Vec<Complex64> {
        self.0.coefficients().to_vec()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __call__(&self, z: Complex64) -> Complex64 {
        self.0.eval_scalar(z)
    }

    fn eval_matrix(&self, a: Vec<Vec<Complex64>>) -> PyResult<Vec<Vec<Complex64>>> {
        Ok(self.0.eval_matrix(&matrix(a)?).map_err(to_py)?.to_rows())
    }

    fn eval_matrix_vector(&self, a: Vec<Vec<Complex64>>, b: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
        self.0.eval_matrix_vector(&matrix(a)?, &b).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("NewtonPolynomial(degree={})", self.0.len().saturating_sub(1))
    }
}

#[pyfunction]
#[pyo3(signature = (eigenvalues, function=None, delta=core::DEFAULT_DELTA, gamma=core::DEFAULT_GAMMA))]
fn build_newton(
    eigenvalues: Vec<Complex64>,
    function: Option<&Bound<'_, PyAny>>,
    delta: f64,
    gamma: i32,
) -> PyResult<PyNewton> {
    let f = self::function(function)?;
    core::build_newton(f.as_ref(), &eigenvalues, params(delta, gamma)?)
        .map(PyNewton)
        .map_err(to_py)
}

/// Clusters as lists of input indices, in order of first appearance.
#[pyfunction]
#[pyo3(signature = (eigenvalues, delta=core::DEFAULT_DELTA))]
fn split_clusters(eigenvalues: Vec<Complex64>, delta: f64) -> PyResult<Vec<Vec<usize>>> {
    let p = core::split_clusters(&eigenvalues, delta).map_err(to_py)?;
    Ok(p.clusters().iter().map(|c| c.members().to_vec()).collect())
}

/// Complete homogeneous symmetric polynomial of degree `alpha`.
#[pyfunction]
fn complete_homogeneous(alpha: usize, offsets: Vec<Complex64>) -> Complex64 {
    core::complete_homogeneous(alpha, &offsets)
}

/// Divided differences over one cluster via its Taylor model; `rows[m][i]`.
#[pyfunction]
#[pyo3(signature = (points, function=None, gamma=core::DEFAULT_GAMMA))]
fn principal_dd(
    points: Vec<Complex64>,
    function: Option<&Bound<'_, PyAny>>,
    gamma: i32,
) -> PyResult<Vec<Vec<Complex64>>> {
    let f = self::function(function)?;
    let t = core::principal_dd(f.as_ref(), &points, gamma).map_err(to_py)?;
    Ok(t.rows().to_vec())
}

/// Divided differences by the classical recurrence; `rows[m][i]`.
#[pyfunction]
fn dd_table_direct(points: Vec<Complex64>, values: Vec<Complex64>) -> PyResult<Vec<Vec<Complex64>>> {
    let t = core::dd_table_direct(&points, &values).map_err(to_py)?;
    Ok(t.rows().to_vec())
}

/// Closed-form impulse response `Σ w · t^power e^{center t} / power!`.
#[pyclass(name = "SymbolicResponse")]
struct PyResponse(core::SymbolicResponse);

#[pymethods]
impl PyResponse {
    /// `(cluster, power, center, weight)` tuples.
    #[getter]
    fn terms(&self) -> Vec<(usize, usize, Complex64, Complex64)> {
        self.0
            .terms()
            .map(|(b, w)| (b.cluster, b.power, b.center, w))
            .collect()
    }

    fn __call__(&self, t: f64) -> Complex64 {
        self.0.eval(t)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    #[pyo3(signature = (digits=6))]
    fn format(&self, digits: usize) -> String {
        core::format_response(&self.0, digits)
    }

    fn __str__(&self) -> String {
        self.format(6)
    }
}

#[pyfunction]
#[pyo3(signature = (a, b, d, eigenvalues, delta=core::DEFAULT_DELTA, gamma=core::DEFAULT_GAMMA))]
fn impulse_response(
    a: Vec<Vec<Complex64>>,
    b: Vec<Complex64>,
    d: Vec<Complex64>,
    eigenvalues: Vec<Complex64>,
    delta: f64,
    gamma: i32,
) -> PyResult<PyResponse> {
    let system = ImpulseSystem {
        a: matrix(a)?,
        b: ComplexVector::new(b).map_err(to_py)?,
        d: ComplexVector::new(d).map_err(to_py)?,
        eigenvalues,
    };
    core::impulse_response(&system, params(delta, gamma)?)
        .map(PyResponse)
        .map_err(to_py)
}

/// Statistics of random trials, keyed like the CSV columns (plus medians).
#[pyfunction]
#[pyo3(signature = (n, max_cluster, gamma=core::DEFAULT_GAMMA, trials=100, seed=0, delta=core::DEFAULT_DELTA, eta=core::experiments::DEFAULT_ETA))]
#[allow(clippy::too_many_arguments)]
fn run_trials<'py>(
    py: Python<'py>,
    n: usize,
    max_cluster: usize,
    gamma: i32,
    trials: usize,
    seed: u64,
    delta: f64,
    eta: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let config = ExperimentConfig {
        delta,
        eta,
        ..ExperimentConfig::new(n, max_cluster, gamma).with_trials(trials).with_seed(seed)
    };
    let row = py.detach(|| core::run_trials(&config)).map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("n", row.n)?;
    out.set_item("K", row.max_cluster)?;
    out.set_item("gamma", row.gamma)?;
    out.set_item("trials", row.trials)?;
    out.set_item("max_kappa", row.max_kappa)?;
    out.set_item("mean_kappa", row.mean_kappa)?;
    out.set_item("max_relerr", row.max_rel_error)?;
    out.set_item("mean_relerr", row.mean_rel_error)?;
    out.set_item("M", row.exceeded)?;
    out.set_item("median_kappa", row.median_kappa)?;
    out.set_item("median_relerr", row.median_rel_error)?;
    Ok(out)
}

#[pymodule(name = "funm")]
fn funm_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(matrix_function, m)?)?;
    m.add_function(wrap_pyfunction!(build_newton, m)?)?;
    m.add_function(wrap_pyfunction!(split_clusters, m)?)?;
    m.add_function(wrap_pyfunction!(complete_homogeneous, m)?)?;
    m.add_function(wrap_pyfunction!(principal_dd, m)?)?;
    m.add_function(wrap_pyfunction!(dd_table_direct, m)?)?;
    m.add_function(wrap_pyfunction!(impulse_response, m)?)?;
    m.add_function(wrap_pyfunction!(run_trials, m)?)?;
    m.add_class::<PyNewton>()?;
    m.add_class::<PyResponse>()?;
    m.add("DEFAULT_DELTA", core::DEFAULT_DELTA)?;
    m.add("DEFAULT_GAMMA", core::DEFAULT_GAMMA)?;
    Ok(())
}
