//! Python bindings. Structured results (blow-up reports, verdicts,
//! verification reports) cross the boundary as plain dicts.

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use hessian_radial as hr;
use hessian_radial::io as hio;

create_exception!(hessian_radial, AdmissibilityError, PyValueError);
create_exception!(hessian_radial, NonConvergenceError, PyRuntimeError);

fn to_py(e: hr::Error) -> PyErr {
    match e {
        hr::Error::Admissibility { .. } => AdmissibilityError::new_err(e.to_string()),
        hr::Error::NonConvergence { .. } => NonConvergenceError::new_err(e.to_string()),
        hr::Error::Singularity { .. } | hr::Error::Evaluation { .. } | hr::Error::Refinement(_) => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn json_to_py<'py>(py: Python<'py>, value: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn serialize<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    json_to_py(py, &v)
}

#[pyclass(name = "ProblemParams", frozen, module = "hessian_radial")]
struct PyProblemParams {
    inner: hr::ProblemParams,
}

#[pymethods]
impl PyProblemParams {
    #[new]
    #[pyo3(signature = (n, k, mu = 0.0))]
    fn new(n: usize, k: usize, mu: f64) -> PyResult<Self> {
        Ok(Self {
            inner: hr::ProblemParams::new(n, k, mu).map_err(to_py)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k
    }

    #[getter]
    fn mu(&self) -> f64 {
        self.inner.mu
    }

    fn admissible_regime(&self) -> bool {
        self.inner.admissible_regime()
    }

    fn ko_equiv_regime(&self) -> bool {
        self.inner.ko_equiv_regime()
    }

    fn mu_zero(&self) -> f64 {
        self.inner.mu_zero()
    }

    fn __repr__(&self) -> String {
        format!(
            "ProblemParams(n={}, k={}, mu={})",
            self.inner.n, self.inner.k, self.inner.mu
        )
    }
}

/// A source term given as `const:<c>`, `exp:<alpha>` or `pow:<q>`.
#[pyclass(name = "Nonlinearity", frozen, module = "hessian_radial")]
struct PyNonlinearity {
    inner: hr::Nonlinearity,
}

#[pymethods]
impl PyNonlinearity {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        Ok(Self {
            inner: spec.parse().map_err(to_py)?,
        })
    }

    fn __call__(&self, t: f64) -> PyResult<f64> {
        self.inner.eval(t).map_err(to_py)
    }

    fn pow_k(&self, t: f64, k: usize) -> PyResult<f64> {
        self.inner.eval_pow_k(t, k).map_err(to_py)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Nonlinearity('{}')", self.inner)
    }
}

#[pyclass(name = "RadialProfile", frozen, module = "hessian_radial")]
struct PyRadialProfile {
    inner: hr::RadialProfile,
}

#[pymethods]
impl PyRadialProfile {
    #[getter]
    fn r(&self) -> Vec<f64> {
        self.inner.grid().to_vec()
    }

    #[getter]
    fn phi(&self) -> Vec<f64> {
        self.inner.phi().to_vec()
    }

    #[getter]
    fn dphi(&self) -> Vec<f64> {
        self.inner.dphi().to_vec()
    }

    #[getter]
    fn volterra(&self) -> Vec<f64> {
        self.inner.volterra().to_vec()
    }

    /// One entry per cell, or `None`.
    #[getter]
    fn defect(&self) -> Option<Vec<f64>> {
        self.inner.defect().map(<[f64]>::to_vec)
    }

    #[getter]
    fn truncated(&self) -> bool {
        self.inner.truncated()
    }

    fn epsilon_defect(&self) -> PyResult<f64> {
        hr::epsilon_defect(&self.inner).map_err(to_py)
    }

    fn to_csv(&self) -> String {
        hio::profile_csv_string(&self.inner)
    }

    fn to_json<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        json_to_py(py, &hio::profile_json(&self.inner))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

#[pyfunction]
fn elem_sym(values: Vec<f64>, p: usize) -> PyResult<f64> {
    hr::elem_sym(&hr::EigenSpectrum::new(values).map_err(to_py)?, p).map_err(to_py)
}

#[pyfunction]
fn in_gamma_k(values: Vec<f64>, k: usize) -> PyResult<bool> {
    hr::in_gamma_k(&hr::EigenSpectrum::new(values).map_err(to_py)?, k).map_err(to_py)
}

#[pyfunction]
fn binom(n: u64, k: u64) -> PyResult<u64> {
    hr::binom(n, k).map_err(to_py)
}

#[pyfunction]
fn mu_zero(n: usize, k: usize) -> PyResult<f64> {
    hr::mu_zero(n, k).map_err(to_py)
}

#[pyfunction]
fn sk_radial(p: &PyProblemParams, r: f64, dphi: f64, ddphi: f64) -> PyResult<f64> {
    hr::sk_radial(&p.inner, r, dphi, ddphi).map_err(to_py)
}

#[pyfunction]
fn radial_spectrum(p: &PyProblemParams, r: f64, dphi: f64, ddphi: f64) -> PyResult<Vec<f64>> {
    Ok(hr::radial_spectrum(&p.inner, r, dphi, ddphi)
        .map_err(to_py)?
        .into_inner())
}

#[pyfunction]
#[pyo3(signature = (p, f, a, r_end, h, tol = 1e-10, max_iter = 1000))]
fn picard_solve(
    p: &PyProblemParams,
    f: &PyNonlinearity,
    a: f64,
    r_end: f64,
    h: f64,
    tol: f64,
    max_iter: usize,
) -> PyResult<PyRadialProfile> {
    let inner = hr::picard_solve(&p.inner, &f.inner, a, r_end, h, tol, max_iter).map_err(to_py)?;
    Ok(PyRadialProfile { inner })
}

#[pyfunction]
fn euler_break_line(p: &PyProblemParams, f: &PyNonlinearity, a: f64, r_end: f64, h: f64) -> PyResult<PyRadialProfile> {
    let inner = hr::euler_break_line(&p.inner, &f.inner, a, r_end, h).map_err(to_py)?;
    Ok(PyRadialProfile { inner })
}

/// Returns `{"status": ..., ...}` as produced by the solver's blow-up scan.
#[pyfunction]
#[pyo3(signature = (p, f, a, r_max = 50.0, phi_cap = 1e300, h0 = 1e-3))]
fn detect_blowup<'py>(
    py: Python<'py>,
    p: &PyProblemParams,
    f: &PyNonlinearity,
    a: f64,
    r_max: f64,
    phi_cap: f64,
    h0: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let report = hr::detect_blowup(&p.inner, &f.inner, a, r_max, phi_cap, h0).map_err(to_py)?;
    serialize(py, &report.status)
}

#[pyfunction]
#[pyo3(signature = (f, k, numeric = false, tau_lo = 1.0, tau_hi = 1e6, nodes = 2000))]
fn ko_classify<'py>(
    py: Python<'py>,
    f: &PyNonlinearity,
    k: usize,
    numeric: bool,
    tau_lo: f64,
    tau_hi: f64,
    nodes: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let v = if numeric {
        hr::ko_classify_numeric(&f.inner, k, tau_lo, tau_hi, nodes)
    } else {
        hr::ko_classify(&f.inner, k)
    }
    .map_err(to_py)?;
    serialize(py, &v)
}

/// Classifies analytically and combines with the `(k, μ)` regime.
#[pyfunction]
fn existence_verdict<'py>(py: Python<'py>, p: &PyProblemParams, f: &PyNonlinearity) -> PyResult<Bound<'py, PyAny>> {
    let ko = hr::ko_classify(&f.inner, p.inner.k).map_err(to_py)?;
    let report = hr::existence_verdict(&p.inner, &f.inner, &ko);
    let out = PyDict::new(py);
    out.set_item("ko", serialize(py, &ko)?)?;
    out.set_item("existence", serialize(py, &report)?)?;
    Ok(out.into_any())
}

#[pyfunction]
fn gaussian_spectrum(p: &PyProblemParams, a: f64, r: f64) -> PyResult<Vec<f64>> {
    Ok(hr::gaussian_spectrum(&p.inner, a, r).map_err(to_py)?.into_inner())
}

#[pyfunction]
#[pyo3(signature = (p, a, alpha = 1.0, radii = None, r_max = 10.0))]
fn verify_subsolution<'py>(
    py: Python<'py>,
    p: &PyProblemParams,
    a: f64,
    alpha: f64,
    radii: Option<Vec<f64>>,
    r_max: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let radii = match radii {
        Some(r) => r,
        None => hr::default_radii(&p.inner, a, r_max).map_err(to_py)?,
    };
    serialize(py, &hr::verify_subsolution(&p.inner, a, alpha, &radii).map_err(to_py)?)
}

#[pyfunction]
fn example_4_1_threshold(n: usize, k: usize) -> PyResult<f64> {
    hr::example_4_1_threshold(n, k).map_err(to_py)
}

#[pyfunction]
fn example_4_2_threshold(n: usize, mu: f64) -> f64 {
    hr::example_4_2_threshold(n, mu)
}

#[pyfunction]
fn cauchy_young_slack(n: usize, mu: f64, a: f64, r: f64) -> f64 {
    hr::cauchy_young_slack(n, mu, a, r)
}

#[pymodule]
#[pyo3(name = "hessian_radial")]
fn hessian_radial_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProblemParams>()?;
    m.add_class::<PyNonlinearity>()?;
    m.add_class::<PyRadialProfile>()?;
    m.add("AdmissibilityError", m.py().get_type::<AdmissibilityError>())?;
    m.add("NonConvergenceError", m.py().get_type::<NonConvergenceError>())?;
    m.add_function(wrap_pyfunction!(elem_sym, m)?)?;
    m.add_function(wrap_pyfunction!(in_gamma_k, m)?)?;
    m.add_function(wrap_pyfunction!(binom, m)?)?;
    m.add_function(wrap_pyfunction!(mu_zero, m)?)?;
    m.add_function(wrap_pyfunction!(sk_radial, m)?)?;
    m.add_function(wrap_pyfunction!(radial_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(picard_solve, m)?)?;
    m.add_function(wrap_pyfunction!(euler_break_line, m)?)?;
    m.add_function(wrap_pyfunction!(detect_blowup, m)?)?;
    m.add_function(wrap_pyfunction!(ko_classify, m)?)?;
    m.add_function(wrap_pyfunction!(existence_verdict, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(verify_subsolution, m)?)?;
    m.add_function(wrap_pyfunction!(example_4_1_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(example_4_2_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(cauchy_young_slack, m)?)?;
    Ok(())
}
