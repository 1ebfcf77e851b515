//! Python bindings. Signals cross the boundary as lists of complex (or
//! float) values in the group's canonical order; reports come back as dicts.

use std::sync::Arc;

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use abelsob::checks::{run_checks as run_check_suite, CheckConfig};
use abelsob::nonlinear::{self, SolverConfig};
use abelsob::spectral;
use abelsob::{Error, FiniteAbelianGroup, GroupRef, Nonlinearity, OperatorParams, Signal, SobolevParams, Spectrum, Weight};

fn err(e: Error) -> PyErr {
    match e {
        Error::Diverged(_) | Error::MaxIterations(_) | Error::NotInDomain { .. } | Error::NonReal { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_dict<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn weight_of(name: &str) -> PyResult<Weight> {
    Weight::from_name(name).map_err(err)
}

fn sobolev(s: f64) -> PyResult<SobolevParams> {
    SobolevParams::new(s).map_err(err)
}

/// A product of cyclic groups, e.g. `Group("Z8xZ8")` or `Group("Z2^6")`.
#[pyclass(frozen, from_py_object, module = "pyabelsob")]
#[derive(Clone)]
struct Group {
    inner: GroupRef,
}

impl Group {
    fn signal(&self, values: Vec<Complex64>) -> PyResult<Signal> {
        Signal::new(self.inner.clone(), values).map_err(err)
    }
}

#[pymethods]
impl Group {
    #[new]
    fn new(descriptor: &str) -> PyResult<Self> {
        let g = FiniteAbelianGroup::parse(descriptor).map_err(err)?;
        Ok(Self { inner: Arc::new(g) })
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    #[getter]
    fn factors(&self) -> Vec<usize> {
        self.inner.factors().to_vec()
    }

    #[getter]
    fn descriptor(&self) -> String {
        self.inner.descriptor()
    }

    /// Mixed-radix coordinates of a linear index.
    fn coords(&self, index: usize) -> PyResult<Vec<usize>> {
        if index >= self.inner.order() {
            return Err(PyValueError::new_err(format!("index {index} out of range")));
        }
        Ok(self.inner.coords_of(index))
    }

    fn __repr__(&self) -> String {
        format!("Group({:?})", self.inner.descriptor())
    }

    fn __len__(&self) -> usize {
        self.inner.order()
    }
}

/// `L_c` on a group with a named weight.
#[pyclass(frozen, module = "pyabelsob")]
struct StringOperator {
    group: Group,
    inner: abelsob::StringOperator,
}

#[pymethods]
impl StringOperator {
    #[new]
    #[pyo3(signature = (group, weight = "sym-euclid", c = 1.0))]
    fn new(group: Group, weight: &str, c: f64) -> PyResult<Self> {
        let op = OperatorParams::new(c).map_err(err)?;
        let inner = abelsob::StringOperator::from_weight(&group.inner, &weight_of(weight)?, op).map_err(err)?;
        Ok(Self { group, inner })
    }

    fn apply(&self, u: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
        let out = self.inner.apply(&self.group.signal(u)?).map_err(err)?;
        Ok(out.values().to_vec())
    }

    fn solve(&self, g: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
        let out = self.inner.solve(&self.group.signal(g)?).map_err(err)?;
        Ok(out.values().to_vec())
    }

    /// Solution plus the isometry / sup-norm report.
    #[pyo3(signature = (g, s = 1.0))]
    fn solve_with_report<'py>(
        &self,
        py: Python<'py>,
        g: Vec<Complex64>,
        s: f64,
    ) -> PyResult<(Vec<Complex64>, Bound<'py, PyAny>)> {
        let (u, rep) = self.inner.solve_with_report(&self.group.signal(g)?, sobolev(s)?).map_err(err)?;
        Ok((u.values().to_vec(), to_dict(py, &rep)?))
    }

    fn hcinf_norm(&self, f: Vec<Complex64>) -> PyResult<f64> {
        self.inner.hcinf_norm(&self.group.signal(f)?).map_err(err)
    }

    #[getter]
    fn overflow_count(&self) -> usize {
        self.inner.multiplier().overflow_count()
    }

    #[getter]
    fn log_multiplier(&self) -> Vec<f64> {
        self.inner.multiplier().log_values().to_vec()
    }
}

#[pyfunction]
#[pyo3(signature = (group, values, naive = false))]
fn dft(group: &Group, values: Vec<Complex64>, naive: bool) -> PyResult<Vec<Complex64>> {
    let f = group.signal(values)?;
    let spec = if naive { spectral::dft_naive(&f) } else { spectral::dft_fast(&f) };
    Ok(spec.into_values())
}

#[pyfunction]
#[pyo3(signature = (group, coeffs, naive = false))]
fn idft(group: &Group, coeffs: Vec<Complex64>, naive: bool) -> PyResult<Vec<Complex64>> {
    let spec = Spectrum::new(group.inner.clone(), coeffs).map_err(err)?;
    let f = if naive { spectral::idft_naive(&spec) } else { spectral::idft(&spec) };
    Ok(f.values().to_vec())
}

#[pyfunction]
#[pyo3(signature = (group, values, s, weight = "sym-euclid"))]
fn sobolev_norm(group: &Group, values: Vec<Complex64>, s: f64, weight: &str) -> PyResult<f64> {
    abelsob::sobolev::sobolev_norm(&group.signal(values)?, &weight_of(weight)?, sobolev(s)?).map_err(err)
}

#[pyfunction]
fn lp_norm(group: &Group, values: Vec<Complex64>, p: f64) -> PyResult<f64> {
    abelsob::sobolev::lp_norm(&group.signal(values)?, p).map_err(err)
}

/// `C`, `D` and the `L^{alpha*}` constant (when `alpha` is given) as a dict.
#[pyfunction]
#[pyo3(signature = (group, s, weight = "sym-euclid", alpha = None))]
fn constants<'py>(
    py: Python<'py>,
    group: &Group,
    s: f64,
    weight: &str,
    alpha: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let prof = weight_of(weight)?.profile(&group.inner).map_err(err)?;
    let p = sobolev(s)?;
    let d = PyDict::new(py);
    d.set_item("sup", prof.embedding_constant_sup(p))?;
    d.set_item("algebra", prof.algebra_constant(p))?;
    if let Some(a) = alpha {
        let e = prof.embedding_constant_lalpha(p, a).map_err(err)?;
        d.set_item("alpha_star", e.alpha_star)?;
        d.set_item("lalpha", e.constant)?;
    }
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (group, shift, s, weight = "sym-euclid"))]
fn translation_modulus(group: &Group, shift: Vec<usize>, s: f64, weight: &str) -> PyResult<f64> {
    let h = group.inner.element(shift).map_err(err)?;
    abelsob::sobolev::translation_modulus(&group.inner, &weight_of(weight)?, sobolev(s)?, &h).map_err(err)
}

/// Solves `L_c phi = U(., phi) - phi`. Returns `(phi, report)`; raises
/// `RuntimeError` when the iteration does not converge.
#[pyfunction]
#[pyo3(signature = (
    group, nonlinearity = "forced-power:2,0.1", forcing = None, forcing_norm = 0.01,
    weight = "sym-euclid", c = 1.0, s = 1.0, theta = 1.0, tol = 1e-10, max_iter = 500, epsilon_ball = None,
))]
#[allow(clippy::too_many_arguments)]
fn solve_nonlinear<'py>(
    py: Python<'py>,
    group: &Group,
    nonlinearity: &str,
    forcing: Option<Vec<f64>>,
    forcing_norm: f64,
    weight: &str,
    c: f64,
    s: f64,
    theta: f64,
    tol: f64,
    max_iter: usize,
    epsilon_ball: Option<f64>,
) -> PyResult<(Vec<f64>, Bound<'py, PyAny>)> {
    let g = &group.inner;
    let h = match forcing {
        Some(v) => group.signal(v.into_iter().map(Complex64::from).collect())?,
        None => nonlinear::low_frequency_forcing(g, forcing_norm).map_err(err)?,
    };
    let nl = Nonlinearity::from_spec(nonlinearity, g, Some(&h)).map_err(err)?;
    let lc = abelsob::StringOperator::from_weight(g, &weight_of(weight)?, OperatorParams::new(c).map_err(err)?)
        .map_err(err)?;
    let cfg = SolverConfig {
        theta,
        tol,
        max_iter,
        epsilon_ball,
        s,
        ..SolverConfig::default()
    };
    let (phi, rep) = py.detach(|| nonlinear::solve_nonlinear_op(&nl, &lc, &cfg)).map_err(err)?;
    Ok((phi.real_values(), to_dict(py, &rep)?))
}

/// Runs the property suites and returns the result document.
#[pyfunction]
#[pyo3(signature = (seed = 42, samples = 200, translation_samples = 100, suite = "all"))]
fn run_checks<'py>(
    py: Python<'py>,
    seed: u64,
    samples: usize,
    translation_samples: usize,
    suite: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = CheckConfig {
        seed,
        samples,
        translation_samples,
        suite: suite.parse().map_err(err)?,
        ..CheckConfig::default()
    };
    let res = py.detach(|| run_check_suite(&cfg)).map_err(err)?;
    to_dict(py, &res)
}

#[pymodule]
fn pyabelsob(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", abelsob::VERSION)?;
    m.add_class::<Group>()?;
    m.add_class::<StringOperator>()?;
    m.add_function(wrap_pyfunction!(dft, m)?)?;
    m.add_function(wrap_pyfunction!(idft, m)?)?;
    m.add_function(wrap_pyfunction!(sobolev_norm, m)?)?;
    m.add_function(wrap_pyfunction!(lp_norm, m)?)?;
    m.add_function(wrap_pyfunction!(constants, m)?)?;
    m.add_function(wrap_pyfunction!(translation_modulus, m)?)?;
    m.add_function(wrap_pyfunction!(solve_nonlinear, m)?)?;
    m.add_function(wrap_pyfunction!(run_checks, m)?)?;
    Ok(())
}
