//! Python bindings: channels, Doeblin coefficients, divergences, oracles,
//! and the application-bound calculators.
//!
//! Matrices cross the boundary as row-major nested lists with `[re, im]`
//! complex entries, matching the JSON schema of the CLI.

use doeblin::applications;
use doeblin::channels::{Family, QuantumState};
use doeblin::divergences;
use doeblin::doeblin as coeffs;
use doeblin::error::Error;
use doeblin::linalg::{ComplexMatrix, HermitianOperator, C64};
use doeblin::oracles;
use doeblin::schema;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

type Matrix = Vec<Vec<[f64; 2]>>;

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Input(msg) => PyValueError::new_err(msg),
        Error::Numerical(msg) => PyRuntimeError::new_err(msg),
    }
}

fn matrix_in(m: &Matrix) -> PyResult<ComplexMatrix> {
    let rows: Vec<Vec<C64>> = m
        .iter()
        .map(|row| row.iter().map(|&[re, im]| C64::new(re, im)).collect())
        .collect();
    ComplexMatrix::from_rows(&rows).map_err(to_py_err)
}

fn hermitian_in(m: &Matrix) -> PyResult<HermitianOperator> {
    HermitianOperator::new(matrix_in(m)?).map_err(to_py_err)
}

fn state_in(m: &Matrix) -> PyResult<QuantumState> {
    QuantumState::new(hermitian_in(m)?).map_err(to_py_err)
}

fn matrix_out(m: &ComplexMatrix) -> Vec<Vec<(f64, f64)>> {
    (0..m.rows())
        .map(|r| (0..m.cols()).map(|c| (m[(r, c)].re, m[(r, c)].im)).collect())
        .collect()
}

fn report_value(report: &coeffs::CoefficientReport) -> PyResult<f64> {
    coeffs::expect_optimal(report).map_err(to_py_err)
}

/// A CPTP map with the Choi matrix as canonical representation.
#[pyclass(name = "Channel", from_py_object)]
#[derive(Clone)]
struct PyChannel {
    inner: doeblin::Channel,
}

#[pymethods]
impl PyChannel {
    /// Builds a channel from its JSON description (same schema as the CLI).
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyChannel {
            inner: schema::parse_channel(&value).map_err(to_py_err)?,
        })
    }

    #[staticmethod]
    fn identity(dim: usize) -> Self {
        PyChannel {
            inner: doeblin::Channel::identity(dim),
        }
    }

    #[staticmethod]
    fn gad(p: f64, eta: f64) -> PyResult<Self> {
        Ok(PyChannel {
            inner: doeblin::Channel::make(Family::Gad { p, eta }).map_err(to_py_err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (q, dim = 2))]
    fn depolarizing(q: f64, dim: usize) -> PyResult<Self> {
        Ok(PyChannel {
            inner: doeblin::Channel::make(Family::Depolarizing { q, dim }).map_err(to_py_err)?,
        })
    }

    #[staticmethod]
    fn replacer(state: Matrix, d_in: usize) -> PyResult<Self> {
        Ok(PyChannel {
            inner: doeblin::Channel::make(Family::Replacer {
                state: state_in(&state)?,
                d_in,
            })
            .map_err(to_py_err)?,
        })
    }

    #[staticmethod]
    fn cq(states: Vec<Matrix>) -> PyResult<Self> {
        let states = states
            .iter()
            .map(state_in)
            .collect::<PyResult<Vec<_>>>()?;
        Ok(PyChannel {
            inner: doeblin::Channel::make(Family::Cq { states }).map_err(to_py_err)?,
        })
    }

    #[staticmethod]
    fn from_kraus(kraus: Vec<Matrix>, d_in: usize, d_out: usize) -> PyResult<Self> {
        let ops = kraus
            .iter()
            .map(matrix_in)
            .collect::<PyResult<Vec<_>>>()?;
        Ok(PyChannel {
            inner: doeblin::Channel::from_kraus(&ops, d_in, d_out).map_err(to_py_err)?,
        })
    }

    #[getter]
    fn d_in(&self) -> usize {
        self.inner.d_in()
    }

    #[getter]
    fn d_out(&self) -> usize {
        self.inner.d_out()
    }

    fn choi(&self) -> Vec<Vec<(f64, f64)>> {
        matrix_out(self.inner.choi().matrix())
    }

    fn apply(&self, rho: Matrix) -> PyResult<Vec<Vec<(f64, f64)>>> {
        let out = self.inner.apply(&state_in(&rho)?).map_err(to_py_err)?;
        Ok(matrix_out(out.density().matrix()))
    }

    fn tensor(&self, other: &PyChannel) -> PyResult<Self> {
        Ok(PyChannel {
            inner: doeblin::Channel::tensor(&self.inner, &other.inner).map_err(to_py_err)?,
        })
    }

    /// Serial composition self after `first`.
    fn compose(&self, first: &PyChannel) -> PyResult<Self> {
        Ok(PyChannel {
            inner: doeblin::Channel::compose(&self.inner, &first.inner).map_err(to_py_err)?,
        })
    }

    fn tensor_power(&self, n: usize) -> PyResult<Self> {
        Ok(PyChannel {
            inner: coeffs::tensor_power(&self.inner, n).map_err(to_py_err)?,
        })
    }

    fn alpha(&self) -> PyResult<f64> {
        report_value(&coeffs::alpha(&self.inner).map_err(to_py_err)?)
    }

    fn alpha_wang(&self) -> PyResult<f64> {
        report_value(&coeffs::alpha_wang(&self.inner).map_err(to_py_err)?)
    }

    fn alpha_plus(&self) -> PyResult<f64> {
        report_value(&coeffs::alpha_plus(&self.inner).map_err(to_py_err)?)
    }

    /// Cone-restricted coefficient; cone is "pos", "ppt", or "ppt_sym2".
    fn alpha_cone(&self, cone: &str) -> PyResult<f64> {
        let cone = match cone {
            "pos" => coeffs::ConeChoice::Pos,
            "ppt" => coeffs::ConeChoice::Ppt,
            "ppt_sym2" => coeffs::ConeChoice::PptSym2,
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown cone '{other}' (expected pos|ppt|ppt_sym2)"
                )))
            }
        };
        report_value(&coeffs::alpha_cone(&self.inner, cone).map_err(to_py_err)?)
    }

    fn reverse(&self) -> PyResult<f64> {
        report_value(&coeffs::reverse_doeblin(&self.inner).map_err(to_py_err)?)
    }

    fn alpha_analytic(&self) -> PyResult<Option<f64>> {
        coeffs::alpha_analytic(&self.inner).map_err(to_py_err)
    }

    /// Full coefficient report as a JSON string.
    fn alpha_report(&self) -> PyResult<String> {
        let report = coeffs::alpha(&self.inner).map_err(to_py_err)?;
        Ok(schema::to_json_string(&schema::coefficient_report_to_value(
            &report, true,
        )))
    }

    /// Contraction/expansion bound report as a JSON string.
    fn contraction_bounds(&self) -> PyResult<String> {
        let report = coeffs::contraction_bounds(&self.inner).map_err(to_py_err)?;
        Ok(schema::to_json_string(&schema::contraction_report_to_value(
            &report,
        )))
    }

    fn stokes(&self) -> PyResult<(Vec<f64>, Vec<Vec<f64>>)> {
        let (t, tm) = self.inner.stokes_of_qubit().map_err(to_py_err)?;
        Ok((t.to_vec(), tm.iter().map(|r| r.to_vec()).collect()))
    }

    fn fixed_point(&self) -> PyResult<(Vec<Vec<(f64, f64)>>, bool)> {
        let (state, unique) = self.inner.fixed_point().map_err(to_py_err)?;
        Ok((matrix_out(state.density().matrix()), unique))
    }

    fn is_unital(&self) -> bool {
        self.inner.is_unital(1e-9)
    }

    fn __repr__(&self) -> String {
        format!("Channel(d_in={}, d_out={})", self.inner.d_in(), self.inner.d_out())
    }
}

#[pyfunction]
fn trace_distance(rho: Matrix, sigma: Matrix) -> PyResult<f64> {
    divergences::trace_distance(&hermitian_in(&rho)?, &hermitian_in(&sigma)?).map_err(to_py_err)
}

#[pyfunction]
fn fidelity(rho: Matrix, sigma: Matrix) -> PyResult<f64> {
    divergences::fidelity(&hermitian_in(&rho)?, &hermitian_in(&sigma)?).map_err(to_py_err)
}

#[pyfunction]
fn hockey_stick(rho: Matrix, sigma: Matrix, gamma: f64) -> PyResult<f64> {
    divergences::hockey_stick(&hermitian_in(&rho)?, &hermitian_in(&sigma)?, gamma)
        .map_err(to_py_err)
}

#[pyfunction]
fn d_max(rho: Matrix, sigma: Matrix) -> PyResult<f64> {
    divergences::d_max(&hermitian_in(&rho)?, &hermitian_in(&sigma)?).map_err(to_py_err)
}

#[pyfunction]
fn hellinger_half(rho: Matrix, sigma: Matrix) -> PyResult<f64> {
    divergences::hellinger_half(&hermitian_in(&rho)?, &hermitian_in(&sigma)?).map_err(to_py_err)
}

#[pyfunction]
fn exclusion_error(priors: Vec<f64>, states: Vec<Matrix>) -> PyResult<f64> {
    let states = states
        .iter()
        .map(state_in)
        .collect::<PyResult<Vec<_>>>()?;
    let ensemble = oracles::Ensemble::new(priors, states).map_err(to_py_err)?;
    oracles::exclusion_error(&ensemble).map_err(to_py_err)
}

#[pyfunction]
fn eta_tr_estimate(channel: &PyChannel, restarts: usize, seed: u64) -> PyResult<f64> {
    oracles::eta_tr_estimate(&channel.inner, restarts, seed).map_err(to_py_err)
}

#[pyfunction]
fn alpha_i_seesaw(channel: &PyChannel, restarts: usize, seed: u64) -> PyResult<f64> {
    oracles::alpha_i_seesaw(&channel.inner, restarts, seed).map_err(to_py_err)
}

#[pyfunction]
#[pyo3(signature = (alphas, i, norm_o = 1.0, unital = false))]
fn barren_plateau_bound(alphas: Vec<f64>, i: usize, norm_o: f64, unital: bool) -> PyResult<f64> {
    applications::barren_plateau_bound(&alphas, i, norm_o, unital).map_err(to_py_err)
}

#[pyfunction]
fn error_mitigation_min_samples(alphas: Vec<f64>, delta: f64) -> PyResult<f64> {
    applications::error_mitigation_min_samples(&alphas, delta).map_err(to_py_err)
}

#[pyfunction]
fn fairness_beta(gamma: f64, alpha: f64) -> PyResult<f64> {
    applications::fairness_beta(gamma, alpha).map_err(to_py_err)
}

/// Mixing/decoupling time bound; None means unbounded (alpha = 0).
#[pyfunction]
fn convergence_time_bound(alpha: f64, delta: f64) -> PyResult<Option<u64>> {
    applications::convergence_time_bound(alpha, delta).map_err(to_py_err)
}

/// Empirical convergence time versus the Doeblin bound. `mode` is "mixing"
/// or "decoupling"; returns (measured, bound or None, bound_respected).
#[pyfunction]
#[pyo3(signature = (channel, delta, mode = "mixing", samples = 100, seed = 0))]
fn simulate_convergence(
    channel: &PyChannel,
    delta: f64,
    mode: &str,
    samples: usize,
    seed: u64,
) -> PyResult<(f64, Option<f64>, bool)> {
    let mode = match mode {
        "mixing" => applications::ConvergenceMode::Mixing,
        "decoupling" => applications::ConvergenceMode::Decoupling,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown mode '{other}' (expected mixing|decoupling)"
            )))
        }
    };
    let report = applications::simulate_convergence(&channel.inner, delta, mode, samples, seed)
        .map_err(to_py_err)?;
    let emp = report
        .empirical
        .ok_or_else(|| PyRuntimeError::new_err("simulation produced no empirical data"))?;
    let bound = if report.value.is_finite() {
        Some(report.value)
    } else {
        None
    };
    Ok((emp.measured, bound, emp.bound_respected))
}

#[pymodule]
fn doeblin_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyChannel>()?;
    m.add_function(wrap_pyfunction!(trace_distance, m)?)?;
    m.add_function(wrap_pyfunction!(fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(hockey_stick, m)?)?;
    m.add_function(wrap_pyfunction!(d_max, m)?)?;
    m.add_function(wrap_pyfunction!(hellinger_half, m)?)?;
    m.add_function(wrap_pyfunction!(exclusion_error, m)?)?;
    m.add_function(wrap_pyfunction!(eta_tr_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_i_seesaw, m)?)?;
    m.add_function(wrap_pyfunction!(barren_plateau_bound, m)?)?;
    m.add_function(wrap_pyfunction!(error_mitigation_min_samples, m)?)?;
    m.add_function(wrap_pyfunction!(fairness_beta, m)?)?;
    m.add_function(wrap_pyfunction!(convergence_time_bound, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_convergence, m)?)?;
    Ok(())
}
