//! Python extension module `_nblab`: the main types and operations of the
//! Nyman-Beurling laboratory.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use nblab_core::criteria::{self, BasisMode, BasisSpec, Target};
use nblab_core::families::{self, PsiMethod};
use nblab_core::gram;
use nblab_core::muntz::{self, KernelSpec};
use nblab_core::plancherel::{plancherel_residual, CriticalLineGrid};
use nblab_core::rng::RngStream;
use nblab_core::zeta;
use nblab_core::Error as CoreError;

fn py_err(e: CoreError) -> PyErr {
    match &e {
        CoreError::Resource { .. } | CoreError::Range(_) => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Numeric value with a certified two-sided error bound.
#[pyclass(name = "Bracketed", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyBracketed {
    #[pyo3(get)]
    value: f64,
    #[pyo3(get)]
    err: f64,
}

#[pymethods]
impl PyBracketed {
    fn contains(&self, x: f64) -> bool {
        (x - self.value).abs() <= self.err
    }

    fn __repr__(&self) -> String {
        format!("Bracketed(value={}, err={:e})", self.value, self.err)
    }
}

impl From<nblab_core::BracketedValue> for PyBracketed {
    fn from(b: nblab_core::BracketedValue) -> Self {
        PyBracketed { value: b.value, err: b.err }
    }
}

/// Positive law of a random dilation factor.
#[pyclass(name = "Distribution", frozen, from_py_object)]
#[derive(Clone)]
struct PyDistribution {
    inner: families::Distribution,
}

#[pymethods]
impl PyDistribution {
    /// Parse a literal such as `exp:2`, `gamma:3:7` or `scaled:0.25:exp:1`.
    #[new]
    fn new(literal: &str) -> PyResult<Self> {
        Ok(PyDistribution { inner: literal.parse().map_err(py_err)? })
    }

    #[staticmethod]
    fn point_mass(theta: f64) -> PyResult<Self> {
        Self::new(&format!("pointmass:{theta}"))
    }

    #[staticmethod]
    fn exponential(rate: f64) -> PyResult<Self> {
        Self::new(&format!("exp:{rate}"))
    }

    #[staticmethod]
    fn gamma(shape: f64, rate: f64) -> PyResult<Self> {
        Self::new(&format!("gamma:{shape}:{rate}"))
    }

    #[staticmethod]
    fn sq_gamma(shape: f64, rate: f64) -> PyResult<Self> {
        Self::new(&format!("sqgamma:{shape}:{rate}"))
    }

    #[staticmethod]
    fn scaled(inner: &PyDistribution, factor: f64) -> PyResult<Self> {
        let d = families::Distribution::Scaled {
            inner: Box::new(inner.inner.clone()),
            factor,
        };
        d.validate().map_err(py_err)?;
        Ok(PyDistribution { inner: d })
    }

    /// `E X^alpha` in closed form.
    fn moment(&self, alpha: f64) -> PyResult<f64> {
        self.inner.moment(alpha).map_err(py_err)
    }

    /// `P(X >= x)`.
    fn survival(&self, x: f64) -> PyResult<f64> {
        self.inner.survival(x).map_err(py_err)
    }

    /// `int_M^inf P(X >= x) dx = E (X - M)^+`.
    fn integrated_survival(&self, m: f64) -> PyResult<f64> {
        self.inner.integrated_survival(m).map_err(py_err)
    }

    /// Deterministic i.i.d. draws for the given (seed, stream) pair.
    #[pyo3(signature = (count, seed, stream=0))]
    fn sample(&self, count: usize, seed: u64, stream: u64) -> PyResult<Vec<f64>> {
        self.inner.sample(RngStream::new(seed, stream), count).map_err(py_err)
    }

    /// Mean Beurling function `Psi(t) = E{X/t}`;
    /// method is `closed_form` or `muntz_series`.
    #[pyo3(signature = (t, method="muntz_series"))]
    fn mean_beurling(&self, t: f64, method: &str) -> PyResult<f64> {
        let m = match method {
            "closed_form" => PsiMethod::ClosedForm,
            "muntz_series" => PsiMethod::MuntzSeries,
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown method `{other}` (use closed_form, muntz_series, or mean_beurling_mc)"
                )))
            }
        };
        families::mean_beurling(&self.inner, t, &m).map_err(py_err)
    }

    /// Monte Carlo estimate of `Psi(t)`.
    #[pyo3(signature = (t, count, seed, stream=0))]
    fn mean_beurling_mc(&self, t: f64, count: usize, seed: u64, stream: u64) -> PyResult<f64> {
        families::mean_beurling(
            &self.inner,
            t,
            &PsiMethod::MonteCarlo { count, stream: RngStream::new(seed, stream) },
        )
        .map_err(py_err)
    }

    /// `E ||rho_X||^2 = K E X`.
    fn mean_rho_norm_sq(&self) -> PyResult<PyBracketed> {
        Ok(self.inner.mean_rho_norm_sq().map_err(py_err)?.into())
    }

    fn __repr__(&self) -> String {
        format!("Distribution('{}')", self.inner)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }
}

/// Result of a projection solve or residual evaluation.
#[pyclass(name = "DistanceReport", frozen)]
struct PyDistanceReport {
    #[pyo3(get)]
    coeffs: Vec<f64>,
    #[pyo3(get)]
    distance_sq: f64,
    #[pyo3(get)]
    certified_slack: f64,
    #[pyo3(get)]
    reg_cutoff: f64,
    #[pyo3(get)]
    dropped_modes: usize,
    #[pyo3(get)]
    condition_estimate: f64,
    #[pyo3(get)]
    clamped: bool,
}

#[pymethods]
impl PyDistanceReport {
    fn __repr__(&self) -> String {
        format!(
            "DistanceReport(distance_sq={}, slack={:e}, dropped={})",
            self.distance_sq, self.certified_slack, self.dropped_modes
        )
    }
}

impl From<gram::DistanceReport> for PyDistanceReport {
    fn from(r: gram::DistanceReport) -> Self {
        PyDistanceReport {
            coeffs: r.coeffs,
            distance_sq: r.distance_sq,
            certified_slack: r.certified_slack,
            reg_cutoff: r.reg_cutoff,
            dropped_modes: r.dropped_modes,
            condition_estimate: r.condition_estimate,
            clamped: r.clamped,
        }
    }
}

#[pyfunction]
fn euler_gamma() -> f64 {
    nblab_core::bracket::EULER_GAMMA
}

/// `K = ||rho_1||^2`, computed once per process.
#[pyfunction]
fn k_const() -> PyBracketed {
    nblab_core::bracket::k_const().into()
}

/// `{theta/t}`.
#[pyfunction]
fn rho_eval(theta: f64, t: f64) -> PyResult<f64> {
    nblab_core::beurling::rho_eval(theta, t).map_err(py_err)
}

/// Certified `<rho_a, rho_b>`.
#[pyfunction]
#[pyo3(signature = (a, b, tol=1e-6))]
fn inner_rho_rho(a: f64, b: f64, tol: f64) -> PyResult<PyBracketed> {
    Ok(nblab_core::beurling::inner_rho_rho(a, b, tol).map_err(py_err)?.into())
}

/// Certified `<chi, rho_theta>`.
#[pyfunction]
#[pyo3(signature = (theta, tol=1e-6))]
fn inner_chi_rho(theta: f64, tol: f64) -> PyResult<PyBracketed> {
    Ok(nblab_core::beurling::inner_chi_rho(theta, tol).map_err(py_err)?.into())
}

/// `||rho_theta||^2 = K theta`.
#[pyfunction]
fn norm_rho_sq(theta: f64) -> PyResult<PyBracketed> {
    Ok(nblab_core::beurling::norm_rho_sq(theta).map_err(py_err)?.into())
}

/// Mobius function values on 1..=n.
#[pyfunction]
fn mobius_sieve(n: usize) -> Vec<i8> {
    criteria::mobius_sieve(n)
}

/// Deterministic distance scan: rows `(n, d_n_sq, certified_slack)`.
#[pyfunction]
#[pyo3(signature = (n_max, tol=1e-6))]
fn bd_scan(n_max: usize, tol: f64) -> PyResult<Vec<(usize, f64, f64)>> {
    if n_max == 0 {
        return Err(PyValueError::new_err("n_max must be >= 1"));
    }
    let thetas: Vec<f64> = (1..=n_max).map(|k| 1.0 / k as f64).collect();
    let sys = gram::assemble_deterministic(&thetas, tol).map_err(py_err)?;
    (1..=n_max)
        .map(|n| {
            let rep = gram::solve(&sys.prefix(n).map_err(py_err)?, gram::DEFAULT_REL_CUTOFF)
                .map_err(py_err)?;
            Ok((n, rep.distance_sq, rep.certified_slack))
        })
        .collect()
}

/// `nu_{n,eps} = ||chi + sum mu(k) k^-eps rho_{1/k}||^2`.
#[pyfunction]
#[pyo3(signature = (n, eps, tol=1e-6))]
fn nu_eval(n: usize, eps: f64, tol: f64) -> PyResult<f64> {
    criteria::nu_eval(n, eps, tol).map_err(py_err)
}

fn build_basis(
    elements: Vec<PyDistribution>,
    mode: BasisMode,
    target: Option<&str>,
) -> PyResult<BasisSpec> {
    let target = match target {
        None | Some("chi") => Target::Chi,
        Some(spec) => match spec.strip_prefix("survival:") {
            Some(lit) => Target::SurvivalOf(lit.parse().map_err(py_err)?),
            None => {
                return Err(PyValueError::new_err(format!(
                    "unknown target `{spec}` (chi or survival:<literal>)"
                )))
            }
        },
    };
    BasisSpec::new(
        elements.into_iter().map(|d| d.inner).collect(),
        mode,
        true,
        target,
    )
    .map_err(py_err)
}

/// gNB distance for a random basis (optimal coefficients when omitted).
#[pyfunction]
#[pyo3(signature = (basis, coeffs=None, target=None, tol=1e-6))]
fn gnb_distance(
    basis: Vec<PyDistribution>,
    coeffs: Option<Vec<f64>>,
    target: Option<&str>,
    tol: f64,
) -> PyResult<PyDistanceReport> {
    let spec = build_basis(basis, BasisMode::Gnb, target)?;
    Ok(criteria::gnb_distance(&spec, coeffs.as_deref(), tol)
        .map_err(py_err)?
        .into())
}

/// pNB distance for an independent random basis.
#[pyfunction]
#[pyo3(signature = (basis, coeffs=None, target=None, tol=1e-6))]
fn pnb_distance(
    basis: Vec<PyDistribution>,
    coeffs: Option<Vec<f64>>,
    target: Option<&str>,
    tol: f64,
) -> PyResult<PyDistanceReport> {
    let spec = build_basis(basis, BasisMode::Pnb, target)?;
    Ok(criteria::pnb_distance(&spec, coeffs.as_deref(), tol)
        .map_err(py_err)?
        .into())
}

/// `P(all Z_k in (0,1]) = prod (1 - P(Z_k >= 1))`.
#[pyfunction]
fn assumption_p(basis: Vec<PyDistribution>) -> PyResult<f64> {
    let spec = build_basis(basis, BasisMode::Pnb, None)?;
    criteria::assumption_p(&spec).map_err(py_err)
}

/// `1 / (log 2 + E |log min_k Z_k|)`.
#[pyfunction]
#[pyo3(signature = (basis, mc_count, seed, stream=0))]
fn suffi_bound(
    basis: Vec<PyDistribution>,
    mc_count: usize,
    seed: u64,
    stream: u64,
) -> PyResult<f64> {
    let spec = build_basis(basis, BasisMode::Pnb, None)?;
    criteria::suffi_bound(&spec, mc_count, RngStream::new(seed, stream)).map_err(py_err)
}

/// The concentrated family around 1/k.
#[pyfunction]
fn concentrated_family(n: usize, vartheta: f64) -> PyResult<Vec<PyDistribution>> {
    Ok(families::concentrated_family(n, vartheta)
        .map_err(py_err)?
        .into_iter()
        .map(|inner| PyDistribution { inner })
        .collect())
}

/// `zeta(1/2 + it)` as a Python complex.
#[pyfunction]
fn zeta_critical(t: f64) -> PyResult<Complex64> {
    zeta::zeta_value(Complex64::new(0.5, t)).map_err(py_err)
}

/// `zeta(sigma + it)` in the strip `0 < sigma <= 2`.
#[pyfunction]
fn zeta_eval(sigma: f64, t: f64) -> PyResult<(Complex64, Option<f64>, bool)> {
    let v = zeta::zeta_eval(Complex64::new(sigma, t)).map_err(py_err)?;
    Ok((v.value, v.method_gap, v.degraded))
}

/// Principal `log Gamma(z)` for `Re z > 0`.
#[pyfunction]
fn log_gamma(z: Complex64) -> PyResult<Complex64> {
    nblab_core::special::log_gamma(z).map_err(py_err)
}

/// Bisect the phase-rotated zeta for a critical zero inside `[lo, hi]`.
#[pyfunction]
#[pyo3(signature = (lo, hi, iterations=60))]
fn bracket_zero(lo: f64, hi: f64, iterations: usize) -> PyResult<f64> {
    zeta::bracket_zero(lo, hi, iterations).map_err(py_err)
}

/// Muntz transform `Pf(t)` of a survival kernel.
#[pyfunction]
#[pyo3(signature = (d, t, tol=1e-10))]
fn muntz_transform(d: &PyDistribution, t: f64, tol: f64) -> PyResult<f64> {
    muntz::muntz_transform(&KernelSpec::Survival(d.inner.clone()), t, tol).map_err(py_err)
}

/// Monte Carlo check of `E{X/t} = -Pf(t)`: rows `(t, gap, mc_stderr)`.
#[pyfunction]
#[pyo3(signature = (d, t_grid, mc_count, seed, stream=0))]
fn identity_gap(
    d: &PyDistribution,
    t_grid: Vec<f64>,
    mc_count: usize,
    seed: u64,
    stream: u64,
) -> PyResult<Vec<(f64, f64, f64)>> {
    Ok(
        muntz::identity_gap(&d.inner, &t_grid, mc_count, RngStream::new(seed, stream))
            .map_err(py_err)?
            .into_iter()
            .map(|p| (p.t, p.gap, p.mc_stderr))
            .collect(),
    )
}

/// Time-domain vs Mellin-domain residual for the dilation basis 1/k:
/// rows `(n, time_domain, mellin, tail_bound)`.
#[pyfunction]
#[pyo3(signature = (n_max, t_max=1000.0, step=0.05, tol=1e-6))]
fn plancherel_crosscheck(
    n_max: usize,
    t_max: f64,
    step: f64,
    tol: f64,
) -> PyResult<Vec<(usize, f64, f64, f64)>> {
    let grid = CriticalLineGrid::build(t_max, step).map_err(py_err)?;
    let thetas: Vec<f64> = (1..=n_max).map(|k| 1.0 / k as f64).collect();
    let sys = gram::assemble_deterministic(&thetas, tol).map_err(py_err)?;
    (1..=n_max)
        .map(|n| {
            let prefix = sys.prefix(n).map_err(py_err)?;
            let rep = gram::solve(&prefix, gram::DEFAULT_REL_CUTOFF).map_err(py_err)?;
            let time_domain =
                gram::residual_with_coeffs(&prefix, &rep.coeffs).map_err(py_err)?;
            let basis = BasisSpec::new(
                (1..=n)
                    .map(|k| families::Distribution::PointMass(1.0 / k as f64))
                    .collect(),
                BasisMode::Deterministic,
                true,
                Target::Chi,
            )
            .map_err(py_err)?;
            let (mellin, tail) =
                plancherel_residual(&basis, &rep.coeffs, &grid).map_err(py_err)?;
            Ok((n, time_domain, mellin, tail))
        })
        .collect()
}

#[pymodule]
fn _nblab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBracketed>()?;
    m.add_class::<PyDistribution>()?;
    m.add_class::<PyDistanceReport>()?;
    m.add_function(wrap_pyfunction!(euler_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(k_const, m)?)?;
    m.add_function(wrap_pyfunction!(rho_eval, m)?)?;
    m.add_function(wrap_pyfunction!(inner_rho_rho, m)?)?;
    m.add_function(wrap_pyfunction!(inner_chi_rho, m)?)?;
    m.add_function(wrap_pyfunction!(norm_rho_sq, m)?)?;
    m.add_function(wrap_pyfunction!(mobius_sieve, m)?)?;
    m.add_function(wrap_pyfunction!(bd_scan, m)?)?;
    m.add_function(wrap_pyfunction!(nu_eval, m)?)?;
    m.add_function(wrap_pyfunction!(gnb_distance, m)?)?;
    m.add_function(wrap_pyfunction!(pnb_distance, m)?)?;
    m.add_function(wrap_pyfunction!(assumption_p, m)?)?;
    m.add_function(wrap_pyfunction!(suffi_bound, m)?)?;
    m.add_function(wrap_pyfunction!(concentrated_family, m)?)?;
    m.add_function(wrap_pyfunction!(zeta_critical, m)?)?;
    m.add_function(wrap_pyfunction!(zeta_eval, m)?)?;
    m.add_function(wrap_pyfunction!(log_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(bracket_zero, m)?)?;
    m.add_function(wrap_pyfunction!(muntz_transform, m)?)?;
    m.add_function(wrap_pyfunction!(identity_gap, m)?)?;
    m.add_function(wrap_pyfunction!(plancherel_crosscheck, m)?)?;
    Ok(())
}
