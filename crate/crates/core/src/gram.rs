//! Gram systems and least-squares projection of the target onto the span
//! of a basis family.
//!
//! The optimal squared distance is the Gram-determinant quotient; here it
//! is computed stably by a symmetric eigendecomposition with a relative
//! eigenvalue cutoff (pseudo-inverse), which these notoriously
//! ill-conditioned sawtooth Gram matrices require.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::beurling::{inner_chi_rho, inner_rho_rho};
use crate::bracket::BracketedValue;
use crate::error::{Error, Result};

/// Default relative eigenvalue cutoff for [`solve`].
pub const DEFAULT_REL_CUTOFF: f64 = 1e-12;

/// Symmetric matrix of basis inner products `<phi_k, phi_l>`, right-hand
/// side `<target, phi_k>`, the target's squared norm, and per-entry error
/// bounds carried over from the brackets that produced the entries.
#[derive(Debug, Clone)]
pub struct GramSystem {
    pub g: DMatrix<f64>,
    pub b: DVector<f64>,
    pub target_norm_sq: f64,
    pub entry_err: DMatrix<f64>,
    pub rhs_err: DVector<f64>,
    pub labels: Vec<String>,
}

impl GramSystem {
    pub fn new(
        g: DMatrix<f64>,
        b: DVector<f64>,
        target_norm_sq: f64,
        entry_err: DMatrix<f64>,
        rhs_err: DVector<f64>,
        labels: Vec<String>,
    ) -> Result<Self> {
        let n = g.nrows();
        if g.ncols() != n || b.len() != n || entry_err.nrows() != n || rhs_err.len() != n {
            return Err(Error::Data("inconsistent Gram system dimensions".into()));
        }
        if target_norm_sq <= 0.0 || target_norm_sq.is_nan() {
            return Err(Error::Data(format!(
                "target_norm_sq must be positive, got {target_norm_sq}"
            )));
        }
        for k in 0..n {
            if g[(k, k)] <= 0.0 || g[(k, k)].is_nan() {
                return Err(Error::Data(format!(
                    "Gram diagonal must be strictly positive, g[{k}][{k}] = {}",
                    g[(k, k)]
                )));
            }
            for l in 0..k {
                if g[(k, l)] != g[(l, k)] {
                    return Err(Error::Data(format!("Gram matrix not symmetric at ({k}, {l})")));
                }
            }
        }
        if labels.len() != n {
            return Err(Error::Data("label count mismatch".into()));
        }
        Ok(Self { g, b, target_norm_sq, entry_err, rhs_err, labels })
    }

    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.len() == 0
    }

    /// The system restricted to the first `n` basis elements.
    pub fn prefix(&self, n: usize) -> Result<GramSystem> {
        if n == 0 || n > self.len() {
            return Err(Error::Precondition(format!(
                "prefix size {n} out of range 1..={}",
                self.len()
            )));
        }
        Ok(GramSystem {
            g: self.g.view((0, 0), (n, n)).into_owned(),
            b: self.b.rows(0, n).into_owned(),
            target_norm_sq: self.target_norm_sq,
            entry_err: self.entry_err.view((0, 0), (n, n)).into_owned(),
            rhs_err: self.rhs_err.rows(0, n).into_owned(),
            labels: self.labels[..n].to_vec(),
        })
    }

    pub fn max_entry_err(&self) -> f64 {
        self.entry_err.iter().fold(0.0_f64, |m, &e| m.max(e))
    }

    pub fn max_rhs_err(&self) -> f64 {
        self.rhs_err.iter().fold(0.0_f64, |m, &e| m.max(e))
    }

    /// First-order slack for a coefficient vector:
    /// `||c||_1^2 max entry_err + 2 ||c||_1 max rhs_err`.
    pub fn slack_for(&self, coeffs: &[f64]) -> f64 {
        let l1: f64 = coeffs.iter().map(|c| c.abs()).sum();
        l1 * l1 * self.max_entry_err() + 2.0 * l1 * self.max_rhs_err()
    }
}

/// Report of a projection solve or of a residual evaluation at supplied
/// coefficients.
#[derive(Debug, Clone)]
pub struct DistanceReport {
    pub coeffs: Vec<f64>,
    pub distance_sq: f64,
    pub reg_cutoff: f64,
    pub dropped_modes: usize,
    pub condition_estimate: f64,
    pub certified_slack: f64,
    /// Set when a slightly negative squared distance was clamped to zero.
    pub clamped: bool,
}

/// Gram system for the deterministic basis `rho_theta_k` with target `chi`.
///
/// Entries are certified brackets from [`crate::beurling`]; assembly is
/// parallel over independent (k, l) pairs with a deterministic fill order.
pub fn assemble_deterministic(thetas: &[f64], tol: f64) -> Result<GramSystem> {
    if thetas.is_empty() {
        return Err(Error::Precondition("basis must be non-empty".into()));
    }
    for &t in thetas {
        if t <= 0.0 || !t.is_finite() {
            return Err(Error::Precondition(format!("theta must be positive, got {t}")));
        }
    }
    let n = thetas.len();
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|k| (k..n).map(move |l| (k, l))).collect();
    let entries: Vec<Result<(usize, usize, BracketedValue)>> = pairs
        .par_iter()
        .map(|&(k, l)| Ok((k, l, inner_rho_rho(thetas[k], thetas[l], tol)?)))
        .collect();

    let mut g = DMatrix::zeros(n, n);
    let mut entry_err = DMatrix::zeros(n, n);
    for e in entries {
        let (k, l, v) = e?;
        g[(k, l)] = v.value;
        g[(l, k)] = v.value;
        entry_err[(k, l)] = v.err;
        entry_err[(l, k)] = v.err;
    }

    let rhs: Vec<Result<BracketedValue>> = thetas
        .par_iter()
        .map(|&t| inner_chi_rho(t, tol))
        .collect();
    let mut b = DVector::zeros(n);
    let mut rhs_err = DVector::zeros(n);
    for (k, e) in rhs.into_iter().enumerate() {
        let v = e?;
        b[k] = v.value;
        rhs_err[k] = v.err;
    }

    let labels = thetas.iter().map(|t| format!("rho({t})")).collect();
    GramSystem::new(g, b, 1.0, entry_err, rhs_err, labels)
}

/// Least-squares projection by symmetric eigendecomposition.
///
/// Eigenmodes with `lambda <= rel_cutoff * lambda_max` (or nonpositive)
/// are discarded; the distance is `target_norm_sq - b^T c`.
pub fn solve(sys: &GramSystem, rel_cutoff: f64) -> Result<DistanceReport> {
    if !(0.0..1.0).contains(&rel_cutoff) {
        return Err(Error::Precondition(format!(
            "relative cutoff must lie in [0, 1), got {rel_cutoff}"
        )));
    }
    if sys.g.iter().any(|x| !x.is_finite()) || sys.b.iter().any(|x| !x.is_finite()) {
        return Err(Error::Data("non-finite entries in Gram system".into()));
    }

    let eig = sys.g.clone().symmetric_eigen();
    let lambda_max = eig.eigenvalues.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x));
    let threshold = if lambda_max > 0.0 { rel_cutoff * lambda_max } else { f64::INFINITY };

    let n = sys.len();
    let mut coeffs = DVector::zeros(n);
    let mut dropped = 0usize;
    let mut lambda_min_kept = f64::INFINITY;
    for i in 0..n {
        let lambda = eig.eigenvalues[i];
        if lambda <= threshold || lambda <= 0.0 {
            dropped += 1;
            continue;
        }
        lambda_min_kept = lambda_min_kept.min(lambda);
        let q = eig.eigenvectors.column(i);
        let proj = q.dot(&sys.b) / lambda;
        coeffs += q * proj;
    }
    let condition_estimate = if lambda_min_kept.is_finite() && lambda_max > 0.0 {
        lambda_max / lambda_min_kept
    } else {
        f64::INFINITY
    };

    let raw = sys.target_norm_sq - sys.b.dot(&coeffs);
    let coeff_vec: Vec<f64> = coeffs.iter().copied().collect();
    let certified_slack = sys.slack_for(&coeff_vec);
    let (distance_sq, clamped) = if raw < 0.0 { (0.0, true) } else { (raw, false) };

    Ok(DistanceReport {
        coeffs: coeff_vec,
        distance_sq,
        reg_cutoff: rel_cutoff,
        dropped_modes: dropped,
        condition_estimate,
        certified_slack,
        clamped,
    })
}

/// `target_norm_sq - 2 b^T c + c^T G c` for externally supplied
/// coefficients.
pub fn residual_with_coeffs(sys: &GramSystem, coeffs: &[f64]) -> Result<f64> {
    if coeffs.len() != sys.len() {
        return Err(Error::Data(format!(
            "coefficient length {} does not match basis size {}",
            coeffs.len(),
            sys.len()
        )));
    }
    let c = DVector::from_column_slice(coeffs);
    Ok(sys.target_norm_sq - 2.0 * sys.b.dot(&c) + (&sys.g * &c).dot(&c))
}

/// Wrap a residual evaluation at supplied coefficients into a report.
pub fn report_for_coeffs(sys: &GramSystem, coeffs: &[f64]) -> Result<DistanceReport> {
    let raw = residual_with_coeffs(sys, coeffs)?;
    let certified_slack = sys.slack_for(coeffs);
    let (distance_sq, clamped) = if raw < 0.0 { (0.0, true) } else { (raw, false) };
    Ok(DistanceReport {
        coeffs: coeffs.to_vec(),
        distance_sq,
        reg_cutoff: 0.0,
        dropped_modes: 0,
        condition_estimate: f64::NAN,
        certified_slack,
        clamped,
    })
}
