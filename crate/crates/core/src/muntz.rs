//! The Muntz transform `Pf(t) = sum_{k>=1} f(t k) - (1/t) int_0^inf f`
//! and numerical verification of the probabilistic identity
//! `E{X/t} = -Pf(t)` for survival kernels `f(x) = P(X >= x)`.

use std::path::Path;

use crate::error::{Error, Result};
use crate::families::{mean_beurling, Distribution, PsiMethod};
use crate::kahan::CompensatedSum;
use crate::rng::RngStream;

/// Default truncation tolerance; far below the Monte Carlo noise of
/// [`identity_gap`].
pub const DEFAULT_TOL: f64 = 1e-10;

/// Kernel for the Muntz transform: either the survival function of a
/// positive law, or a sampled nonincreasing function on a finite grid.
#[derive(Debug, Clone)]
pub enum KernelSpec {
    Survival(Distribution),
    Sampled { xs: Vec<f64>, fs: Vec<f64> },
}

impl KernelSpec {
    /// A sampled kernel; `xs` strictly increasing and positive, `fs`
    /// nonincreasing with a finite trapezoid integral.
    pub fn sampled(xs: Vec<f64>, fs: Vec<f64>) -> Result<Self> {
        if xs.len() != fs.len() || xs.len() < 2 {
            return Err(Error::Data("sampled kernel needs >= 2 matching (x, f) pairs".into()));
        }
        for i in 0..xs.len() {
            if !xs[i].is_finite() || !fs[i].is_finite() || xs[i] <= 0.0 {
                return Err(Error::Data(format!("bad kernel sample ({}, {})", xs[i], fs[i])));
            }
            if i > 0 {
                if xs[i] <= xs[i - 1] {
                    return Err(Error::Data(format!(
                        "kernel grid must be strictly increasing at index {i}"
                    )));
                }
                if fs[i] > fs[i - 1] {
                    return Err(Error::Data(format!(
                        "kernel values must be nonincreasing at index {i}"
                    )));
                }
            }
        }
        Ok(KernelSpec::Sampled { xs, fs })
    }

    /// Load a sampled kernel from a two-column CSV `x,f` with strictly
    /// increasing x. Lines starting with `#` and an optional `x,f` header
    /// are skipped.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Data(format!("cannot read kernel file {}: {e}", path.display())))?;
        let mut xs = Vec::new();
        let mut fs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split(',');
            let a = cols.next().unwrap_or("").trim();
            let b = cols.next().unwrap_or("").trim();
            if lineno == 0 && a.parse::<f64>().is_err() {
                continue; // header row
            }
            let x: f64 = a
                .parse()
                .map_err(|_| Error::Data(format!("bad x value `{a}` on line {}", lineno + 1)))?;
            let f: f64 = b
                .parse()
                .map_err(|_| Error::Data(format!("bad f value `{b}` on line {}", lineno + 1)))?;
            xs.push(x);
            fs.push(f);
        }
        KernelSpec::sampled(xs, fs)
    }
}

/// `Pf(t)`, with the series tail truncated below `tol`.
///
/// For survival kernels the integral term is exact (`int f = E X`) and the
/// tail is controlled by the same monotone stopping rule as the mean
/// Beurling series. For sampled kernels both pieces are certified from the
/// grid; a grid whose last value is positive cannot certify the tail.
pub fn muntz_transform(kernel: &KernelSpec, t: f64, tol: f64) -> Result<f64> {
    if t <= 0.0 || !t.is_finite() {
        return Err(Error::Domain(format!("t must be positive and finite, got {t}")));
    }
    if tol <= 0.0 || tol.is_nan() {
        return Err(Error::Domain(format!("tol must be positive, got {tol}")));
    }
    match kernel {
        KernelSpec::Survival(d) => {
            let mean = d.mean()?;
            let sum = survival_sum_integral_tail(d, t, tol)?;
            Ok(sum - mean / t)
        }
        KernelSpec::Sampled { xs, fs } => {
            let last = *fs.last().unwrap();
            if last > 0.0 {
                return Err(Error::Capability(format!(
                    "sampled kernel ends at f = {last} > 0; tail beyond x = {} cannot be certified",
                    xs.last().unwrap()
                )));
            }
            // Series: linear interpolation, terms vanish beyond the grid.
            let mut sum = CompensatedSum::new();
            let mut k = 1usize;
            loop {
                let x = k as f64 * t;
                if x > *xs.last().unwrap() {
                    break;
                }
                sum.add(interp(xs, fs, x));
                k += 1;
                if k > 100_000_000 {
                    return Err(Error::Capability(
                        "sampled kernel requires too many series terms at this t".into(),
                    ));
                }
            }
            // Integral: trapezoid on the grid, constant extension on
            // [0, x_0]. The trapezoid error for monotone f is bounded by
            // sum_i h_i (f_i - f_{i+1}) / 2.
            let mut integral = CompensatedSum::new();
            integral.add(xs[0] * fs[0]);
            let mut cert = 0.0;
            for i in 0..xs.len() - 1 {
                let h = xs[i + 1] - xs[i];
                integral.add(0.5 * h * (fs[i] + fs[i + 1]));
                cert += 0.5 * h * (fs[i] - fs[i + 1]);
            }
            if cert / t > tol {
                return Err(Error::Capability(format!(
                    "sampled kernel grid too coarse: certified integral error {cert:e} \
                     exceeds tol {tol:e} at t = {t}"
                )));
            }
            Ok(sum.value() - integral.value() / t)
        }
    }
}

const MAX_SERIES_TERMS: usize = 50_000_000;

/// `sum_{k>=1} S(k t)` truncated once the certified tail
/// `(1/t) int_{m t}^inf S` (monotonicity of S) drops below `tol`.
fn survival_sum_integral_tail(d: &Distribution, t: f64, tol: f64) -> Result<f64> {
    let mut acc = CompensatedSum::new();
    let mut m: usize = 1;
    loop {
        acc.add(d.survival(m as f64 * t)?);
        let tail = d.integrated_survival(m as f64 * t)? / t;
        if tail < tol {
            return Ok(acc.value());
        }
        m += 1;
        if m > MAX_SERIES_TERMS {
            return Err(Error::Resource {
                msg: format!("Muntz series for {d} at t = {t:e} exceeds {MAX_SERIES_TERMS} terms"),
                achievable_tol: tail,
            });
        }
    }
}

fn interp(xs: &[f64], fs: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return fs[0];
    }
    match xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
        Ok(i) => fs[i],
        Err(i) => {
            let w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
            fs[i - 1] + w * (fs[i] - fs[i - 1])
        }
    }
}

/// One grid point of [`identity_gap`].
#[derive(Debug, Clone, Copy)]
pub struct IdentityGapPoint {
    pub t: f64,
    /// `|MC estimate of E{X/t} + Pf(t)|`.
    pub gap: f64,
    pub mc_stderr: f64,
}

/// Monte Carlo test of `E{X/t} = -Pf(t)` over a grid of t values.
pub fn identity_gap(
    d: &Distribution,
    t_grid: &[f64],
    mc_count: usize,
    stream: RngStream,
) -> Result<Vec<IdentityGapPoint>> {
    if mc_count < 10_000 {
        return Err(Error::Precondition(format!(
            "identity_gap needs at least 1e4 samples, got {mc_count}"
        )));
    }
    let draws = d.sample(stream, mc_count)?;
    let kernel = KernelSpec::Survival(d.clone());
    let mut out = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let mut acc = CompensatedSum::new();
        let mut acc_sq = CompensatedSum::new();
        for x in &draws {
            let v = (x / t).fract();
            acc.add(v);
            acc_sq.add(v * v);
        }
        let n = mc_count as f64;
        let mean = acc.value() / n;
        let var = (acc_sq.value() / n - mean * mean).max(0.0);
        let stderr = (var / n).sqrt();
        let pf = muntz_transform(&kernel, t, DEFAULT_TOL)?;
        out.push(IdentityGapPoint { t, gap: (mean + pf).abs(), mc_stderr: stderr });
    }
    Ok(out)
}

/// Convenience: `Psi` and `-Pf` side by side (they must agree).
pub fn psi_vs_transform(d: &Distribution, t: f64) -> Result<(f64, f64)> {
    let psi = mean_beurling(d, t, &PsiMethod::MuntzSeries)?;
    let pf = muntz_transform(&KernelSpec::Survival(d.clone()), t, DEFAULT_TOL)?;
    Ok((psi, -pf))
}
