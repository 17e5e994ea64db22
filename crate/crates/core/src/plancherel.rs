//! Plancherel-side recomputation of approximation distances as weighted
//! `L^2` integrals on the critical line.
//!
//! The Mellin transform sends `rho_theta` to `-theta^s zeta(s)/s` and
//! `chi` to `1/s`, so
//!
//! ```text
//! || chi - sum c_k rho_{theta_k} ||^2
//!     = (1/2pi) int | 1/s + (zeta(s)/s) sum c_k theta_k^s |^2 dtau,
//! ```
//!
//! on `s = 1/2 + i tau`. For gNB bases of exponential laws the dilation
//! factor is replaced by `E Z_k^s = Gamma(1+s) / lambda_k^s`. The integral
//! is truncated at `tau = T`; the unprovable tail is *reported* as a
//! separate bound fitted from the computed envelope, never silently added.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::criteria::{BasisMode, BasisSpec};
use crate::error::{Error, Result};
use crate::families::Distribution;
use crate::kahan::CompensatedSum;
use crate::rng::RngStream;
use crate::special::log_gamma;
use crate::zeta::{zeta_eval, zeta_value};

/// Default truncation of the critical-line integral.
pub const DEFAULT_T_MAX: f64 = 5000.0;

/// Default grid step away from the origin.
pub const DEFAULT_STEP: f64 = 0.05;

/// Tail envelope exponent: the fitted bound decays like `tau^(2 eta - 2)`.
pub const TAIL_ETA: f64 = 0.25;

/// Cached values of `zeta(1/2 + i t)` on a symmetric grid over `[-T, T]`,
/// refined near `t = 0` where the `|1/s|^2` mass concentrates.
#[derive(Debug, Clone)]
pub struct CriticalLineGrid {
    pub t_max: f64,
    pub step: f64,
    ts: Vec<f64>,
    values: Vec<Complex64>,
}

impl CriticalLineGrid {
    /// Evaluate zeta on the refined symmetric grid.
    pub fn build(t_max: f64, step: f64) -> Result<Self> {
        let ts_half = half_grid(t_max, step)?;
        let values_half: Vec<Result<Complex64>> = ts_half
            .par_iter()
            .map(|&t| zeta_value(Complex64::new(0.5, t)))
            .collect();
        let mut values_half_ok = Vec::with_capacity(ts_half.len());
        for v in values_half {
            values_half_ok.push(v?);
        }
        // Mirror to negative t by conjugate symmetry.
        let mut ts = Vec::with_capacity(2 * ts_half.len() - 1);
        let mut values = Vec::with_capacity(2 * ts_half.len() - 1);
        for i in (1..ts_half.len()).rev() {
            ts.push(-ts_half[i]);
            values.push(values_half_ok[i].conj());
        }
        ts.extend_from_slice(&ts_half);
        values.extend_from_slice(&values_half_ok);
        Ok(Self { t_max, step, ts, values })
    }

    pub fn len(&self) -> usize {
        self.ts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ts.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.ts.iter().copied().zip(self.values.iter().copied())
    }

    /// Persist as CSV `t,re,im` rows.
    pub fn save_csv(&self, path: &std::path::Path) -> Result<()> {
        let mut out = String::with_capacity(self.ts.len() * 40);
        out.push_str("# critical line grid cache\n");
        out.push_str(&format!("# t_max={} step={}\n", self.t_max, self.step));
        out.push_str("t,re,im\n");
        for (t, z) in self.points() {
            out.push_str(&format!("{t},{},{}\n", z.re, z.im));
        }
        std::fs::write(path, out)
            .map_err(|e| Error::Data(format!("cannot write grid cache {}: {e}", path.display())))
    }

    /// Load a previously saved grid cache.
    pub fn load_csv(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Data(format!("cannot read grid cache {}: {e}", path.display())))?;
        let mut t_max = 0.0_f64;
        let mut step = 0.0_f64;
        let mut ts = Vec::new();
        let mut values = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if let Some(meta) = line.strip_prefix('#') {
                for kv in meta.split_whitespace() {
                    if let Some(v) = kv.strip_prefix("t_max=") {
                        t_max = v.parse().unwrap_or(0.0);
                    }
                    if let Some(v) = kv.strip_prefix("step=") {
                        step = v.parse().unwrap_or(0.0);
                    }
                }
                continue;
            }
            if line.is_empty() || line.starts_with('t') {
                continue;
            }
            let mut cols = line.split(',');
            let t: f64 = cols
                .next()
                .and_then(|c| c.trim().parse().ok())
                .ok_or_else(|| Error::Data(format!("bad grid line `{line}`")))?;
            let re: f64 = cols
                .next()
                .and_then(|c| c.trim().parse().ok())
                .ok_or_else(|| Error::Data(format!("bad grid line `{line}`")))?;
            let im: f64 = cols
                .next()
                .and_then(|c| c.trim().parse().ok())
                .ok_or_else(|| Error::Data(format!("bad grid line `{line}`")))?;
            ts.push(t);
            values.push(Complex64::new(re, im));
        }
        if ts.len() < 3 {
            return Err(Error::Data("grid cache too short".into()));
        }
        for w in ts.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Data("grid cache not strictly increasing".into()));
            }
        }
        if t_max == 0.0 {
            t_max = ts.last().copied().unwrap_or(0.0);
        }
        Ok(Self { t_max, step, ts, values })
    }
}

/// One-sided grid: step/25 on [0, 2], step/5 on (2, 10], step beyond.
fn half_grid(t_max: f64, step: f64) -> Result<Vec<f64>> {
    if t_max <= 0.0 || !t_max.is_finite() {
        return Err(Error::Precondition(format!("t_max must be positive, got {t_max}")));
    }
    if step <= 0.0 || step.is_nan() || step > t_max {
        return Err(Error::Precondition(format!("bad grid step {step}")));
    }
    let mut ts = vec![0.0];
    let push_range = |from: f64, to: f64, h: f64, ts: &mut Vec<f64>| {
        let n = ((to - from) / h).ceil() as usize;
        for i in 1..=n {
            let t = (from + i as f64 * h).min(to);
            ts.push(t);
            if t >= to {
                break;
            }
        }
    };
    let b1 = 2.0_f64.min(t_max);
    push_range(0.0, b1, step / 25.0, &mut ts);
    if t_max > 2.0 {
        let b2 = 10.0_f64.min(t_max);
        push_range(2.0, b2, step / 5.0, &mut ts);
    }
    if t_max > 10.0 {
        push_range(10.0, t_max, step, &mut ts);
    }
    ts.dedup();
    Ok(ts)
}

/// Mellin factor of the k-th basis element at `s`.
fn mellin_factor(basis: &BasisSpec, k: usize, s: Complex64) -> Result<Complex64> {
    let d = &basis.elements[k];
    match basis.mode {
        BasisMode::Deterministic => {
            let theta = d.as_point_mass().ok_or_else(|| {
                Error::Capability("deterministic Plancherel basis requires point masses".into())
            })?;
            Ok((s * theta.ln()).exp())
        }
        BasisMode::Gnb | BasisMode::Pnb => match d.normalized() {
            Distribution::PointMass(theta) => Ok((s * theta.ln()).exp()),
            Distribution::Exponential(rate) => {
                // E Z^s = Gamma(1+s) / rate^s
                let lg = log_gamma(s + 1.0)?;
                Ok((lg - s * rate.ln()).exp())
            }
            other => Err(Error::Capability(format!(
                "no closed Mellin image for basis element {other}"
            ))),
        },
    }
}

/// Truncated Plancherel integral and its fitted tail bound.
///
/// Returns `(value, tail_bound)` separately; the caller decides whether to
/// add the bound. Only `chi` targets have the `1/s` Mellin image used
/// here.
pub fn plancherel_residual(
    basis: &BasisSpec,
    coeffs: &[f64],
    grid: &CriticalLineGrid,
) -> Result<(f64, f64)> {
    // An empty coefficient vector is allowed: it computes ||chi||^2.
    if !coeffs.is_empty() && coeffs.len() != basis.len() {
        return Err(Error::Data(format!(
            "coefficient count {} does not match basis size {}",
            coeffs.len(),
            basis.len()
        )));
    }
    if basis.target != crate::criteria::Target::Chi {
        return Err(Error::Capability(
            "Plancherel cross-check supports the chi target only".into(),
        ));
    }

    // |1/s + (zeta(s)/s) sum_k c_k m_k(s)|^2 on the cached grid.
    let integrand: Vec<(f64, f64)> = grid
        .points()
        .map(|(t, zeta)| {
            let s = Complex64::new(0.5, t);
            let mut amp = Complex64::new(0.0, 0.0);
            for (k, &c) in coeffs.iter().enumerate() {
                if c != 0.0 {
                    amp += c * mellin_factor(basis, k, s)?;
                }
            }
            let f = (Complex64::new(1.0, 0.0) + zeta * amp) / s;
            Ok((t, f.norm_sqr()))
        })
        .collect::<Result<_>>()?;

    let mut acc = CompensatedSum::new();
    for w in integrand.windows(2) {
        let (t0, f0) = w[0];
        let (t1, f1) = w[1];
        acc.add(0.5 * (f0 + f1) * (t1 - t0));
    }
    let value = acc.value() / (2.0 * std::f64::consts::PI);

    // Envelope fit on the outer half of the computed range:
    // C = max |F|^2 tau^(2 - 2 eta), tail = (1/pi) C T^(2 eta - 1)/(1 - 2 eta).
    let t_fit = 0.5 * grid.t_max;
    let c_env = integrand
        .iter()
        .filter(|(t, _)| t.abs() >= t_fit)
        .map(|(t, f)| f * t.abs().powf(2.0 - 2.0 * TAIL_ETA))
        .fold(0.0_f64, f64::max);
    let tail_bound = c_env * grid.t_max.powf(2.0 * TAIL_ETA - 1.0)
        / ((1.0 - 2.0 * TAIL_ETA) * std::f64::consts::PI);

    Ok((value, tail_bound))
}

/// Monte Carlo profile of
/// `E V_n(t) = E | sum_k mu(k) k^(-eps) (k^(-s) - X_{k,n}^s) zeta(s)/s |^2`
/// over a grid of `t` values, `s = 1/2 + it`.
pub fn vn_profile(
    n: usize,
    epsilon: f64,
    family: &[Distribution],
    t_grid: &[f64],
    mc_count: usize,
    stream: RngStream,
) -> Result<Vec<(f64, f64)>> {
    if family.len() != n {
        return Err(Error::Precondition(format!(
            "family length {} does not match n = {n}",
            family.len()
        )));
    }
    if mc_count < 1000 {
        return Err(Error::Precondition(format!(
            "vn_profile needs at least 1e3 samples, got {mc_count}"
        )));
    }
    let mu = crate::criteria::mobius_sieve(n);
    let weights: Vec<f64> = mu
        .iter()
        .enumerate()
        .map(|(i, &m)| m as f64 * ((i + 1) as f64).powf(-epsilon))
        .collect();
    // Per-element draws; log once, the per-t powers reuse them.
    let log_draws: Vec<Vec<f64>> = family
        .iter()
        .enumerate()
        .map(|(k, d)| {
            Ok(d.sample(stream.substream(k as u64), mc_count)?
                .into_iter()
                .map(|x| x.ln())
                .collect())
        })
        .collect::<Result<_>>()?;

    t_grid
        .iter()
        .map(|&t| {
            let s = Complex64::new(0.5, t);
            let zeta_over_s = zeta_eval(s)?.value / s;
            let dets: Vec<Complex64> = (1..=n)
                .map(|k| (-s * (k as f64).ln()).exp())
                .collect();
            let mut acc = CompensatedSum::new();
            // j walks one draw across every element's column
            #[allow(clippy::needless_range_loop)]
            for j in 0..mc_count {
                let mut sum = Complex64::new(0.0, 0.0);
                for (k, &w) in weights.iter().enumerate() {
                    if w == 0.0 {
                        continue;
                    }
                    let xs = (s * log_draws[k][j]).exp();
                    sum += w * (dets[k] - xs);
                }
                acc.add((sum * zeta_over_s).norm_sqr());
            }
            Ok((t, acc.value() / mc_count as f64))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::Target;

    fn small_grid() -> CriticalLineGrid {
        CriticalLineGrid::build(200.0, 0.05).unwrap()
    }

    #[test]
    fn empty_coefficients_give_chi_norm() {
        let grid = small_grid();
        let basis = BasisSpec::new(
            vec![Distribution::PointMass(1.0)],
            BasisMode::Deterministic,
            true,
            Target::Chi,
        )
        .unwrap();
        let (value, tail) = plancherel_residual(&basis, &[0.0], &grid).unwrap();
        // (1/2pi) int |1/s|^2 dtau = 1 up to the truncated tail (~1/(pi T)).
        assert!((value - 1.0).abs() < 1e-2, "value = {value}");
        assert!(tail > 0.0 && tail < 0.1);
    }

    #[test]
    fn grid_is_symmetric_and_conjugate() {
        let grid = CriticalLineGrid::build(30.0, 0.1).unwrap();
        let pts: Vec<(f64, Complex64)> = grid.points().collect();
        let m = pts.len();
        for i in 0..m / 2 {
            let (t_neg, v_neg) = pts[i];
            let (t_pos, v_pos) = pts[m - 1 - i];
            assert!((t_neg + t_pos).abs() < 1e-12);
            assert!((v_neg - v_pos.conj()).norm() < 1e-15);
        }
        // Spot-check the mirrored values against direct evaluation.
        for &(t, v) in pts.iter().filter(|(t, _)| *t < 0.0).take(5) {
            let direct = zeta_value(Complex64::new(0.5, t)).unwrap();
            assert!((v - direct).norm() < 1e-9, "t = {t}");
        }
    }

    #[test]
    fn grid_cache_roundtrip() {
        let grid = CriticalLineGrid::build(20.0, 0.2).unwrap();
        let path = std::env::temp_dir().join("nblab_grid_cache_test.csv");
        grid.save_csv(&path).unwrap();
        let loaded = CriticalLineGrid::load_csv(&path).unwrap();
        assert_eq!(grid.len(), loaded.len());
        for ((t0, v0), (t1, v1)) in grid.points().zip(loaded.points()) {
            assert!((t0 - t1).abs() < 1e-12);
            assert!((v0 - v1).norm() < 1e-12);
        }
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn vn_vanishes_for_matching_point_masses() {
        let n = 4;
        let family = crate::criteria::preset_family(crate::criteria::Preset::Bd, n).unwrap();
        let rows = vn_profile(
            n,
            0.1,
            &family,
            &[0.5, 3.0, 11.0],
            1000,
            RngStream::new(5, 0),
        )
        .unwrap();
        for (t, v) in rows {
            assert!(v < 1e-20, "t = {t}: V_n = {v:e}");
        }
    }

    #[test]
    fn vn_rejects_length_mismatch() {
        let family = crate::criteria::preset_family(crate::criteria::Preset::Bd, 3).unwrap();
        assert!(vn_profile(4, 0.1, &family, &[1.0], 1000, RngStream::new(1, 0)).is_err());
    }
}
