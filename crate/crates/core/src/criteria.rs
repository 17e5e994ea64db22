//! The criteria and hypothesis checkers: pNB/gNB distances for random
//! families, the Mobius-damped residuals `nu_{n,eps}`, Assumption (P),
//! the moment/(C)/(T2) growth conditions, and the minimum-dilation lower
//! bound.
//!
//! The pNB Gram uses cross terms `<Psi_k, Psi_l>` (valid for *independent*
//! dilation factors) and the exact diagonal `E||rho_Z||^2 = K E Z`; the
//! independence assumption is an explicit flag on [`BasisSpec`], not an
//! implicit convention.

use rayon::prelude::*;

use crate::beurling::{inner_chi_rho, inner_rho_rho};
use crate::error::{Error, Result};
use crate::families::{concentrated_family, mean_beurling_auto, Distribution};
use crate::gram::{self, DistanceReport, GramSystem};
use crate::kahan::CompensatedSum;
use crate::quad::adaptive_simpson;
use crate::rng::RngStream;
use nalgebra::{DMatrix, DVector};

/// Approximation target: the indicator of `(0, 1]` or the survival
/// function of a positive law.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Chi,
    SurvivalOf(Distribution),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisMode {
    Deterministic,
    Gnb,
    Pnb,
}

/// An ordered family of basis elements plus the mode and target.
#[derive(Debug, Clone)]
pub struct BasisSpec {
    pub elements: Vec<Distribution>,
    pub mode: BasisMode,
    pub independence: bool,
    pub target: Target,
}

impl BasisSpec {
    pub fn new(
        elements: Vec<Distribution>,
        mode: BasisMode,
        independence: bool,
        target: Target,
    ) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::Precondition("basis must be non-empty".into()));
        }
        for d in &elements {
            d.validate()?;
        }
        if let Target::SurvivalOf(d) = &target {
            d.validate()?;
        }
        if mode == BasisMode::Pnb && !independence {
            return Err(Error::Contract(
                "pNB mode requires the independence flag; the cross terms are only valid \
                 for mutually independent dilation factors"
                    .into(),
            ));
        }
        if mode == BasisMode::Deterministic
            && elements.iter().any(|d| d.as_point_mass().is_none())
        {
            return Err(Error::Contract(
                "deterministic mode requires all elements to be point masses".into(),
            ));
        }
        Ok(Self { elements, mode, independence, target })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Mobius function on `1..=n` by linear sieve.
pub fn mobius_sieve(n: usize) -> Vec<i8> {
    if n == 0 {
        return Vec::new();
    }
    let mut mu = vec![0i8; n + 1];
    let mut smallest = vec![0usize; n + 1];
    let mut primes = Vec::new();
    mu[1] = 1;
    for i in 2..=n {
        if smallest[i] == 0 {
            smallest[i] = i;
            primes.push(i);
            mu[i] = -1;
        }
        for &p in &primes {
            if p > smallest[i] || i * p > n {
                break;
            }
            smallest[i * p] = p;
            mu[i * p] = if p == smallest[i] { 0 } else { -mu[i] };
        }
    }
    mu.remove(0);
    mu
}

/// The coefficients `c_k = -mu(k) k^(-eps)` of the Mobius-damped residual.
pub fn mobius_coeffs(n: usize, epsilon: f64) -> Vec<f64> {
    mobius_sieve(n)
        .iter()
        .enumerate()
        .map(|(i, &m)| -(m as f64) * ((i + 1) as f64).powf(-epsilon))
        .collect()
}

/// `nu_{n,eps} = || chi + sum_{k<=n} mu(k) k^(-eps) rho_{1/k} ||^2`,
/// evaluated as the deterministic Gram residual at `c_k = -mu(k) k^(-eps)`.
pub fn nu_eval(n: usize, epsilon: f64, tol: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Precondition("nu_eval requires n >= 1".into()));
    }
    let thetas: Vec<f64> = (1..=n).map(|k| 1.0 / k as f64).collect();
    let sys = gram::assemble_deterministic(&thetas, tol)?;
    gram::residual_with_coeffs(&sys, &mobius_coeffs(n, epsilon))
}

/// Floor below which the `int_0^1` part of a Psi-product integral is
/// bounded instead of chased: the integrands are <= 1 there, so skipping
/// `[0, delta]` costs at most `delta`, which goes into the entry error.
fn quad_floor(tol: f64) -> f64 {
    (tol / 4.0).min(1e-4)
}

/// `int_0^1 f + int_1^inf f` with the tail mapped to `[0, 1]` by
/// `t = 1/v`. `f` must be bounded by 1 on `(0, 1]`; `limit_at_inf` is
/// `lim_{t->inf} t^2 f(t)` (finite for all our integrands).
fn psi_integral<F: Fn(f64) -> f64>(
    f: &F,
    limit_at_inf: f64,
    breakpoints: &[f64],
    tol: f64,
) -> Result<(f64, f64)> {
    let delta = quad_floor(tol);
    let mut value = CompensatedSum::new();
    let mut err = delta; // [0, delta] skipped, integrand <= 1

    // Head: [delta, 1], split at supplied sawtooth breakpoints.
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x > delta && x < 1.0)
        .collect();
    cuts.push(delta);
    cuts.push(1.0);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    let head_tol = tol / (2.0 * cuts.len().max(2) as f64);
    for w in cuts.windows(2) {
        let r = adaptive_simpson(f, w[0], w[1], head_tol)?;
        value.add(r.value);
        err += r.err_est;
    }

    // Tail: int_1^inf f(t) dt = int_0^1 f(1/v) / v^2 dv, continuous at 0.
    let g = |v: f64| {
        if v < 1e-300 {
            limit_at_inf
        } else {
            let t = 1.0 / v;
            f(t) * t * t
        }
    };
    let r = adaptive_simpson(&g, 0.0, 1.0, tol / 2.0)?;
    value.add(r.value);
    err += r.err_est;
    Ok((value.value(), err))
}

/// Sawtooth breakpoints `theta/m` of a point-mass element inside `(lo, 1]`.
fn point_mass_breaks(theta: f64, lo: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut m = theta.floor().max(1.0);
    loop {
        let t = theta / m;
        if t <= lo {
            break;
        }
        if t <= 1.0 {
            out.push(t);
        }
        m += 1.0;
        if out.len() > 1_000_000 {
            break;
        }
    }
    out
}

fn psi_breaks(d: &Distribution, lo: f64) -> Vec<f64> {
    match d.as_point_mass() {
        Some(theta) => point_mass_breaks(theta, lo),
        None => Vec::new(),
    }
}

/// Survival function of the target, `chi` included.
fn target_survival(target: &Target, t: f64) -> Result<f64> {
    match target {
        Target::Chi => Ok(if t <= 1.0 { 1.0 } else { 0.0 }),
        Target::SurvivalOf(d) => d.survival(t),
    }
}

fn target_norm_sq(target: &Target, tol: f64) -> Result<(f64, f64)> {
    match target {
        Target::Chi => Ok((1.0, 0.0)),
        Target::SurvivalOf(d) => match d.normalized() {
            Distribution::Exponential(rate) => Ok((0.5 / rate, 0.0)),
            Distribution::PointMass(theta) => Ok((theta, 0.0)),
            other => {
                let f = |t: f64| {
                    let s = other.survival(t).unwrap_or(f64::NAN);
                    s * s
                };
                psi_integral(&f, 0.0, &[], tol)
            }
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum DiagonalKind {
    /// gNB: `<Psi_k, Psi_k>` like any other entry.
    MeanThenSquare,
    /// pNB: `E||rho_{Z_k}||^2 = K E Z_k` exactly.
    SquareThenMean,
}

/// Assemble the randomized Gram system shared by the gNB and pNB
/// distances. Off-diagonal entries are `<Psi_k, Psi_l>`; the diagonal is
/// selected by `kind`. Pairs of point masses short-circuit to the
/// certified deterministic inner products.
fn build_random_gram(basis: &BasisSpec, tol: f64, kind: DiagonalKind) -> Result<GramSystem> {
    let n = basis.len();
    let elems = &basis.elements;

    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|k| (k..n).map(move |l| (k, l)))
        .filter(|&(k, l)| k != l || kind == DiagonalKind::MeanThenSquare)
        .collect();

    let computed: Vec<Result<(usize, usize, f64, f64)>> = pairs
        .par_iter()
        .map(|&(k, l)| {
            let dk = &elems[k];
            let dl = &elems[l];
            match (dk.as_point_mass(), dl.as_point_mass()) {
                (Some(a), Some(b)) => {
                    let v = inner_rho_rho(a, b, tol)?;
                    Ok((k, l, v.value, v.err))
                }
                _ => {
                    let f = |t: f64| {
                        let pk = mean_beurling_auto(dk, t).unwrap_or(f64::NAN);
                        let pl = mean_beurling_auto(dl, t).unwrap_or(f64::NAN);
                        pk * pl
                    };
                    let limit = dk.mean()? * dl.mean()?;
                    let mut breaks = psi_breaks(dk, quad_floor(tol));
                    breaks.extend(psi_breaks(dl, quad_floor(tol)));
                    let (v, e) = psi_integral(&f, limit, &breaks, tol)?;
                    Ok((k, l, v, e))
                }
            }
        })
        .collect();

    let mut g = DMatrix::zeros(n, n);
    let mut entry_err = DMatrix::zeros(n, n);
    for c in computed {
        let (k, l, v, e) = c?;
        g[(k, l)] = v;
        g[(l, k)] = v;
        entry_err[(k, l)] = e;
        entry_err[(l, k)] = e;
    }
    if kind == DiagonalKind::SquareThenMean {
        for k in 0..n {
            let v = elems[k].mean_rho_norm_sq()?;
            g[(k, k)] = v.value;
            entry_err[(k, k)] = v.err;
        }
    }

    let rhs: Vec<Result<(f64, f64)>> = elems
        .par_iter()
        .map(|d| match (&basis.target, d.as_point_mass()) {
            (Target::Chi, Some(theta)) => {
                let v = inner_chi_rho(theta, tol)?;
                Ok((v.value, v.err))
            }
            _ => {
                let target = basis.target.clone();
                let f = |t: f64| {
                    let s = target_survival(&target, t).unwrap_or(f64::NAN);
                    if s == 0.0 {
                        0.0
                    } else {
                        s * mean_beurling_auto(d, t).unwrap_or(f64::NAN)
                    }
                };
                // t^2 S(t) Psi(t) -> 0 for chi and for decaying survival
                // targets (point-mass targets are compactly supported).
                psi_integral(&f, 0.0, &psi_breaks(d, quad_floor(tol)), tol)
            }
        })
        .collect();
    let mut b = DVector::zeros(n);
    let mut rhs_err = DVector::zeros(n);
    for (k, r) in rhs.into_iter().enumerate() {
        let (v, e) = r?;
        b[k] = v;
        rhs_err[k] = e;
    }

    let (tns, tns_err) = target_norm_sq(&basis.target, tol)?;
    let labels = elems.iter().map(|d| d.to_string()).collect();
    let mut sys = GramSystem::new(g, b, tns, entry_err, rhs_err, labels)?;
    // Fold the target-norm uncertainty into the rhs bound it perturbs.
    if tns_err > 0.0 {
        for k in 0..n {
            sys.rhs_err[k] += 0.5 * tns_err;
        }
    }
    Ok(sys)
}

fn solve_or_evaluate(
    sys: &GramSystem,
    coeffs: Option<&[f64]>,
    cutoff: f64,
) -> Result<DistanceReport> {
    match coeffs {
        Some(c) => gram::report_for_coeffs(sys, c),
        None => gram::solve(sys, cutoff),
    }
}

/// The gNB distance `D_n^2 = || target - sum c_k Psi_k ||^2`, with optimal
/// coefficients when none are supplied.
pub fn gnb_distance(
    basis: &BasisSpec,
    coeffs: Option<&[f64]>,
    tol: f64,
) -> Result<DistanceReport> {
    if basis.mode != BasisMode::Gnb {
        return Err(Error::Contract("gnb_distance requires a basis in gNB mode".into()));
    }
    let sys = build_random_gram(basis, tol, DiagonalKind::MeanThenSquare)?;
    solve_or_evaluate(&sys, coeffs, gram::DEFAULT_REL_CUTOFF)
}

/// The pNB distance `D_n^2 = E || target - sum c_k rho_{Z_k} ||^2` for
/// mutually independent `Z_k`.
pub fn pnb_distance(
    basis: &BasisSpec,
    coeffs: Option<&[f64]>,
    tol: f64,
) -> Result<DistanceReport> {
    if basis.mode != BasisMode::Pnb {
        return Err(Error::Contract("pnb_distance requires a basis in pNB mode".into()));
    }
    if !basis.independence {
        return Err(Error::Contract(
            "pnb_distance requires independent dilation factors".into(),
        ));
    }
    let sys = build_random_gram(basis, tol, DiagonalKind::SquareThenMean)?;
    solve_or_evaluate(&sys, coeffs, gram::DEFAULT_REL_CUTOFF)
}

/// Gram systems for both distances, for callers that want to compare them
/// under shared coefficients.
pub fn gnb_pnb_systems(basis: &BasisSpec, tol: f64) -> Result<(GramSystem, GramSystem)> {
    if !basis.independence {
        return Err(Error::Contract(
            "cross terms require independent dilation factors".into(),
        ));
    }
    let gnb = build_random_gram(basis, tol, DiagonalKind::MeanThenSquare)?;
    let mut pnb = gnb.clone();
    for k in 0..basis.len() {
        let v = basis.elements[k].mean_rho_norm_sq()?;
        pnb.g[(k, k)] = v.value;
        pnb.entry_err[(k, k)] = v.err;
    }
    Ok((gnb, pnb))
}

/// Assumption (P): `P(all Z_k in (0, 1]) = prod_k (1 - P(Z_k >= 1))`,
/// exact under independence.
pub fn assumption_p(basis: &BasisSpec) -> Result<f64> {
    if !basis.independence {
        return Err(Error::Contract(
            "assumption (P) is evaluated as a product, which requires independence".into(),
        ));
    }
    let mut p = 1.0;
    for d in &basis.elements {
        p *= 1.0 - d.survival(1.0)?;
    }
    Ok(p)
}

/// Lower-bound scale of Lemma-type estimates:
/// `1 / (log 2 + E |log min_k Z_k|)`, Monte Carlo for random elements,
/// exact for all-point-mass bases.
pub fn suffi_bound(basis: &BasisSpec, mc_count: usize, stream: RngStream) -> Result<f64> {
    let thetas: Option<Vec<f64>> =
        basis.elements.iter().map(|d| d.as_point_mass()).collect();
    let e_log_min = match thetas {
        Some(ts) => {
            let m = ts.iter().copied().fold(f64::INFINITY, f64::min);
            m.ln().abs()
        }
        None => {
            if mc_count < 10_000 {
                return Err(Error::Precondition(format!(
                    "suffi_bound needs at least 1e4 samples for random elements, got {mc_count}"
                )));
            }
            let draws: Vec<Vec<f64>> = basis
                .elements
                .iter()
                .enumerate()
                .map(|(k, d)| d.sample(stream.substream(k as u64), mc_count))
                .collect::<Result<_>>()?;
            let mut acc = CompensatedSum::new();
            for j in 0..mc_count {
                let m = draws.iter().map(|col| col[j]).fold(f64::INFINITY, f64::min);
                acc.add(m.ln().abs());
            }
            acc.value() / mc_count as f64
        }
    };
    Ok(1.0 / (std::f64::consts::LN_2 + e_log_min))
}

/// Condition (C): `sup_n sum_k c_{k,n}^2 / k^beta`.
pub fn condition_c(coeffs_by_n: &[Vec<f64>], beta: f64) -> Result<f64> {
    Ok(condition_c_profile(coeffs_by_n, beta)?
        .into_iter()
        .fold(0.0_f64, |m, (_, v)| m.max(v)))
}

/// Per-vector values `(n, sum_k c_{k,n}^2 / k^beta)` behind [`condition_c`].
pub fn condition_c_profile(coeffs_by_n: &[Vec<f64>], beta: f64) -> Result<Vec<(usize, f64)>> {
    if beta <= 1.0 || beta.is_nan() {
        return Err(Error::Precondition(format!("beta must exceed 1, got {beta}")));
    }
    Ok(coeffs_by_n
        .iter()
        .map(|c| {
            let s: f64 = c
                .iter()
                .enumerate()
                .map(|(i, &ck)| ck * ck / ((i + 1) as f64).powf(beta))
                .sum();
            (c.len(), s)
        })
        .collect())
}

/// One row of the moment-growth table.
#[derive(Debug, Clone, Copy)]
pub struct MomentGrowthRow {
    pub alpha: f64,
    /// `sup_{k <= k_max} k^alpha E Z_k^alpha`.
    pub sup: f64,
    pub argmax_k: usize,
    /// The supremum sits at the boundary and is still growing: the family
    /// shows no sign of satisfying the uniform moment bound.
    pub rising: bool,
}

/// Table of `sup_{k<=k_max} k^alpha E Z_k^alpha` per `alpha` (exact
/// closed-form moments).
pub fn moment_growth(
    family: &[Distribution],
    alphas: &[f64],
    k_max: usize,
) -> Result<Vec<MomentGrowthRow>> {
    if k_max == 0 || family.len() < k_max {
        return Err(Error::Precondition(format!(
            "need at least k_max = {k_max} family members, got {}",
            family.len()
        )));
    }
    alphas
        .iter()
        .map(|&alpha| {
            if alpha < 1.0 || alpha.is_nan() {
                return Err(Error::Precondition(format!(
                    "moment growth is checked for alpha >= 1, got {alpha}"
                )));
            }
            let mut sup = f64::NEG_INFINITY;
            let mut argmax_k = 0;
            let mut vals = Vec::with_capacity(k_max);
            for k in 1..=k_max {
                let v = (k as f64).powf(alpha) * family[k - 1].moment(alpha)?;
                vals.push(v);
                if v > sup {
                    sup = v;
                    argmax_k = k;
                }
            }
            let rising = argmax_k == k_max
                && k_max >= 4
                && vals[k_max - 1] > 1.2 * vals[k_max / 2 - 1];
            Ok(MomentGrowthRow { alpha, sup, argmax_k, rising })
        })
        .collect()
}

/// Condition (T2): tail decay `(M, M int_M^inf target(t)^2 dt)` on an
/// increasing grid; the caller inspects the decay to 0.
pub fn t2_check(target: &Target, m_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    for w in m_grid.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Precondition("M grid must be increasing".into()));
        }
    }
    m_grid
        .iter()
        .map(|&m| {
            if m <= 0.0 || m.is_nan() {
                return Err(Error::Precondition(format!("M must be positive, got {m}")));
            }
            let tail = match target {
                Target::Chi => {
                    if m >= 1.0 {
                        0.0
                    } else {
                        1.0 - m
                    }
                }
                Target::SurvivalOf(d) => match d.normalized() {
                    Distribution::PointMass(theta) => (theta - m).max(0.0),
                    Distribution::Exponential(rate) => (-2.0 * rate * m).exp() / (2.0 * rate),
                    other => {
                        // Quadrature over [M, L]; L certified by the
                        // monotone bound int_L^inf S^2 <= S(L) E X.
                        let mean = other.mean()?;
                        let mut l = (m * 2.0).max(m + 1.0);
                        while other.survival(l)? * mean > 1e-14 {
                            l *= 2.0;
                            if l > 1e12 {
                                return Err(Error::Resource {
                                    msg: format!("T2 tail for {other} decays too slowly"),
                                    achievable_tol: other.survival(l)? * mean,
                                });
                            }
                        }
                        let f = |t: f64| {
                            let s = other.survival(t).unwrap_or(f64::NAN);
                            s * s
                        };
                        adaptive_simpson(&f, m, l, 1e-12)?.value
                    }
                },
            };
            Ok((m, m * tail))
        })
        .collect()
}

/// Named experiment families exposed on the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Preset {
    /// Point masses at `1/k` (the classical dilation family).
    Bd,
    /// Exponential laws `E(k)` (dilated exponentials).
    ExpDilated,
    /// `Gamma(k, scale)`; the scale is a free parameter (e.g. `n`).
    GammaKn { scale: f64 },
    /// The concentrated family around `1/k` (see
    /// [`crate::families::concentrated_family`]).
    Concentrated { vartheta: f64 },
}

pub fn preset_family(preset: Preset, n: usize) -> Result<Vec<Distribution>> {
    if n == 0 {
        return Err(Error::Precondition("preset family size must be >= 1".into()));
    }
    Ok(match preset {
        Preset::Bd => (1..=n)
            .map(|k| Distribution::PointMass(1.0 / k as f64))
            .collect(),
        Preset::ExpDilated => (1..=n)
            .map(|k| Distribution::Exponential(k as f64))
            .collect(),
        Preset::GammaKn { scale } => {
            if scale <= 0.0 || scale.is_nan() {
                return Err(Error::Precondition(format!(
                    "gamma-kn scale must be positive, got {scale}"
                )));
            }
            (1..=n)
                .map(|k| Distribution::GammaDist { shape: k as f64, rate: scale })
                .collect()
        }
        Preset::Concentrated { vartheta } => concentrated_family(n, vartheta)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bracket::{k_const, EULER_GAMMA};

    #[test]
    fn mobius_first_values() {
        assert_eq!(mobius_sieve(6), vec![1, -1, -1, 0, -1, 1]);
        assert_eq!(mobius_sieve(4)[3], 0);
        assert_eq!(mobius_sieve(30)[29], -1); // mu(30) = mu(2*3*5) = -1
        assert!(mobius_sieve(0).is_empty());
    }

    #[test]
    fn mertens_scale_sanity() {
        let mu = mobius_sieve(10_000);
        let m: i64 = mu.iter().map(|&x| x as i64).sum();
        assert!(m.abs() < 100, "M(10^4) = {m}");
    }

    #[test]
    fn nu_one_from_closed_pieces() {
        // nu_1 = ||chi + rho_1||^2 = 1 + 2(1 - gamma) + K
        let k = k_const();
        let expect = 1.0 + 2.0 * (1.0 - EULER_GAMMA) + k.value;
        let got = nu_eval(1, 0.1, 1e-6).unwrap();
        assert!((got - expect).abs() < 1e-5, "{got} vs {expect}");
        // eps -> infinity kills every k >= 2 coefficient
        let far = nu_eval(3, 60.0, 1e-6).unwrap();
        assert!((far - expect).abs() < 1e-4, "{far} vs {expect}");
    }

    #[test]
    fn basis_spec_contracts() {
        let e = vec![Distribution::Exponential(1.0)];
        assert!(BasisSpec::new(e.clone(), BasisMode::Pnb, false, Target::Chi).is_err());
        assert!(BasisSpec::new(e.clone(), BasisMode::Deterministic, true, Target::Chi).is_err());
        assert!(BasisSpec::new(e, BasisMode::Gnb, false, Target::Chi).is_ok());
        assert!(BasisSpec::new(vec![], BasisMode::Gnb, false, Target::Chi).is_err());
    }

    #[test]
    fn point_mass_basis_reproduces_deterministic_distance() {
        let k = k_const();
        let expect = 1.0 - (1.0 - EULER_GAMMA).powi(2) / k.value;
        for mode in [BasisMode::Gnb, BasisMode::Pnb] {
            let basis = BasisSpec::new(
                vec![Distribution::PointMass(1.0)],
                mode,
                true,
                Target::Chi,
            )
            .unwrap();
            let rep = match mode {
                BasisMode::Gnb => gnb_distance(&basis, None, 1e-6).unwrap(),
                _ => pnb_distance(&basis, None, 1e-6).unwrap(),
            };
            assert!(
                (rep.distance_sq - expect).abs() < 1e-4,
                "{mode:?}: {} vs {expect}",
                rep.distance_sq
            );
        }
    }

    #[test]
    fn assumption_p_examples() {
        let small = BasisSpec::new(
            vec![Distribution::PointMass(0.5); 4],
            BasisMode::Pnb,
            true,
            Target::Chi,
        )
        .unwrap();
        assert_eq!(assumption_p(&small).unwrap(), 1.0);

        let mut elems = vec![Distribution::PointMass(0.5); 3];
        elems.push(Distribution::PointMass(2.0));
        let blocked =
            BasisSpec::new(elems, BasisMode::Pnb, true, Target::Chi).unwrap();
        assert_eq!(assumption_p(&blocked).unwrap(), 0.0);
    }

    #[test]
    fn suffi_bound_point_masses() {
        let n = 8;
        let basis = BasisSpec::new(
            preset_family(Preset::Bd, n).unwrap(),
            BasisMode::Pnb,
            true,
            Target::Chi,
        )
        .unwrap();
        let got = suffi_bound(&basis, 10_000, RngStream::new(1, 0)).unwrap();
        let expect = 1.0 / (std::f64::consts::LN_2 + (n as f64).ln());
        assert!((got - expect).abs() < 1e-14);

        let one = BasisSpec::new(
            vec![Distribution::PointMass(1.0)],
            BasisMode::Pnb,
            true,
            Target::Chi,
        )
        .unwrap();
        let got = suffi_bound(&one, 10_000, RngStream::new(1, 0)).unwrap();
        assert!((got - 1.0 / std::f64::consts::LN_2).abs() < 1e-14);
    }

    #[test]
    fn condition_c_bounds() {
        // c_k = -mu(k) k^-eps, beta = 2: bounded by pi^2/6
        let coeffs: Vec<Vec<f64>> = (1..=32).map(|n| mobius_coeffs(n, 0.1)).collect();
        let v = condition_c(&coeffs, 2.0).unwrap();
        assert!(v <= std::f64::consts::PI.powi(2) / 6.0 + 1e-12);
        assert_eq!(condition_c(&[vec![0.0; 5]], 1.5).unwrap(), 0.0);
        assert!(condition_c(&coeffs, 1.0).is_err());
    }

    #[test]
    fn moment_growth_flags_gamma_kn() {
        let n = 16;
        let exp_rows = moment_growth(
            &preset_family(Preset::ExpDilated, n).unwrap(),
            &[1.0, 2.0],
            n,
        )
        .unwrap();
        // k^alpha E E(k)^alpha = Gamma(1 + alpha) for every k
        assert!((exp_rows[0].sup - 1.0).abs() < 1e-12);
        assert!((exp_rows[1].sup - 2.0).abs() < 1e-10);
        assert!(!exp_rows[0].rising && !exp_rows[1].rising);

        let gamma_rows = moment_growth(
            &preset_family(Preset::GammaKn { scale: n as f64 }, n).unwrap(),
            &[2.0],
            n,
        )
        .unwrap();
        assert!(gamma_rows[0].rising, "Gamma(k, n) should violate the moment bound");
    }

    #[test]
    fn t2_tail_values() {
        let chi_rows = t2_check(&Target::Chi, &[0.5, 2.0, 8.0]).unwrap();
        assert!((chi_rows[0].1 - 0.25).abs() < 1e-15);
        assert_eq!(chi_rows[1].1, 0.0);
        assert_eq!(chi_rows[2].1, 0.0);

        let exp_rows = t2_check(
            &Target::SurvivalOf(Distribution::Exponential(1.0)),
            &[1.0, 2.0, 4.0],
        )
        .unwrap();
        for &(m, v) in &exp_rows {
            let expect = m * (-2.0 * m).exp() / 2.0;
            assert!((v - expect).abs() < 1e-12);
        }

        let pm_rows = t2_check(
            &Target::SurvivalOf(Distribution::PointMass(0.5)),
            &[0.6, 1.0],
        )
        .unwrap();
        assert_eq!(pm_rows[0].1, 0.0);

        assert!(t2_check(&Target::Chi, &[2.0, 1.0]).is_err());
    }

    #[test]
    fn preset_families() {
        let bd = preset_family(Preset::Bd, 3).unwrap();
        assert_eq!(bd[2], Distribution::PointMass(1.0 / 3.0));
        let exp = preset_family(Preset::ExpDilated, 2).unwrap();
        assert_eq!(exp[1], Distribution::Exponential(2.0));
        let conc = preset_family(Preset::Concentrated { vartheta: 1.0 }, 2).unwrap();
        assert_eq!(conc.len(), 2);
        assert!(preset_family(Preset::GammaKn { scale: -1.0 }, 2).is_err());
    }
}
