//! Fractional-part dilations `rho_theta(t) = {theta/t}` and certified
//! inner products among them and with `chi = 1_(0,1]` in `L^2(0, inf)`.
//!
//! The inner products are improper integrals of sawtooth products. After
//! the substitution `u = 1/t` they become
//!
//! ```text
//! <rho_a, rho_b> = int_0^inf {a u}{b u} u^-2 du,
//! ```
//!
//! which is integrated *exactly* on every interval between consecutive
//! breakpoints `{m/a} U {n/b}` (on such an interval the integrand is
//! `(a u - m)(b u - n) / u^2` with antiderivative
//! `a b u - (a n + b m) ln u - m n / u`), up to a cutoff `U`. The tail
//! beyond `U` is bounded by `int_U^inf u^-2 du = 1/U` since
//! `0 <= {a u}{b u} <= 1`; that bound goes into the certified error, never
//! into the value.

use crate::bracket::{k_const, BracketedValue, EULER_GAMMA};
use crate::error::{Error, Result};
use crate::kahan::CompensatedSum;

/// Default certified tolerance for inner products.
pub const DEFAULT_TOL: f64 = 1e-6;

/// Maximum number of exactly-integrated pieces per integral.
pub const BREAKPOINT_BUDGET: usize = 50_000_000;

/// Safety factor covering per-piece evaluation rounding (a few ulps per
/// term, accumulated compensated).
const ROUNDING_FACTOR: f64 = 8.0 * f64::EPSILON;

fn require_positive(name: &str, x: f64) -> Result<()> {
    if x <= 0.0 || !x.is_finite() {
        return Err(Error::Domain(format!("{name} must be positive and finite, got {x}")));
    }
    Ok(())
}

/// `rho_theta(t) = {theta / t}`, in `[0, 1)`.
pub fn rho_eval(theta: f64, t: f64) -> Result<f64> {
    require_positive("theta", theta)?;
    require_positive("t", t)?;
    let ratio = theta / t;
    if !ratio.is_finite() {
        return Err(Error::Domain(format!("theta/t overflows: {theta}/{t}")));
    }
    Ok(ratio.fract())
}

/// Detailed result of the piecewise-exact integration, including the
/// diagnostic (uncertified) tail estimate `1/(4U)`.
#[derive(Debug, Clone, Copy)]
pub struct InnerRhoRhoDetail {
    pub bracket: BracketedValue,
    /// Certified tail bound `1/U`; already contained in `bracket.err`.
    pub tail_bound: f64,
    /// Refined tail estimate `1/(4U)` (the sawtooth factors average 1/2
    /// each). Reported for diagnostics only, never used for certification.
    pub tail_estimate: f64,
    /// Number of exactly integrated pieces.
    pub pieces: usize,
    /// Cutoff `U` in the `u = 1/t` variable.
    pub cutoff: f64,
}

/// `<rho_a, rho_b> = int_0^inf {a/t}{b/t} dt` with certified error `<= tol`.
pub fn inner_rho_rho(a: f64, b: f64, tol: f64) -> Result<BracketedValue> {
    Ok(inner_rho_rho_detailed(a, b, tol)?.bracket)
}

/// As [`inner_rho_rho`], with tail/piece diagnostics.
pub fn inner_rho_rho_detailed(a: f64, b: f64, tol: f64) -> Result<InnerRhoRhoDetail> {
    require_positive("a", a)?;
    require_positive("b", b)?;
    require_positive("tol", tol)?;

    // Sorting the arguments makes the computation literally identical under
    // swap, so symmetry holds bit-for-bit.
    let (a, b) = if a <= b { (a, b) } else { (b, a) };

    // Tail bound 1/U = tol/2 leaves the other half of the budget to
    // rounding, which stays orders of magnitude below it.
    let cutoff = 2.0 / tol;
    let est_pieces = (a + b) * cutoff;
    if est_pieces > BREAKPOINT_BUDGET as f64 {
        return Err(Error::Resource {
            msg: format!(
                "inner_rho_rho({a}, {b}) needs about {est_pieces:.3e} breakpoints for tol {tol:e} \
                 (budget {BREAKPOINT_BUDGET})"
            ),
            achievable_tol: 2.0 * (a + b) / BREAKPOINT_BUDGET as f64,
        });
    }

    let mut acc = CompensatedSum::new();
    let mut abs_acc = CompensatedSum::new();
    let mut pieces: usize = 0;

    // Current floors m = floor(a u), n = floor(b u) and the u at which each
    // next increments.
    let mut m: u64 = 0;
    let mut n: u64 = 0;
    let mut next_a = 1.0 / a;
    let mut next_b = 1.0 / b;
    let mut u_prev = 0.0_f64;

    while u_prev < cutoff {
        let u_next = next_a.min(next_b).min(cutoff);
        let du = u_next - u_prev;
        if du > 0.0 {
            if m == 0 && n == 0 {
                // First stretch: integrand is exactly a*b.
                let t1 = a * b * du;
                acc.add(t1);
                abs_acc.add(t1);
            } else {
                let t1 = a * b * du;
                let t2 = -((a * n as f64) + (b * m as f64)) * (du / u_prev).ln_1p();
                let t3 = (m as f64 * n as f64) * du / (u_prev * u_next);
                acc.add(t1);
                acc.add(t2);
                acc.add(t3);
                abs_acc.add(t1.abs() + t2.abs() + t3.abs());
            }
            pieces += 1;
            if pieces > BREAKPOINT_BUDGET {
                return Err(Error::Resource {
                    msg: format!("breakpoint budget exhausted at u = {u_next:.6e}"),
                    achievable_tol: 2.0 / u_next,
                });
            }
        }
        if u_next >= cutoff {
            break;
        }
        if next_a <= u_next {
            m += 1;
            next_a = (m + 1) as f64 / a;
        }
        if next_b <= u_next {
            n += 1;
            next_b = (n + 1) as f64 / b;
        }
        u_prev = u_next;
    }

    let tail_bound = 1.0 / cutoff;
    let rounding = ROUNDING_FACTOR * abs_acc.value();
    let err = tail_bound + rounding;
    if err > tol {
        // Rounding grows with the cutoff, so tolerances below roughly
        // sqrt(eps * a * b) are unreachable; report what was achieved.
        return Err(Error::Resource {
            msg: format!(
                "rounding floor exceeds requested tol {tol:e} for inner_rho_rho({a}, {b})"
            ),
            achievable_tol: err,
        });
    }
    let bracket = BracketedValue::new(acc.value(), err)?;
    Ok(InnerRhoRhoDetail {
        bracket,
        tail_bound,
        tail_estimate: 0.25 / cutoff,
        pieces,
        cutoff,
    })
}

/// `<chi, rho_theta> = int_0^1 {theta/t} dt`.
///
/// For `theta <= 1` this has the closed form
/// `theta (1 - gamma) + theta ln(1/theta)` (err is rounding only). For
/// `theta > 1` it equals `theta int_theta^inf {v} v^-2 dv`, integrated by
/// the same piecewise-exact scheme.
pub fn inner_chi_rho(theta: f64, tol: f64) -> Result<BracketedValue> {
    require_positive("theta", theta)?;
    require_positive("tol", tol)?;

    if theta <= 1.0 {
        let value = theta * ((1.0 - EULER_GAMMA) - theta.ln());
        let err = 4.0 * f64::EPSILON * theta * ((1.0 - EULER_GAMMA) + theta.ln().abs());
        return BracketedValue::new(value, err);
    }

    // theta * int_theta^U (v - n)/v^2 dv, pieces between consecutive
    // integers; tail <= theta/U.
    let cutoff = 2.0 * theta / tol;
    let est_pieces = cutoff - theta;
    if est_pieces > BREAKPOINT_BUDGET as f64 {
        return Err(Error::Resource {
            msg: format!(
                "inner_chi_rho({theta}) needs about {est_pieces:.3e} breakpoints for tol {tol:e}"
            ),
            achievable_tol: 2.0 * theta / (BREAKPOINT_BUDGET as f64 + theta),
        });
    }

    let mut acc = CompensatedSum::new();
    let mut abs_acc = CompensatedSum::new();
    let mut v_prev = theta;
    let mut n = theta.floor() as u64;
    let mut v_next_break = (n + 1) as f64;
    while v_prev < cutoff {
        let v_next = v_next_break.min(cutoff);
        let dv = v_next - v_prev;
        if dv > 0.0 {
            // int (v - n)/v^2 dv = ln(v1/v0) - n dv/(v0 v1)
            let t1 = (dv / v_prev).ln_1p();
            let t2 = -(n as f64) * dv / (v_prev * v_next);
            acc.add(t1);
            acc.add(t2);
            abs_acc.add(t1.abs() + t2.abs());
        }
        if v_next >= cutoff {
            break;
        }
        n += 1;
        v_next_break = (n + 1) as f64;
        v_prev = v_next;
    }

    let tail_bound = theta / cutoff;
    let rounding = ROUNDING_FACTOR * theta * abs_acc.value();
    let err = tail_bound + rounding;
    if err > tol {
        return Err(Error::Resource {
            msg: format!("rounding floor exceeds requested tol {tol:e} for inner_chi_rho({theta})"),
            achievable_tol: err,
        });
    }
    BracketedValue::new(theta * acc.value(), err)
}

/// `||rho_theta||^2 = K theta` (exact homogeneity under `t -> theta t`).
pub fn norm_rho_sq(theta: f64) -> Result<BracketedValue> {
    require_positive("theta", theta)?;
    Ok(k_const().scale(theta))
}
