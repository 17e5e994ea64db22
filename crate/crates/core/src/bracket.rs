//! Certified numeric values and the two process-wide constants.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// A numeric value together with a certified two-sided error bound:
/// the true quantity lies in `[value - err, value + err]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketedValue {
    pub value: f64,
    /// Certified bound on `|value - true|`. Always `>= 0`.
    pub err: f64,
}

impl BracketedValue {
    pub fn new(value: f64, err: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::Data(format!("bracketed value not finite: {value}")));
        }
        if err < 0.0 || !err.is_finite() {
            return Err(Error::Data(format!("bracket error bound invalid: {err}")));
        }
        Ok(Self { value, err })
    }

    /// A value whose only uncertainty is representation rounding.
    pub fn exact(value: f64) -> Self {
        Self { value, err: 0.0 }
    }

    pub fn lo(&self) -> f64 {
        self.value - self.err
    }

    pub fn hi(&self) -> f64 {
        self.value + self.err
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo() && x <= self.hi()
    }

    /// Scale by a constant; the bound scales by `|c|` plus one rounding.
    pub fn scale(&self, c: f64) -> Self {
        let value = c * self.value;
        let err = c.abs() * self.err + 2.0 * f64::EPSILON * value.abs();
        Self { value, err }
    }
}

/// Euler's constant, stored to 30 digits.
#[allow(clippy::excessive_precision)]
pub const EULER_GAMMA: f64 = 0.577215664901532860606512090082;

/// Tolerance used for the one-time computation of `K`. The certified
/// rounding floor of the piecewise-exact integrator sits near 2e-7 at
/// unit arguments, so this is close to the best reachable bracket.
const K_TOL: f64 = 5e-7;

/// Process-wide constants: Euler's gamma and
/// `K = ||rho_1||^2 = int_0^inf {1/t}^2 dt`.
///
/// `K` is computed once from our own certified integrator and cached; the
/// classical identity `K = log(2 pi) - gamma` is used in tests as a
/// cross-check only, never as the definition.
#[derive(Debug, Clone, Copy)]
pub struct Constants {
    pub euler_gamma: f64,
    pub k_const: BracketedValue,
}

static K_CACHE: OnceLock<BracketedValue> = OnceLock::new();

impl Constants {
    pub fn get() -> Self {
        Self {
            euler_gamma: EULER_GAMMA,
            k_const: k_const(),
        }
    }
}

/// `K = <rho_1, rho_1>`, computed once per process and cached behind a
/// publication barrier; later reads are lock-free.
pub fn k_const() -> BracketedValue {
    *K_CACHE.get_or_init(|| {
        crate::beurling::inner_rho_rho(1.0, 1.0, K_TOL)
            .expect("K computation stays within the breakpoint budget")
    })
}
