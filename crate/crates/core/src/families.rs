//! Distribution algebra for random dilation factors: exact moments,
//! survival functions, reproducible sampling, and the mean Beurling
//! function `Psi_X(t) = E{X/t}`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::Distribution as _;

use crate::beurling::rho_eval;
use crate::bracket::{k_const, BracketedValue};
use crate::error::{Error, Result};
use crate::kahan::CompensatedSum;
use crate::rng::RngStream;
use crate::special::{gamma_q, ln_gamma};

/// Law of a positive random variable.
///
/// `SquaredGamma(beta, lambda)` is the law of `Y^2` with
/// `Y ~ Gamma(beta, lambda)` (rate parameterization throughout).
/// `Scaled` factors compose multiplicatively and collapse onto the base
/// laws via [`Distribution::normalized`].
#[derive(Debug, Clone, PartialEq)]
pub enum Distribution {
    PointMass(f64),
    Exponential(f64),
    GammaDist { shape: f64, rate: f64 },
    SquaredGamma { shape: f64, rate: f64 },
    Scaled { inner: Box<Distribution>, factor: f64 },
}

use Distribution::*;

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x <= 0.0 || !x.is_finite() {
        return Err(Error::Domain(format!("{name} must be positive and finite, got {x}")));
    }
    Ok(())
}

impl Distribution {
    /// Validate all parameters (strictly positive, finite).
    pub fn validate(&self) -> Result<()> {
        match self {
            PointMass(theta) => check_positive("point mass location", *theta),
            Exponential(rate) => check_positive("exponential rate", *rate),
            GammaDist { shape, rate } | SquaredGamma { shape, rate } => {
                check_positive("gamma shape", *shape)?;
                check_positive("gamma rate", *rate)
            }
            Scaled { inner, factor } => {
                check_positive("scale factor", *factor)?;
                inner.validate()
            }
        }
    }

    /// Collapse `Scaled` wrappers onto the base laws:
    /// `c * Exp(l) = Exp(l/c)`, `c * Gamma(b, l) = Gamma(b, l/c)`,
    /// `c * SqGamma(b, l) = SqGamma(b, l/sqrt(c))`.
    pub fn normalized(&self) -> Distribution {
        match self {
            Scaled { inner, factor } => match inner.normalized() {
                PointMass(theta) => PointMass(factor * theta),
                Exponential(rate) => Exponential(rate / factor),
                GammaDist { shape, rate } => GammaDist { shape, rate: rate / factor },
                SquaredGamma { shape, rate } => {
                    SquaredGamma { shape, rate: rate / factor.sqrt() }
                }
                nested @ Scaled { .. } => nested, // unreachable after recursion
            },
            other => other.clone(),
        }
    }

    /// `Some(theta)` when the (normalized) law is a point mass.
    pub fn as_point_mass(&self) -> Option<f64> {
        match self.normalized() {
            PointMass(theta) => Some(theta),
            _ => None,
        }
    }

    /// `E X^alpha` by closed form.
    ///
    /// Low integer and half-integer orders use the exact rational forms
    /// (`Gamma(beta + m)/Gamma(beta)` telescopes); everything else goes
    /// through `ln Gamma`.
    pub fn moment(&self, alpha: f64) -> Result<f64> {
        self.validate()?;
        if alpha < 0.0 || !alpha.is_finite() {
            return Err(Error::Domain(format!("alpha must be >= 0, got {alpha}")));
        }
        if alpha == 0.0 {
            return Ok(1.0);
        }
        let value = match self {
            PointMass(theta) => theta.powf(alpha),
            Exponential(rate) => {
                if alpha == 1.0 {
                    1.0 / rate
                } else if alpha == 2.0 {
                    2.0 / (rate * rate)
                } else {
                    (ln_gamma(1.0 + alpha)? - alpha * rate.ln()).exp()
                }
            }
            GammaDist { shape, rate } => {
                if alpha == 1.0 {
                    shape / rate
                } else if alpha == 2.0 {
                    shape * (shape + 1.0) / (rate * rate)
                } else {
                    (ln_gamma(shape + alpha)? - ln_gamma(*shape)? - alpha * rate.ln()).exp()
                }
            }
            SquaredGamma { shape, rate } => {
                if alpha == 0.5 {
                    shape / rate
                } else if alpha == 1.0 {
                    shape * (shape + 1.0) / (rate * rate)
                } else if alpha == 2.0 {
                    shape * (shape + 1.0) * (shape + 2.0) * (shape + 3.0) / rate.powi(4)
                } else {
                    (ln_gamma(shape + 2.0 * alpha)?
                        - ln_gamma(*shape)?
                        - 2.0 * alpha * rate.ln())
                    .exp()
                }
            }
            Scaled { inner, factor } => factor.powf(alpha) * inner.moment(alpha)?,
        };
        if !value.is_finite() {
            return Err(Error::Range(format!(
                "moment overflow: E X^{alpha} for {self}"
            )));
        }
        Ok(value)
    }

    pub fn mean(&self) -> Result<f64> {
        self.moment(1.0)
    }

    /// `P(X >= x)`.
    pub fn survival(&self, x: f64) -> Result<f64> {
        self.validate()?;
        if x < 0.0 || !x.is_finite() {
            return Err(Error::Domain(format!("survival requires x >= 0, got {x}")));
        }
        if x == 0.0 {
            return Ok(1.0);
        }
        Ok(match self {
            PointMass(theta) => {
                if x <= *theta {
                    1.0
                } else {
                    0.0
                }
            }
            Exponential(rate) => (-rate * x).exp(),
            GammaDist { shape, rate } => gamma_q(*shape, rate * x)?,
            SquaredGamma { shape, rate } => gamma_q(*shape, rate * x.sqrt())?,
            Scaled { inner, factor } => inner.survival(x / factor)?,
        })
    }

    /// `count` i.i.d. draws, deterministic given the stream.
    ///
    /// Exponential draws by inversion; Gamma draws by the standard
    /// Marsaglia-Tsang rejection scheme.
    pub fn sample(&self, stream: RngStream, count: usize) -> Result<Vec<f64>> {
        self.validate()?;
        if count == 0 {
            return Err(Error::Precondition("sample count must be >= 1".into()));
        }
        let mut rng = stream.rng();
        Ok(match self.normalized() {
            PointMass(theta) => vec![theta; count],
            Exponential(rate) => (0..count)
                .map(|_| -(-rng.random::<f64>()).ln_1p() / rate)
                .collect(),
            GammaDist { shape, rate } => {
                let g = rand_distr::Gamma::new(shape, 1.0 / rate)
                    .map_err(|e| Error::Domain(format!("gamma sampler: {e}")))?;
                (0..count).map(|_| g.sample(&mut rng)).collect()
            }
            SquaredGamma { shape, rate } => {
                let g = rand_distr::Gamma::new(shape, 1.0 / rate)
                    .map_err(|e| Error::Domain(format!("gamma sampler: {e}")))?;
                (0..count)
                    .map(|_| {
                        let y: f64 = g.sample(&mut rng);
                        y * y
                    })
                    .collect()
            }
            Scaled { .. } => unreachable!("normalized() removes Scaled"),
        })
    }

    /// `int_M^inf P(X >= x) dx = E (X - M)^+`, in closed form.
    ///
    /// This is the certified series-tail currency: for nonincreasing
    /// survival, `sum_{k > m} S(k t) <= (1/t) int_{m t}^inf S`.
    pub fn integrated_survival(&self, m: f64) -> Result<f64> {
        self.validate()?;
        if m < 0.0 || !m.is_finite() {
            return Err(Error::Domain(format!("integrated_survival requires M >= 0, got {m}")));
        }
        let v = match self {
            PointMass(theta) => (theta - m).max(0.0),
            Exponential(rate) => (-rate * m).exp() / rate,
            GammaDist { shape, rate } => {
                // E[X 1_{X>=M}] - M P(X >= M)
                let x = rate * m;
                (shape / rate) * gamma_q(shape + 1.0, x)? - m * gamma_q(*shape, x)?
            }
            SquaredGamma { shape, rate } => {
                // X = Y^2: E[Y^2 1_{Y >= sqrt M}] - M P(Y >= sqrt M)
                let y = rate * m.sqrt();
                shape * (shape + 1.0) / (rate * rate) * gamma_q(shape + 2.0, y)?
                    - m * gamma_q(*shape, y)?
            }
            Scaled { inner, factor } => factor * inner.integrated_survival(m / factor)?,
        };
        Ok(v.max(0.0))
    }

    /// `E ||rho_X||^2 = K E X` (Tonelli plus the exact homogeneity of
    /// `||rho_theta||^2 = K theta`).
    pub fn mean_rho_norm_sq(&self) -> Result<BracketedValue> {
        let mean = self.mean()?;
        if !mean.is_finite() {
            return Err(Error::Domain(format!("infinite mean for {self}")));
        }
        Ok(k_const().scale(mean))
    }
}

/// How to evaluate the mean Beurling function `Psi_X(t) = E{X/t}`.
#[derive(Debug, Clone, Copy)]
pub enum PsiMethod {
    /// Closed forms: point masses (`{theta/t}`) and exponential laws
    /// (`1/(lambda t) - 1/(e^(lambda t) - 1)`).
    ClosedForm,
    /// `Psi(t) = E X / t - sum_{k>=1} P(X >= k t)`, truncated when the
    /// certified-by-monotonicity tail estimate drops below 1e-12.
    MuntzSeries,
    /// Average of `{X_i/t}` over fresh draws.
    MonteCarlo { count: usize, stream: RngStream },
}

/// Truncation threshold for the survival series (see [`PsiMethod::MuntzSeries`]).
pub const MUNTZ_TAIL_EPS: f64 = 1e-12;

const MAX_SERIES_TERMS: usize = 20_000_000;

/// `sum_{k>=1} P(X >= k t)`, stopping after term `m` once
/// `survival(m t) (1 + E X/(m t))` falls below `tail_eps`.
pub(crate) fn survival_series_sum(d: &Distribution, t: f64, tail_eps: f64) -> Result<f64> {
    let mean = d.mean()?;
    let mut acc = CompensatedSum::new();
    let mut m: usize = 1;
    loop {
        let s = d.survival(m as f64 * t)?;
        acc.add(s);
        if s * (1.0 + mean / (m as f64 * t)) < tail_eps {
            return Ok(acc.value());
        }
        m += 1;
        if m > MAX_SERIES_TERMS {
            return Err(Error::Resource {
                msg: format!("survival series for {d} at t = {t:e} exceeds {MAX_SERIES_TERMS} terms"),
                achievable_tol: s * (1.0 + mean / (m as f64 * t)),
            });
        }
    }
}

/// `1/x - 1/(e^x - 1)`, the exponential-law `Psi` in the variable
/// `x = lambda t`. Bernoulli series below x = 0.01 avoids cancellation.
fn exp_psi(x: f64) -> f64 {
    if x < 0.01 {
        let x2 = x * x;
        0.5 - x / 12.0 + x * x2 / 720.0 - x * x2 * x2 / 30240.0
    } else {
        1.0 / x - 1.0 / x.exp_m1()
    }
}

/// `Psi_X(t) = E{X/t}` by the requested method.
pub fn mean_beurling(d: &Distribution, t: f64, method: &PsiMethod) -> Result<f64> {
    d.validate()?;
    if t <= 0.0 || !t.is_finite() {
        return Err(Error::Domain(format!("t must be positive and finite, got {t}")));
    }
    match method {
        PsiMethod::ClosedForm => match d.normalized() {
            PointMass(theta) => rho_eval(theta, t),
            Exponential(rate) => Ok(exp_psi(rate * t)),
            other => Err(Error::Capability(format!(
                "no closed-form mean Beurling function for {other}"
            ))),
        },
        PsiMethod::MuntzSeries => {
            let mean = d.mean()?;
            let sum = survival_series_sum(d, t, MUNTZ_TAIL_EPS)?;
            // Both pieces are positive and nearly equal for large t; the
            // true value is nonnegative, so clamp the rounding residue.
            Ok((mean / t - sum).max(0.0))
        }
        PsiMethod::MonteCarlo { count, stream } => {
            let draws = d.sample(*stream, *count)?;
            let mut acc = CompensatedSum::new();
            for x in &draws {
                acc.add((x / t).fract());
            }
            Ok(acc.value() / *count as f64)
        }
    }
}

/// Closed form when available, otherwise the truncated survival series.
pub fn mean_beurling_auto(d: &Distribution, t: f64) -> Result<f64> {
    match mean_beurling(d, t, &PsiMethod::ClosedForm) {
        Err(Error::Capability(_)) => mean_beurling(d, t, &PsiMethod::MuntzSeries),
        other => other,
    }
}

/// The concentrated family `X_{k,n} = SquaredGamma(n^(3+v)/k, n^(3+v)/sqrt(k))`,
/// k = 1..n: the square roots have mean `1/sqrt(k)` and variance `n^-(3+v)`.
pub fn concentrated_family(n: usize, vartheta: f64) -> Result<Vec<Distribution>> {
    if n == 0 {
        return Err(Error::Precondition("family size must be >= 1".into()));
    }
    check_positive("vartheta", vartheta)?;
    let scale = (n as f64).powf(3.0 + vartheta);
    if !scale.is_finite() {
        let safe_n = f64::MAX.powf(1.0 / (3.0 + vartheta)).floor();
        return Err(Error::Range(format!(
            "n^(3+vartheta) overflows for n = {n}; safe n <= {safe_n:.0}"
        )));
    }
    Ok((1..=n)
        .map(|k| SquaredGamma {
            shape: scale / k as f64,
            rate: scale / (k as f64).sqrt(),
        })
        .collect())
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointMass(theta) => write!(f, "pointmass:{theta}"),
            Exponential(rate) => write!(f, "exp:{rate}"),
            GammaDist { shape, rate } => write!(f, "gamma:{shape}:{rate}"),
            SquaredGamma { shape, rate } => write!(f, "sqgamma:{shape}:{rate}"),
            Scaled { inner, factor } => write!(f, "scaled:{factor}:{inner}"),
        }
    }
}

impl FromStr for Distribution {
    type Err = Error;

    /// Literal grammar, parsed left to right:
    /// `pointmass:0.5`, `exp:2`, `gamma:3:7`, `sqgamma:3:7`,
    /// `scaled:0.25:exp:1`.
    fn from_str(s: &str) -> Result<Self> {
        fn num(tok: Option<&str>, what: &str, lit: &str) -> Result<f64> {
            tok.ok_or_else(|| Error::Data(format!("missing {what} in `{lit}`")))?
                .parse::<f64>()
                .map_err(|_| Error::Data(format!("bad {what} in `{lit}`")))
        }
        let mut parts = s.splitn(2, ':');
        let kind = parts.next().unwrap_or("");
        let rest = parts.next();
        let d = match kind {
            "pointmass" => PointMass(num(rest, "location", s)?),
            "exp" => Exponential(num(rest, "rate", s)?),
            "gamma" | "sqgamma" => {
                let rest = rest.ok_or_else(|| Error::Data(format!("missing parameters in `{s}`")))?;
                let mut it = rest.splitn(2, ':');
                let shape = num(it.next(), "shape", s)?;
                let rate = num(it.next(), "rate", s)?;
                if kind == "gamma" {
                    GammaDist { shape, rate }
                } else {
                    SquaredGamma { shape, rate }
                }
            }
            "scaled" => {
                let rest = rest.ok_or_else(|| Error::Data(format!("missing factor in `{s}`")))?;
                let mut it = rest.splitn(2, ':');
                let factor = num(it.next(), "factor", s)?;
                let inner_lit = it
                    .next()
                    .ok_or_else(|| Error::Data(format!("missing inner law in `{s}`")))?;
                Scaled { inner: Box::new(inner_lit.parse()?), factor }
            }
            other => {
                return Err(Error::Data(format!(
                    "unknown distribution kind `{other}` in `{s}`"
                )))
            }
        };
        d.validate()?;
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_closed_forms() {
        // Gamma mean beta/lambda
        let g = GammaDist { shape: 3.0, rate: 7.0 };
        assert!((g.moment(1.0).unwrap() - 3.0 / 7.0).abs() < 1e-14);
        // Exponential second moment 2/lambda^2
        let e = Exponential(2.0);
        assert!((e.moment(2.0).unwrap() - 0.5).abs() < 1e-14);
        // SquaredGamma half-moment is the root's mean: shape/rate
        let sq = SquaredGamma { shape: 8.0, rate: 4.0 };
        assert!((sq.moment(0.5).unwrap() - 2.0).abs() < 1e-13);
        // Point mass
        assert!((PointMass(0.5).moment(3.0).unwrap() - 0.125).abs() < 1e-16);
    }

    #[test]
    fn concentrated_family_moments() {
        let fam = concentrated_family(5, 1.0).unwrap();
        for (i, d) in fam.iter().enumerate() {
            let k = (i + 1) as f64;
            assert!((d.moment(0.5).unwrap() - 1.0 / k.sqrt()).abs() < 1e-10);
            // Var(Y) = E X - (E sqrt(X))^2 = shape/rate^2 = n^-(3+v)
            let var_y = d.moment(1.0).unwrap() - d.moment(0.5).unwrap().powi(2);
            assert!((var_y - 5.0_f64.powf(-4.0)).abs() < 1e-12);
        }
        let single = concentrated_family(1, 1.0).unwrap();
        assert!((single[0].moment(0.5).unwrap() - 1.0).abs() < 1e-12);
        assert!(concentrated_family(0, 1.0).is_err());
    }

    #[test]
    fn survival_basics() {
        assert!((Exponential(3.0).survival(1.0).unwrap() - (-3.0_f64).exp()).abs() < 1e-15);
        assert_eq!(PointMass(0.5).survival(0.7).unwrap(), 0.0);
        assert_eq!(PointMass(0.5).survival(0.5).unwrap(), 1.0);
        assert_eq!(GammaDist { shape: 2.0, rate: 1.0 }.survival(0.0).unwrap(), 1.0);
        assert!(Exponential(1.0).survival(-0.1).is_err());
    }

    #[test]
    fn scaled_normalization_matches() {
        let direct = Exponential(4.0);
        let scaled = Scaled { inner: Box::new(Exponential(1.0)), factor: 0.25 };
        assert_eq!(scaled.normalized(), direct);
        for &a in &[0.5, 1.0, 2.5] {
            assert!(
                (scaled.moment(a).unwrap() - direct.moment(a).unwrap()).abs() < 1e-14
            );
        }
        for &x in &[0.1, 1.0, 3.0] {
            assert!(
                (scaled.survival(x).unwrap() - direct.survival(x).unwrap()).abs() < 1e-14
            );
        }
    }

    #[test]
    fn point_mass_psi_is_sawtooth() {
        let d = PointMass(0.7);
        for &t in &[0.3, 1.0, 2.0] {
            let cf = mean_beurling(&d, t, &PsiMethod::ClosedForm).unwrap();
            let series = mean_beurling(&d, t, &PsiMethod::MuntzSeries).unwrap();
            assert!((cf - rho_eval(0.7, t).unwrap()).abs() < 1e-15);
            assert!((cf - series).abs() < 1e-12, "t = {t}: {cf} vs {series}");
        }
    }

    #[test]
    fn exp_psi_small_argument_limit() {
        // Psi -> 1/2 as t -> 0+
        let v = mean_beurling(&Exponential(1.0), 1e-9, &PsiMethod::ClosedForm).unwrap();
        assert!((v - 0.5).abs() < 1e-9);
    }

    #[test]
    fn sampling_is_reproducible_and_positive() {
        let d = GammaDist { shape: 2.0, rate: 3.0 };
        let s = RngStream::new(11, 0);
        let a = d.sample(s, 1000).unwrap();
        let b = d.sample(s, 1000).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|&x| x > 0.0));
        assert_eq!(PointMass(0.4).sample(s, 5).unwrap(), vec![0.4; 5]);
        assert!(d.sample(s, 0).is_err());
    }

    #[test]
    fn literal_roundtrip() {
        for lit in ["pointmass:0.5", "exp:2", "gamma:3:7", "sqgamma:3:7", "scaled:0.25:exp:1"] {
            let d: Distribution = lit.parse().unwrap();
            assert_eq!(d.to_string(), lit);
        }
        assert!("exp:-1".parse::<Distribution>().is_err());
        assert!("cauchy:1".parse::<Distribution>().is_err());
        assert!("gamma:3".parse::<Distribution>().is_err());
    }

    #[test]
    fn integrated_survival_closed_forms() {
        // exponential: e^{-lM}/l
        let e = Exponential(2.0);
        for &m in &[0.0, 0.5, 3.0] {
            assert!((e.integrated_survival(m).unwrap() - (-2.0 * m).exp() / 2.0).abs() < 1e-14);
        }
        // point mass: (theta - M)^+
        let pm = PointMass(0.8);
        assert!((pm.integrated_survival(0.3).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(pm.integrated_survival(1.0).unwrap(), 0.0);
        // gamma: against a numeric Riemann sum of the survival function
        let g = GammaDist { shape: 2.5, rate: 1.5 };
        for &m in &[0.0, 1.0, 4.0] {
            let mut riemann = 0.0;
            let h = 1e-3;
            let mut x = m + 0.5 * h;
            while x < m + 40.0 {
                riemann += g.survival(x).unwrap() * h;
                x += h;
            }
            let v = g.integrated_survival(m).unwrap();
            assert!((v - riemann).abs() < 1e-4, "M = {m}: {v} vs {riemann}");
        }
        // integrated survival at 0 is the mean
        let sq = SquaredGamma { shape: 3.0, rate: 2.0 };
        assert!((sq.integrated_survival(0.0).unwrap() - sq.mean().unwrap()).abs() < 1e-12);
    }

    #[test]
    fn mean_rho_norm_uses_exact_identity() {
        let pm = PointMass(2.0).mean_rho_norm_sq().unwrap();
        let k = k_const();
        assert!((pm.value - 2.0 * k.value).abs() < 1e-12);
    }
}
