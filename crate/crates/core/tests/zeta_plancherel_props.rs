//! Functional-equation consistency for zeta and the time-domain /
//! Mellin-domain agreement of residual distances.

mod common;

use common::TestRng;
use nblab_core::criteria::{BasisMode, BasisSpec, Target};
use nblab_core::families::Distribution;
use nblab_core::gram::{assemble_deterministic, residual_with_coeffs, solve, DEFAULT_REL_CUTOFF};
use nblab_core::plancherel::{plancherel_residual, CriticalLineGrid};
use nblab_core::special::log_gamma;
use nblab_core::zeta::zeta_value;
use num_complex::Complex64;

/// `chi_fe(s) = 2^s pi^(s-1) sin(pi s / 2) Gamma(1 - s)`, the factor of
/// the functional equation `zeta(s) = chi_fe(s) zeta(1 - s)`.
fn chi_fe(s: Complex64) -> Complex64 {
    let pi = std::f64::consts::PI;
    let two_pow = (s * std::f64::consts::LN_2).exp();
    let pi_pow = ((s - 1.0) * pi.ln()).exp();
    let sine = (s * pi / 2.0).sin();
    let gamma = log_gamma(Complex64::new(1.0, 0.0) - s)
        .expect("Re(1-s) > 0 on the critical line")
        .exp();
    two_pow * pi_pow * sine * gamma
}

#[test]
fn functional_equation_on_critical_line() {
    // On sigma = 1/2, |chi_fe| = 1 and the identity reduces to
    // |zeta(1/2 + it)| = |zeta(1/2 - it)|.
    let mut rng = TestRng::new(0xFE);
    for _ in 0..50 {
        let t = rng.range(0.5, 45.0);
        let s = Complex64::new(0.5, t);
        let lhs = zeta_value(s).unwrap().norm();
        let rhs = chi_fe(s).norm() * zeta_value(Complex64::new(0.5, -t)).unwrap().norm();
        assert!(
            (lhs - rhs).abs() <= 1e-6 * lhs.max(1.0),
            "t = {t}: |zeta| = {lhs} vs |chi_fe||zeta(1-s)| = {rhs}"
        );
        assert!((chi_fe(s).norm() - 1.0).abs() < 1e-9, "|chi_fe| off at t = {t}");
    }
}

#[test]
fn plancherel_agrees_with_time_domain_at_modest_cutoff() {
    // Quick version of the acceptance cross-check: T = 400, n in {1, 2}.
    let grid = CriticalLineGrid::build(400.0, 0.05).unwrap();
    let thetas: Vec<f64> = (1..=2).map(|k| 1.0 / k as f64).collect();
    let sys = assemble_deterministic(&thetas, 1e-6).unwrap();
    for n in 1..=2usize {
        let prefix = sys.prefix(n).unwrap();
        let rep = solve(&prefix, DEFAULT_REL_CUTOFF).unwrap();
        let time_domain = residual_with_coeffs(&prefix, &rep.coeffs).unwrap();
        let basis = BasisSpec::new(
            (1..=n).map(|k| Distribution::PointMass(1.0 / k as f64)).collect(),
            BasisMode::Deterministic,
            true,
            Target::Chi,
        )
        .unwrap();
        let (mellin, tail) = plancherel_residual(&basis, &rep.coeffs, &grid).unwrap();
        assert!(
            (time_domain - mellin).abs() <= 1e-2 + tail,
            "n = {n}: time {time_domain} vs mellin {mellin} (tail {tail:.2e})"
        );
    }
}

#[test]
fn plancherel_gnb_exponential_route() {
    // gNB basis of exponential laws: Mellin factor Gamma(1+s)/k^s. The
    // optimal one-element distance from the quadrature Gram must match.
    let grid = CriticalLineGrid::build(400.0, 0.05).unwrap();
    let basis = BasisSpec::new(
        vec![Distribution::Exponential(1.0)],
        BasisMode::Gnb,
        true,
        Target::Chi,
    )
    .unwrap();
    let rep = nblab_core::criteria::gnb_distance(&basis, None, 1e-6).unwrap();
    let time_domain = rep.distance_sq;
    let (mellin, tail) = plancherel_residual(&basis, &rep.coeffs, &grid).unwrap();
    assert!(
        (time_domain - mellin).abs() <= 1e-2 + tail,
        "time {time_domain} vs mellin {mellin} (tail {tail:.2e})"
    );
}

#[test]
fn plancherel_rejects_unsupported_bases() {
    let grid = CriticalLineGrid::build(20.0, 0.2).unwrap();
    let basis = BasisSpec::new(
        vec![Distribution::GammaDist { shape: 2.0, rate: 3.0 }],
        BasisMode::Gnb,
        true,
        Target::Chi,
    )
    .unwrap();
    assert!(matches!(
        plancherel_residual(&basis, &[1.0], &grid),
        Err(nblab_core::Error::Capability(_))
    ));
}
