//! Projection properties of the Gram solver.

mod common;

use common::TestRng;
use nalgebra::DMatrix;
use nblab_core::gram::{assemble_deterministic, residual_with_coeffs, solve, DEFAULT_REL_CUTOFF};

/// Squared distance as a quotient of Gram determinants:
/// `det Gram(chi, phi_1..phi_n) / det Gram(phi_1..phi_n)`.
fn determinant_quotient(thetas: &[f64]) -> f64 {
    let sys = assemble_deterministic(thetas, 1e-6).unwrap();
    let n = thetas.len();
    let mut bordered = DMatrix::zeros(n + 1, n + 1);
    bordered[(0, 0)] = sys.target_norm_sq;
    for k in 0..n {
        bordered[(0, k + 1)] = sys.b[k];
        bordered[(k + 1, 0)] = sys.b[k];
        for l in 0..n {
            bordered[(k + 1, l + 1)] = sys.g[(k, l)];
        }
    }
    bordered.determinant() / sys.g.clone().determinant()
}

#[test]
fn distance_matches_gram_determinant_quotient() {
    for n in 1..=5usize {
        let thetas: Vec<f64> = (1..=n).map(|k| 1.0 / k as f64).collect();
        let sys = assemble_deterministic(&thetas, 1e-6).unwrap();
        let rep = solve(&sys, DEFAULT_REL_CUTOFF).unwrap();
        let quotient = determinant_quotient(&thetas);
        let rel = (rep.distance_sq - quotient).abs() / quotient.abs();
        assert!(rel < 1e-8, "n = {n}: solve {} vs quotient {quotient}", rep.distance_sq);
    }
}

#[test]
fn nested_bases_are_monotone() {
    let thetas: Vec<f64> = (1..=16).map(|k| 1.0 / k as f64).collect();
    let sys = assemble_deterministic(&thetas, 1e-6).unwrap();
    let mut prev = f64::INFINITY;
    let mut prev_slack = 0.0;
    for n in 1..=16 {
        let rep = solve(&sys.prefix(n).unwrap(), DEFAULT_REL_CUTOFF).unwrap();
        assert!(
            rep.distance_sq <= prev + prev_slack + rep.certified_slack,
            "distance increased at n = {n}"
        );
        prev = rep.distance_sq;
        prev_slack = rep.certified_slack;
    }
}

#[test]
fn optimality_against_random_perturbations() {
    let thetas: Vec<f64> = (1..=6).map(|k| 1.0 / k as f64).collect();
    let sys = assemble_deterministic(&thetas, 1e-6).unwrap();
    let rep = solve(&sys, DEFAULT_REL_CUTOFF).unwrap();
    let mut rng = TestRng::new(0x0BB1);
    for _ in 0..100 {
        let perturbed: Vec<f64> = rep
            .coeffs
            .iter()
            .map(|c| c + rng.range(-0.5, 0.5))
            .collect();
        let r = residual_with_coeffs(&sys, &perturbed).unwrap();
        assert!(
            r >= rep.distance_sq - rep.certified_slack - 1e-12,
            "perturbed residual {r} beat the optimum {}",
            rep.distance_sq
        );
    }
}

#[test]
fn psd_repair_drops_negative_modes() {
    use nalgebra::DVector;
    use nblab_core::gram::GramSystem;
    // Hand-built symmetric matrix with one negative eigenvalue.
    let g = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]); // eigenvalues 3, -1
    let sys = GramSystem::new(
        g,
        DVector::from_column_slice(&[0.5, 0.25]),
        1.0,
        DMatrix::zeros(2, 2),
        DVector::zeros(2),
        vec!["a".into(), "b".into()],
    )
    .unwrap();
    let rep = solve(&sys, 1e-12).unwrap();
    assert_eq!(rep.dropped_modes, 1);
    assert!(rep.condition_estimate.is_finite());
    // retained spectrum nonnegative means a bounded distance
    assert!(rep.distance_sq >= 0.0 && rep.distance_sq <= 1.0 + rep.certified_slack);
}

#[test]
fn solve_reports_clamping_on_negative_roundoff() {
    use nalgebra::DVector;
    use nblab_core::gram::GramSystem;
    // Target norm marginally below b^T G^-1 b: identity Gram, b = e_1,
    // target_norm_sq slightly less than 1 forces a negative raw distance.
    let sys = GramSystem::new(
        DMatrix::identity(1, 1),
        DVector::from_column_slice(&[1.0]),
        1.0 - 1e-13,
        DMatrix::zeros(1, 1),
        DVector::zeros(1),
        vec!["e".into()],
    )
    .unwrap();
    let rep = solve(&sys, 0.0).unwrap();
    assert!(rep.clamped);
    assert_eq!(rep.distance_sq, 0.0);
}
