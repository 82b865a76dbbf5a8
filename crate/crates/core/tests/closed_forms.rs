use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use freemult::circle::{haar_floor, CircleEngine};
use freemult::closed_forms::*;
use freemult::halfline::HalfLineEngine;
use freemult::{CircleMeasure, HalfLineMeasure, SolverConfig};

#[test]
fn lambda_support_examples() {
    assert!(lambda_support(4.5).unwrap().full_circle);
    assert!(lambda_support(4.0).unwrap().full_circle);
    assert_abs_diff_eq!(
        lambda_support(1.0).unwrap().endpoint.unwrap(),
        1.913_223,
        epsilon = 1e-6
    );
    assert!(lambda_support(-1.0).is_err());
}

#[test]
fn lambda_v_examples() {
    assert_abs_diff_eq!(lambda_v(1.0, 0.0).unwrap(), 0.3522, epsilon = 1e-4);
    assert_eq!(lambda_v(1.0, PI / 2.0).unwrap(), 1.0);
    for &t in &[0.5, 2.0, 3.5] {
        for &th in &[0.05, 0.4, 1.1] {
            assert_eq!(lambda_v(t, th).unwrap(), lambda_v(t, -th).unwrap());
        }
    }
}

#[test]
fn lambda_density_examples() {
    let p = lambda_density(1.0, 0.0).unwrap();
    assert_eq!(p.phi, 0.0);
    assert_abs_diff_eq!(p.density, 0.33218, epsilon = 1e-4);
    for &t in &[0.5, 1.0, 3.0] {
        let top = lambda_density(t, 0.0).unwrap().density;
        assert_abs_diff_eq!(
            top,
            -haar_floor(t).unwrap().ln() / (PI * t),
            epsilon = 1e-12
        );
        for k in 1..20 {
            assert!(lambda_density_at(t, 0.15 * k as f64).unwrap().density <= top);
        }
    }
    let edge = lambda_density(1.0, PI / 3.0 + 1e-12).unwrap();
    assert_eq!(edge.density, 0.0);
    assert_abs_diff_eq!(edge.phi, -(PI / 3.0 + 0.75f64.sqrt()), epsilon = 1e-9);
}

#[test]
fn sigma_support_examples() {
    let s = sigma_support(1.0).unwrap();
    assert_abs_diff_eq!(s.x1, 0.381_966, epsilon = 1e-6);
    assert_abs_diff_eq!(s.x2, 2.618_034, epsilon = 1e-6);
    assert_abs_diff_eq!(s.x3, 0.124_873, epsilon = 1e-6);
    assert_abs_diff_eq!(s.x4, 8.008_133, epsilon = 1e-6);
    for &t in &[0.1, 1.0, 7.0] {
        let s = sigma_support(t).unwrap();
        assert_abs_diff_eq!(s.x1 * s.x2, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.x3 * s.x4, 1.0, epsilon = 1e-14);
    }
}

#[test]
fn sigma_density_examples() {
    let p = sigma_density(1.0, 1.0).unwrap();
    assert_abs_diff_eq!(p.density, 0.305_638, epsilon = 1e-6);
    let s = sigma_support(1.0).unwrap();
    assert_eq!(sigma_density(1.0, s.x4 * 1.000_001).unwrap().density, 0.0);
    for k in 1..50 {
        let x = s.x3 * (s.x4 / s.x3).powf(k as f64 / 50.0);
        let p = sigma_density(1.0, x).unwrap();
        assert!(sigma_residual(1.0, &p) < 1e-8);
        let q = sigma_density(1.0, 1.0 / x).unwrap();
        assert_abs_diff_eq!(x * p.density, q.density / x, epsilon = 1e-10);
    }
}

#[test]
fn k_characterization() {
    for &t in &[0.5, 2.0, 4.0, 6.0] {
        for k in -10..=10 {
            let th = 0.3 * k as f64;
            let (res, p) = lambda_k_residual(t, th).unwrap();
            assert!(res < 1e-9, "t = {t}, θ = {th}: residual {res}");
            assert_abs_diff_eq!(p, lambda_density(t, th).unwrap().density, epsilon = 1e-10);
        }
    }
}

#[test]
fn engines_match_closed_forms() {
    let cfg = SolverConfig::default();
    let d = CircleMeasure::dirac(0.0);
    for &t in &[0.7, 2.0, 5.0] {
        let e = CircleEngine::new(&d, t, cfg).unwrap();
        for s in e.density_profile(256).unwrap().samples.iter().step_by(7) {
            let want = lambda_density(t, s.theta).unwrap();
            assert_abs_diff_eq!(s.density, want.density, epsilon = 1e-8);
            assert_abs_diff_eq!((s.phi - want.phi).sin(), 0.0, epsilon = 1e-8);
        }
    }
    let h = HalfLineMeasure::dirac(1.0);
    for &t in &[0.3, 1.0, 3.0] {
        let e = HalfLineEngine::new(&h, t, cfg).unwrap();
        for s in e.density_profile(256).unwrap().samples.iter().step_by(7) {
            let want = sigma_density(t, s.x).unwrap();
            assert_abs_diff_eq!(s.density, want.density, epsilon = 1e-8);
        }
    }
}
