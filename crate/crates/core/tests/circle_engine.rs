use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use freemult::circle::{haar_floor, CircleEngine};
use freemult::{CircleMeasure, SolverConfig};
use num_complex::Complex64;

const A1: f64 = 0.352_175_060_660_117;

fn cfg() -> SolverConfig {
    SolverConfig::default()
}

fn antipodal() -> CircleMeasure {
    CircleMeasure::from_atoms(&[(0.0, 0.5), (PI, 0.5)]).unwrap()
}

#[test]
fn h_value_examples() {
    let haar = CircleMeasure::haar();
    let e = CircleEngine::new(&haar, 1.7, cfg()).unwrap();
    for &r in &[0.05, 0.4, 0.93] {
        assert_abs_diff_eq!(
            e.h_value(r, 0.3).unwrap(),
            1.0 - 0.85 / -f64::ln(r),
            epsilon = 1e-9
        );
    }
    let d = CircleMeasure::dirac(0.0);
    let e = CircleEngine::new(&d, 1.0, cfg()).unwrap();
    // the prefactor vanishes only like 1/(-ln r)
    let near_zero: Vec<f64> = [1e-10, 1e-100, 1e-300]
        .iter()
        .map(|&r| e.h_value(r, 0.0).unwrap())
        .collect();
    assert!(near_zero.windows(2).all(|w| w[0] < w[1] && w[1] < 1.0));
    assert!(1.0 - near_zero[2] < 1e-2);
    assert_abs_diff_eq!(e.h_value(0.3522, 0.0).unwrap(), 0.0, epsilon = 5e-4);
    assert!(e.h_value(1.0, 0.0).is_err());
}

#[test]
fn h_edge_examples() {
    let d = CircleMeasure::dirac(0.0);
    let e = CircleEngine::new(&d, 1.0, cfg()).unwrap();
    assert_abs_diff_eq!(e.h_edge(PI), 0.75, epsilon = 1e-15);
    assert_eq!(e.h_edge(0.0), f64::NEG_INFINITY);
    let m = antipodal();
    for &t in &[0.5, 1.0, 3.0] {
        let e = CircleEngine::new(&m, t, cfg()).unwrap();
        for &th in &[0.3, 1.0, 2.0, -2.5] {
            let s = f64::sin(th);
            assert_abs_diff_eq!(e.h_edge(th), 1.0 - t / (2.0 * s * s), epsilon = 1e-12);
        }
    }
}

#[test]
fn boundary_radius_examples() {
    let haar = CircleMeasure::haar();
    let e = CircleEngine::new(&haar, 2.0, cfg()).unwrap();
    assert_abs_diff_eq!(
        e.boundary_radius(0.4).unwrap(),
        (-1.0f64).exp(),
        epsilon = 1e-11
    );
    let d = CircleMeasure::dirac(0.0);
    let e = CircleEngine::new(&d, 1.0, cfg()).unwrap();
    assert_eq!(e.boundary_radius(PI).unwrap(), 1.0);
    assert_abs_diff_eq!(e.boundary_radius(0.0).unwrap(), A1, epsilon = 1e-11);
}

#[test]
fn u_set_examples() {
    let d = CircleMeasure::dirac(0.0);
    let u = CircleEngine::new(&d, 1.0, cfg())
        .unwrap()
        .u_set(256)
        .unwrap();
    assert_eq!(u.count(), 1);
    assert_abs_diff_eq!(u.arcs[0].lo, -PI / 3.0, epsilon = 1e-8);
    assert_abs_diff_eq!(u.arcs[0].hi, PI / 3.0, epsilon = 1e-8);
    assert!(CircleEngine::new(&d, 4.5, cfg())
        .unwrap()
        .u_set(256)
        .unwrap()
        .is_full());
    let u = CircleEngine::new(&antipodal(), 1.0, cfg())
        .unwrap()
        .u_set(256)
        .unwrap();
    assert_eq!(u.count(), 2);
    assert!(u.contains(0.0) && u.contains(PI - 0.1) && !u.contains(PI / 2.0));
    assert_abs_diff_eq!(
        u.arcs.iter().map(|a| a.len()).sum::<f64>(),
        PI,
        epsilon = 1e-8
    );
}

#[test]
fn psi_angle_examples() {
    let d = CircleMeasure::dirac(0.0);
    for &t in &[0.5, 1.0, 3.0] {
        let e = CircleEngine::new(&d, t, cfg()).unwrap();
        assert_abs_diff_eq!(e.psi_angle(0.0).unwrap(), 0.0, epsilon = 1e-15);
        let th0 = (1.0 - t / 2.0).acos();
        assert_abs_diff_eq!(e.psi_angle(th0).unwrap(), th0 + th0.sin(), epsilon = 1e-9);
    }
    let e = CircleEngine::new(&d, 1.0, cfg()).unwrap();
    assert_abs_diff_eq!(
        e.psi_angle(PI / 3.0).unwrap(),
        1.913_222_954_981_036,
        epsilon = 1e-9
    );
}

#[test]
fn density_profile_examples() {
    let haar = CircleMeasure::haar();
    let p = CircleEngine::new(&haar, 0.8, cfg())
        .unwrap()
        .density_profile(256)
        .unwrap();
    assert!(p
        .samples
        .iter()
        .all(|s| (s.density - 1.0 / (2.0 * PI)).abs() < 1e-10));
    let d = CircleMeasure::dirac(0.0);
    let e = CircleEngine::new(&d, 1.0, cfg()).unwrap();
    let top = e.locate(0.0).unwrap();
    assert_abs_diff_eq!(top.density, -A1.ln() / PI, epsilon = 1e-10);
    assert_abs_diff_eq!(top.density, 0.33218, epsilon = 1e-4);
    let full = CircleEngine::new(&d, 4.5, cfg())
        .unwrap()
        .density_profile(256)
        .unwrap();
    assert!(full.samples.iter().all(|s| s.density > 0.0));
}

#[test]
fn support_examples() {
    let d = CircleMeasure::dirac(0.0);
    let s = CircleEngine::new(&d, 1.0, cfg())
        .unwrap()
        .support_components(256)
        .unwrap();
    assert_eq!(s.count(), 1);
    assert_abs_diff_eq!(s.arcs[0].hi, 1.913_223, epsilon = 1e-6);
    assert_abs_diff_eq!(s.arcs[0].lo, -1.913_223, epsilon = 1e-6);
    let m = antipodal();
    assert_eq!(
        CircleEngine::new(&m, 1.0, cfg())
            .unwrap()
            .support_components(256)
            .unwrap()
            .count(),
        2
    );
    assert_eq!(
        CircleEngine::new(&m, 2.5, cfg())
            .unwrap()
            .support_components(256)
            .unwrap()
            .count(),
        1
    );
    let full = CircleEngine::new(&d, 4.5, cfg())
        .unwrap()
        .support_components(256)
        .unwrap();
    assert!(full.is_full() && full.count() == 1);
}

#[test]
fn haar_floor_examples() {
    assert_abs_diff_eq!(haar_floor(1.0).unwrap(), 0.3522, epsilon = 1e-4);
    assert!(haar_floor(0.01).unwrap() > 0.9);
    let d = CircleMeasure::dirac(0.0);
    for &t in &[0.3, 1.0, 2.5] {
        let v = CircleEngine::new(&d, t, cfg())
            .unwrap()
            .boundary_radius(0.0)
            .unwrap();
        assert_abs_diff_eq!(haar_floor(t).unwrap(), v, epsilon = 1e-11);
    }
}

#[test]
fn boundary_curve_examples() {
    let haar = CircleMeasure::haar();
    let c = CircleEngine::new(&haar, 1.0, cfg())
        .unwrap()
        .boundary_curve(128)
        .unwrap();
    assert!(c.iter().all(|z| (z.norm() - (-0.5f64).exp()).abs() < 1e-11));
    // |Φ(z)| = 1 on the boundary, Φ(z) = z·exp((t/2)(1 + z)/(1 - z)) for δ_1
    let d = CircleMeasure::dirac(0.0);
    let t = 1.0;
    let c = CircleEngine::new(&d, t, cfg())
        .unwrap()
        .boundary_curve(128)
        .unwrap();
    let one = Complex64::new(1.0, 0.0);
    for z in &c {
        if z.norm() < 1.0 {
            let phi = z * ((one + z) / (one - z) * (0.5 * t)).exp();
            assert_abs_diff_eq!(phi.norm(), 1.0, epsilon = 1e-8);
        }
    }
    assert!((c[0] - c[c.len() - 1]).norm() < 1e-12);
    let e = CircleEngine::new(&d, t, cfg()).unwrap();
    assert_abs_diff_eq!(e.boundary_radius(0.0).unwrap(), 0.3522, epsilon = 1e-4);
    assert_eq!(e.boundary_radius(PI).unwrap(), 1.0);
}
