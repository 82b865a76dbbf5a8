use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use freemult::closed_forms::sigma_support;
use freemult::halfline::HalfLineEngine;
use freemult::{HalfLineMeasure, SolverConfig};

const U1: f64 = 0.960_188_873_914_783;

fn cfg() -> SolverConfig {
    SolverConfig::default()
}

#[test]
fn f_value_examples() {
    let d = HalfLineMeasure::dirac(1.0);
    let t = 1.3;
    let e = HalfLineEngine::new(&d, t, cfg()).unwrap();
    for &th in &[0.2f64, 1.0, 2.5] {
        let want = 1.0 - t / (0.5 * th).tan() / (2.0 * th);
        assert_abs_diff_eq!(e.f_value(1.0, th).unwrap(), want, epsilon = 1e-12);
    }
    assert_abs_diff_eq!(e.f_value(0.7, PI - 1e-9).unwrap(), 1.0, epsilon = 1e-6);
    let e = HalfLineEngine::new(&d, 1.0, cfg()).unwrap();
    assert_abs_diff_eq!(e.f_value(1.0, U1).unwrap(), 0.0, epsilon = 1e-12);
    assert!(e.f_value(1.0, 0.0).is_err());
    assert!(e.f_value(-1.0, 1.0).is_err());
}

#[test]
fn f_edge_examples() {
    let d = HalfLineMeasure::dirac(1.0);
    let e = HalfLineEngine::new(&d, 1.0, cfg()).unwrap();
    assert_eq!(e.f_edge(1.0), f64::NEG_INFINITY);
    assert_abs_diff_eq!(e.f_edge(0.2), 0.6875, epsilon = 1e-14);
    assert_abs_diff_eq!(e.f_edge((3.0 - 5f64.sqrt()) / 2.0), 0.0, epsilon = 1e-10);
}

#[test]
fn boundary_angle_examples() {
    let d = HalfLineMeasure::dirac(1.0);
    let e = HalfLineEngine::new(&d, 1.0, cfg()).unwrap();
    assert_eq!(e.boundary_angle(0.1).unwrap(), 0.0);
    assert_abs_diff_eq!(e.boundary_angle(1.0).unwrap(), U1, epsilon = 1e-11);
    for &r in &[0.5, 0.8, 1.7] {
        assert_abs_diff_eq!(
            e.boundary_angle(r).unwrap(),
            e.boundary_angle(1.0 / r).unwrap(),
            epsilon = 1e-11
        );
    }
}

#[test]
fn v_set_examples() {
    let d = HalfLineMeasure::dirac(1.0);
    let v = HalfLineEngine::new(&d, 1.0, cfg())
        .unwrap()
        .v_set(256)
        .unwrap();
    assert_eq!(v.count(), 1);
    assert_abs_diff_eq!(v.intervals[0].lo, (3.0 - 5f64.sqrt()) / 2.0, epsilon = 1e-8);
    assert_abs_diff_eq!(v.intervals[0].hi, (3.0 + 5f64.sqrt()) / 2.0, epsilon = 1e-8);
    let narrow = HalfLineEngine::new(&d, 0.01, cfg())
        .unwrap()
        .v_set(256)
        .unwrap();
    assert_eq!(narrow.count(), 1);
    assert!(narrow.contains(1.0) && narrow.intervals[0].hi - narrow.intervals[0].lo < 0.25);
    let c = 2.5;
    let dc = HalfLineMeasure::dirac(c);
    let vc = HalfLineEngine::new(&dc, 1.0, cfg())
        .unwrap()
        .v_set(256)
        .unwrap();
    assert_abs_diff_eq!(vc.intervals[0].lo, v.intervals[0].lo / c, epsilon = 1e-9);
    assert_abs_diff_eq!(vc.intervals[0].hi, v.intervals[0].hi / c, epsilon = 1e-9);
}

#[test]
fn lambda_examples() {
    let d = HalfLineMeasure::dirac(1.0);
    for &t in &[0.5, 1.0, 2.0] {
        let e = HalfLineEngine::new(&d, t, cfg()).unwrap();
        assert_abs_diff_eq!(e.lambda_value(1.0).unwrap(), 1.0, epsilon = 1e-14);
        let s = sigma_support(t).unwrap();
        for &r in &[0.5 * s.x1, 2.0 * s.x2] {
            let want = r * (0.5 * t * (r + 1.0) / (r - 1.0)).exp();
            assert_abs_diff_eq!(e.lambda_value(r).unwrap(), want, epsilon = 1e-12 * want);
        }
    }
    let e = HalfLineEngine::new(&d, 1.0, cfg()).unwrap();
    let s = sigma_support(1.0).unwrap();
    assert_abs_diff_eq!(
        1.0 / e.lambda_value(s.x2).unwrap(),
        0.124873,
        epsilon = 1e-6
    );
}

#[test]
fn density_profile_examples() {
    let d = HalfLineMeasure::dirac(1.0);
    let e = HalfLineEngine::new(&d, 1.0, cfg()).unwrap();
    let at_one = e.locate(1.0).unwrap();
    assert_abs_diff_eq!(at_one.r, 1.0, epsilon = 1e-10);
    assert_abs_diff_eq!(at_one.density, U1 / PI, epsilon = 1e-10);
    for &t in &[0.5, 2.0] {
        let s = sigma_support(t).unwrap();
        let e = HalfLineEngine::new(&d, t, cfg()).unwrap();
        // square-root edges turn endpoint rounding into ~1e-6 density
        assert!(e.density_at(s.x3).unwrap() < 1e-5);
        assert!(e.density_at(s.x4).unwrap() < 1e-5);
        assert_eq!(e.density_at(s.x3 * (1.0 - 1e-9)).unwrap(), 0.0);
        assert_eq!(e.density_at(s.x4 * (1.0 + 1e-9)).unwrap(), 0.0);
    }
    let c = 3.0;
    let dc = HalfLineMeasure::dirac(c);
    let ec = HalfLineEngine::new(&dc, 1.0, cfg()).unwrap();
    for &x in &[0.5, 1.0, 4.0, 7.0] {
        assert_abs_diff_eq!(
            ec.density_at(c * x).unwrap(),
            e.density_at(x).unwrap() / c,
            epsilon = 1e-10
        );
    }
}

#[test]
fn support_examples() {
    let d = HalfLineMeasure::dirac(1.0);
    let s = HalfLineEngine::new(&d, 1.0, cfg())
        .unwrap()
        .support_components(256)
        .unwrap();
    assert_eq!(s.count(), 1);
    let i = s.intervals[0];
    assert_abs_diff_eq!(i.lo, 0.124873, epsilon = 1e-5);
    assert_abs_diff_eq!(i.hi, 8.008133, epsilon = 1e-5);
    assert_abs_diff_eq!(i.lo * i.hi, 1.0, epsilon = 1e-10);

    let m = HalfLineMeasure::from_atoms(&[(1.0, 0.5), (4.0, 0.5)]).unwrap();
    let ladder = [0.05, 0.2, 0.5, 1.0, 2.0, 4.0];
    let counts: Vec<usize> = ladder
        .iter()
        .map(|&t| {
            HalfLineEngine::new(&m, t, cfg())
                .unwrap()
                .support_components(256)
                .unwrap()
                .count()
        })
        .collect();
    assert_eq!(counts[0], 2);
    assert_eq!(*counts.last().unwrap(), 1);
    assert!(counts.windows(2).all(|w| w[1] <= w[0]), "{counts:?}");
}

#[test]
fn boundary_curve_examples() {
    let d = HalfLineMeasure::dirac(1.0);
    let e = HalfLineEngine::new(&d, 1.0, cfg()).unwrap();
    let c = e.boundary_curve(200).unwrap();
    assert_eq!(c.len(), 200);
    assert!(c.windows(2).all(|w| w[0].norm() < w[1].norm()));
    let mut inside = 0;
    for z in &c {
        let (r, u) = (z.norm(), z.arg());
        assert!((0.0..PI).contains(&u));
        if u > 0.0 {
            inside += 1;
            assert_abs_diff_eq!(e.f_value(r, u).unwrap(), 0.0, epsilon = 1e-9);
        }
    }
    assert!(inside > 10);
    assert!(e.boundary_curve(1).is_err());
}
