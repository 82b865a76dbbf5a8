use freemult_bench::*;

#[test]
fn workloads_run() {
    for (label, m) in circle_inputs() {
        let p = circle_profile(&m, 1.0, 256).unwrap();
        assert!((p.mass() - 1.0).abs() < 1e-6, "{label}");
    }
    for (label, m) in halfline_inputs() {
        let p = halfline_profile(&m, 1.0, 256).unwrap();
        assert!((p.mass() - 1.0).abs() < 1e-6, "{label}");
    }
    assert_eq!(series_moments(8).unwrap(), 8);
}
