use reachkit_bench::{chain, directions, mixed};

#[test]
fn fixtures_drive_the_library() {
    let spec = mixed();
    for y in directions(spec.d(), 8) {
        let h = reachkit::support_box(&spec, &y).unwrap().value;
        let neg: Vec<f64> = y.iter().map(|v| -v).collect();
        assert!(h + reachkit::support_box(&spec, &neg).unwrap().value >= 0.0);
    }
    assert!((reachkit::volume(&chain(2, 1.0)) - 2.0 / 3.0).abs() < 1e-15);
}

#[test]
fn directions_are_deterministic() {
    assert_eq!(directions(4, 16), directions(4, 16));
}
