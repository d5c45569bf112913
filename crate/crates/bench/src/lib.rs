//! Fixtures shared by the criterion benches.

use reachkit::ReachSpec;

/// Single chain of length `d`, unit symmetric input, horizon `t`.
pub fn chain(d: usize, t: f64) -> ReachSpec {
    ReachSpec::symmetric(&[d], &[1.0], t).expect("valid chain")
}

/// Multi-input spec with mixed chain lengths and an offset box.
pub fn mixed() -> ReachSpec {
    ReachSpec::new(&[3, 2, 1], vec![-1.0, -0.5, 0.0], vec![1.0, 2.0, 3.0], vec![0.1; 6], 1.5).expect("valid spec")
}

/// Deterministic unit directions in `R^d`.
pub fn directions(d: usize, count: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|k| {
            let v: Vec<f64> = (0..d).map(|i| ((k * 7 + i * 13) as f64 * 0.618_033_988_7).sin()).collect();
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.into_iter().map(|x| x / n).collect()
        })
        .collect()
}
