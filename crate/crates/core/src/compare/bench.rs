//! Benchmark harness, Monte Carlo volume oracle and scoring of externally
//! computed ellipsoidal approximants.

use super::zonotope::{zonotope_approximant, zonotope_diameter, zonotope_volume, ApproxMode};
use crate::boundary::MembershipOracle;
use crate::error::{ReachError, Result};
use crate::linalg::{dot, Matrix};
use crate::rng;
use crate::size::{diameter, volume};
use crate::support::support_value;
use crate::system::ReachSpec;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

const MC_CHUNK: usize = 1 << 14;
pub const MC_MAX_DIM: usize = 6;
const MC_MIN_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarlo {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: usize,
    pub hits: usize,
}

/// Rejection-sampling volume estimate inside the tight bounding box.
///
/// Samples are split into fixed chunks with their own streams, so the result
/// depends only on `seed`, never on the thread count.
pub fn monte_carlo_volume(spec: &ReachSpec, samples: usize, seed: u64) -> Result<MonteCarlo> {
    let d = spec.d();
    if d > MC_MAX_DIM {
        return Err(ReachError::Capability(format!("Monte Carlo volume supports d <= {MC_MAX_DIM}, got {d}")));
    }
    if samples < MC_MIN_SAMPLES {
        return Err(ReachError::validation("samples", format!("need at least {MC_MIN_SAMPLES}, got {samples}")));
    }
    let oracle = MembershipOracle::new(spec)?;
    let (lo, hi): (Vec<f64>, Vec<f64>) = (0..d)
        .map(|k| {
            let mut e = vec![0.0; d];
            e[k] = 1.0;
            let up = support_value(spec, &e);
            e[k] = -1.0;
            (-support_value(spec, &e), up)
        })
        .unzip();
    let box_vol: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    let chunks = samples.div_ceil(MC_CHUNK);
    let hits: usize = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut r = rng::stream(seed, c as u64);
            let count = MC_CHUNK.min(samples - c * MC_CHUNK);
            let mut x = vec![0.0; d];
            let mut h = 0;
            for _ in 0..count {
                for k in 0..d {
                    x[k] = rng::uniform(&mut r, lo[k], hi[k]);
                }
                if oracle.is_member(&x, 0.0) {
                    h += 1;
                }
            }
            h
        })
        .sum();
    let frac = hits as f64 / samples as f64;
    Ok(MonteCarlo {
        estimate: box_vol * frac,
        std_error: box_vol * (frac * (1.0 - frac) / samples as f64).sqrt(),
        samples,
        hits,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRow {
    pub t: f64,
    pub n_or_order: usize,
    pub vol_exact: f64,
    pub vol_approx: f64,
    pub ratio: f64,
    pub diam_exact: f64,
    pub diam_approx: f64,
}

impl BenchmarkRow {
    pub const COLUMNS: [&'static str; 7] = ["t", "n_or_order", "vol_exact", "vol_approx", "ratio", "diam_exact", "diam_approx"];
}

/// Exact size measures against zonotope approximants on a `(t, n)` grid.
pub fn benchmark(spec: &ReachSpec, t_grid: &[f64], n_grid: &[usize], mode: ApproxMode) -> Result<Vec<BenchmarkRow>> {
    if t_grid.is_empty() {
        return Err(ReachError::validation("t", "grid is empty"));
    }
    if n_grid.is_empty() {
        return Err(ReachError::validation("n", "grid is empty"));
    }
    let cells: Vec<(f64, usize)> = t_grid.iter().flat_map(|&t| n_grid.iter().map(move |&n| (t, n))).collect();
    cells
        .iter()
        .map(|&(t, n)| {
            let s = spec.with_t(t)?;
            let z = zonotope_approximant(&s, n, mode)?;
            let vol_exact = volume(&s);
            let vol_approx = zonotope_volume(&z).value;
            let dia = diameter(&s);
            Ok(BenchmarkRow {
                t,
                n_or_order: n,
                vol_exact,
                vol_approx,
                ratio: vol_exact / vol_approx,
                diam_exact: dia.value,
                diam_approx: zonotope_diameter(&z, dia.direction.as_deref()),
            })
        })
        .collect()
}

/// `{x : (x - c)^T Q^{-1} (x - c) <= 1}` with `Q` symmetric positive definite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ellipsoid {
    pub center: Vec<f64>,
    pub shape: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipsoidScore {
    pub volume: f64,
    pub ratio: f64,
    /// Fraction of sampled directions with `h_R(y) <= h_E(y)`.
    pub contained_fraction: f64,
    /// `max_y h_R(y) - h_E(y)` over the sampled directions.
    pub max_violation: f64,
    pub directions: usize,
}

/// Volume of the unit ball in `R^d`.
fn unit_ball_volume(d: usize) -> f64 {
    let (mut even, mut odd) = (1.0, 2.0);
    let mut k = 0;
    while k + 2 <= d {
        k += 2;
        even *= 2.0 * std::f64::consts::PI / k as f64;
        odd *= 2.0 * std::f64::consts::PI / (k + 1) as f64;
    }
    if d % 2 == 0 {
        even
    } else {
        odd
    }
}

/// `ln det Q` by Cholesky, failing unless `Q` is symmetric positive definite.
fn ln_det_spd(q: &[Vec<f64>]) -> Result<f64> {
    let d = q.len();
    let mut l = vec![vec![0.0; d]; d];
    let mut ln_det = 0.0;
    for i in 0..d {
        for j in 0..=i {
            if (q[i][j] - q[j][i]).abs() > 1e-12 * (q[i][j].abs() + q[j][i].abs()).max(1.0) {
                return Err(ReachError::validation("shape", "matrix is not symmetric"));
            }
            let s = q[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            if i == j {
                if s <= 0.0 {
                    return Err(ReachError::validation("shape", "matrix is not positive definite"));
                }
                l[i][i] = s.sqrt();
                ln_det += 2.0 * l[i][i].ln();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Ok(ln_det)
}

/// Scores an externally computed ellipsoid: analytic volume, volume ratio
/// and support-function containment on `directions` seeded directions.
pub fn external_approximant(spec: &ReachSpec, e: &Ellipsoid, directions: usize, seed: u64) -> Result<EllipsoidScore> {
    let d = spec.d();
    if e.center.len() != d {
        return Err(ReachError::validation("center", format!("expected {d} entries, got {}", e.center.len())));
    }
    if e.shape.len() != d || e.shape.iter().any(|row| row.len() != d) {
        return Err(ReachError::validation("shape", format!("expected a {d}x{d} matrix")));
    }
    if directions == 0 {
        return Err(ReachError::validation("directions", "need at least one"));
    }
    let vol = unit_ball_volume(d) * (0.5 * ln_det_spd(&e.shape)?).exp();
    let q = Matrix::from_rows(&e.shape);
    let mut r = rng::seeded(seed);
    let dirs: Vec<Vec<f64>> = (0..directions).map(|_| rng::unit_vector(&mut r, d)).collect();
    let gaps: Vec<f64> = dirs
        .par_iter()
        .map(|y| support_value(spec, y) - dot(y, &e.center) - dot(y, &q.mul_vec(y)).sqrt())
        .collect();
    Ok(EllipsoidScore {
        volume: vol,
        ratio: volume(spec) / vol,
        contained_fraction: gaps.iter().filter(|g| **g <= 1e-12).count() as f64 / directions as f64,
        max_violation: gaps.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        directions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_volumes() {
        assert_eq!(unit_ball_volume(0), 1.0);
        assert_eq!(unit_ball_volume(1), 2.0);
        assert!((unit_ball_volume(2) - std::f64::consts::PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 / 3.0 * std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let s = ReachSpec::symmetric(&[2], &[1.0], 1.0).unwrap();
        let a = monte_carlo_volume(&s, 20_000, 5).unwrap();
        assert_eq!(a, monte_carlo_volume(&s, 20_000, 5).unwrap());
        assert!((a.estimate - 2.0 / 3.0).abs() < 4.0 * a.std_error);
        assert!(monte_carlo_volume(&s, 10, 5).is_err());
    }

    #[test]
    fn interval_monte_carlo() {
        let s = ReachSpec::symmetric(&[1], &[0.5], 2.0).unwrap();
        let a = monte_carlo_volume(&s, 10_000, 1).unwrap();
        assert_eq!(a.estimate, 2.0);
    }

    #[test]
    fn enclosing_ball_scores() {
        let s = ReachSpec::symmetric(&[2], &[1.0], 1.0).unwrap();
        let e = Ellipsoid { center: vec![0.0, 0.0], shape: vec![vec![4.0, 0.0], vec![0.0, 4.0]] };
        let sc = external_approximant(&s, &e, 500, 2).unwrap();
        assert_eq!(sc.contained_fraction, 1.0);
        assert!((sc.volume - 4.0 * std::f64::consts::PI).abs() < 1e-12);
        assert!(sc.ratio < 1.0);
        let bad = Ellipsoid { center: vec![0.0, 0.0], shape: vec![vec![1.0, 2.0], vec![2.0, 1.0]] };
        assert!(external_approximant(&s, &bad, 10, 2).is_err());
    }

    #[test]
    fn benchmark_ratio_improves_with_n() {
        let s = ReachSpec::symmetric(&[2], &[1.0], 1.0).unwrap();
        let rows = benchmark(&s, &[0.5, 1.0], &[8, 32, 128], ApproxMode::OuterPad).unwrap();
        assert_eq!(rows.len(), 6);
        for col in rows.chunks(3) {
            assert!(col.iter().all(|r| r.ratio <= 1.0 + 1e-9));
            assert!(col[0].ratio < col[1].ratio && col[1].ratio < col[2].ratio);
        }
    }
}
