//! Support functions of integrator reach sets.
//!
//! For a box input the support splits into per-block terms
//! `<y_j, Phi_j x0_j> + nu_j <y_j, zeta_j> + mu_j int_0^t |<y_j, xi_j(s)>| ds`.
//! The integrand is the absolute value of a polynomial of degree `r_j - 1`, so
//! the integral is evaluated exactly from the antiderivative after splitting at
//! its sign changes.

use crate::error::{ReachError, Result};
use crate::linalg::dot;
use crate::numeric::{adaptive_simpson_split, inv_factorial, KahanSum};
use crate::poly::{real_roots_in_interval, UniPoly};
use crate::system::{phi_block_apply, xi_block, zeta_block, InputBox, ReachSpec};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

const QUAD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportResult {
    pub value: f64,
    /// A reach-set point on the supporting hyperplane.
    pub argmax_state: Option<Vec<f64>>,
}

/// Admissible input sets.
#[derive(Debug, Clone, PartialEq)]
pub enum InputSet {
    Box(InputBox),
    PointCloud(Vec<Vec<f64>>),
    /// Unit ball of the `p`-norm, `p` in `(0, inf]`.
    PNormBall { p: f64 },
}

/// `<y_j, xi_j(s)>` as a polynomial in `s`.
pub fn block_poly(y: &[f64]) -> UniPoly<f64> {
    let r = y.len();
    UniPoly::<f64>::new((0..r).map(|p| y[r - 1 - p] * inv_factorial(p)).collect())
}

/// Breakpoints in `[0, t]` where `poly` changes sign.
pub fn sign_changes(poly: &UniPoly<f64>, t: f64) -> Vec<f64> {
    real_roots_in_interval(poly, 0.0, t, 0.0)
        .expect("finite coefficients")
        .into_iter()
        .filter(|r| !r.even && r.value > 0.0 && r.value < t)
        .map(|r| r.value)
        .collect()
}

/// Pieces of `[0, t]` on which `poly` has constant sign, with that sign.
pub fn signed_pieces(poly: &UniPoly<f64>, t: f64) -> Vec<(f64, f64, f64)> {
    if poly.is_zero() {
        return vec![(0.0, t, 0.0)];
    }
    let mut nodes = vec![0.0];
    nodes.extend(sign_changes(poly, t));
    nodes.push(t);
    nodes
        .windows(2)
        .map(|w| {
            let v = poly.eval(0.5 * (w[0] + w[1]));
            (w[0], w[1], if v > 0.0 { 1.0 } else if v < 0.0 { -1.0 } else { 0.0 })
        })
        .collect()
}

/// `int_0^t |<y_j, xi_j(s)>| ds`, exactly up to rounding.
pub fn block_abs_integral(y: &[f64], t: f64) -> f64 {
    let p = block_poly(y);
    if p.is_zero() {
        return 0.0;
    }
    let anti = p.antiderivative();
    signed_pieces(&p, t)
        .into_iter()
        .map(|(a, b, _)| (anti.eval(b) - anti.eval(a)).abs())
        .collect::<KahanSum>()
        .value()
}

fn check_direction(spec: &ReachSpec, y: &[f64]) -> Result<()> {
    if y.len() != spec.d() {
        return Err(ReachError::Shape(format!("direction has {} entries, expected {}", y.len(), spec.d())));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(ReachError::Numeric("non-finite direction".into()));
    }
    Ok(())
}

/// Support of the single-block reach set with its supporting point.
fn block_support(r: usize, mu: f64, nu: f64, x0: &[f64], t: f64, y: &[f64]) -> (f64, Vec<f64>) {
    let free = phi_block_apply(r, t, x0);
    let mut point: Vec<f64> = free.clone();
    let z = zeta_block(r, 0.0, t);
    for (p, zk) in point.iter_mut().zip(&z) {
        *p += nu * zk;
    }
    let poly = block_poly(y);
    let mut integral = KahanSum::new();
    if !poly.is_zero() && mu != 0.0 {
        let anti = poly.antiderivative();
        for (a, b, sgn) in signed_pieces(&poly, t) {
            integral.add((anti.eval(b) - anti.eval(a)).abs());
            if sgn != 0.0 {
                for (p, zk) in point.iter_mut().zip(zeta_block(r, a, b)) {
                    *p += mu * sgn * zk;
                }
            }
        }
    }
    let value = dot(y, &free) + nu * dot(y, &z) + mu * integral.value();
    (value, point)
}

/// Support function of the box-input reach set in direction `y`.
pub fn support_box(spec: &ReachSpec, y: &[f64]) -> Result<SupportResult> {
    check_direction(spec, y)?;
    let mut value = KahanSum::new();
    let mut point = vec![0.0; spec.d()];
    for (j, &r) in spec.r().iter().enumerate() {
        let rng = spec.block(j);
        let (v, p) = block_support(
            r,
            spec.input.mu_j(j),
            spec.input.nu_j(j),
            &spec.x0[rng.clone()],
            spec.t,
            &y[rng.clone()],
        );
        value.add(v);
        point[rng].copy_from_slice(&p);
    }
    Ok(SupportResult {
        value: value.value(),
        argmax_state: Some(point),
    })
}

/// Support values only, for many directions in parallel.
pub fn support_box_batch(spec: &ReachSpec, ys: &[Vec<f64>]) -> Result<Vec<SupportResult>> {
    ys.par_iter().map(|y| support_box(spec, y)).collect()
}

/// `h(y)` without the supporting point.
pub fn support_value(spec: &ReachSpec, y: &[f64]) -> f64 {
    let mut acc = KahanSum::new();
    for (j, _) in spec.r().iter().enumerate() {
        let rng = spec.block(j);
        let yj = &y[rng.clone()];
        let r = yj.len();
        let free = phi_block_apply(r, spec.t, &spec.x0[rng]);
        acc.add(dot(yj, &free));
        acc.add(spec.input.nu_j(j) * dot(yj, &zeta_block(r, 0.0, spec.t)));
        acc.add(spec.input.mu_j(j) * block_abs_integral(yj, spec.t));
    }
    acc.value()
}

/// Hölder conjugate of `max(1, p)`.
pub fn holder_conjugate(p: f64) -> f64 {
    let p = p.max(1.0);
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

pub(crate) fn q_norm(w: &[f64], q: f64) -> f64 {
    if q.is_infinite() {
        w.iter().fold(0.0, |a, v| a.max(v.abs()))
    } else if q == 1.0 {
        w.iter().map(|v| v.abs()).sum()
    } else if q == 2.0 {
        w.iter().map(|v| v * v).sum::<f64>().sqrt()
    } else {
        let m = w.iter().fold(0.0, |a: f64, v| a.max(v.abs()));
        if m == 0.0 {
            return 0.0;
        }
        m * w.iter().map(|v| (v.abs() / m).powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

/// Values `w_j(s) = <y_j, xi_j(s)>` for every block.
pub(crate) fn channel_values(polys: &[UniPoly<f64>], s: f64) -> Vec<f64> {
    polys.iter().map(|p| p.eval(s)).collect()
}

pub(crate) fn channel_polys(spec: &ReachSpec, y: &[f64]) -> Vec<UniPoly<f64>> {
    (0..spec.m()).map(|j| block_poly(&y[spec.block(j)])).collect()
}

/// Kinks of `s -> max_k |w_k(s)|`-type integrands: sign changes of every
/// `w_j` and of every `w_a -+ w_b`.
pub(crate) fn channel_kinks(polys: &[UniPoly<f64>], t: f64, pairwise: bool) -> Vec<f64> {
    let mut out: Vec<f64> = polys.iter().flat_map(|p| sign_changes(p, t)).collect();
    if pairwise {
        for a in 0..polys.len() {
            for b in a + 1..polys.len() {
                for sgn in [1.0, -1.0] {
                    out.extend(sign_changes(&poly_combine(&polys[a], &polys[b], sgn), t));
                }
            }
        }
    }
    out
}

fn poly_combine(a: &UniPoly<f64>, b: &UniPoly<f64>, sgn: f64) -> UniPoly<f64> {
    let n = a.coeffs().len().max(b.coeffs().len());
    UniPoly::<f64>::new(
        (0..n)
            .map(|i| a.coeffs().get(i).unwrap_or(&0.0) + sgn * b.coeffs().get(i).unwrap_or(&0.0))
            .collect(),
    )
}

/// Support for point-cloud and p-norm-ball inputs (and boxes, delegated).
pub fn support_general(spec: &ReachSpec, set: &InputSet, y: &[f64]) -> Result<SupportResult> {
    check_direction(spec, y)?;
    let t = spec.t;
    let free = spec.free_response();
    match set {
        InputSet::Box(b) => {
            if b.m() != spec.m() {
                return Err(ReachError::Shape(format!("box has {} channels, expected {}", b.m(), spec.m())));
            }
            let s = ReachSpec::new(spec.r(), b.alpha().to_vec(), b.beta().to_vec(), spec.x0.clone(), t)?;
            support_box(&s, y)
        }
        InputSet::PointCloud(points) => {
            if points.is_empty() {
                return Err(ReachError::InvalidInput("empty point cloud".into()));
            }
            if let Some(p) = points.iter().find(|p| p.len() != spec.m()) {
                return Err(ReachError::Shape(format!("input point has {} entries, expected {}", p.len(), spec.m())));
            }
            let polys = channel_polys(spec, y);
            let best = |s: f64| {
                let w = channel_values(&polys, s);
                points
                    .iter()
                    .map(|u| dot(&w, u))
                    .fold(f64::NEG_INFINITY, f64::max)
            };
            let mut kinks = channel_kinks(&polys, t, false);
            if points.len() <= 64 {
                for a in 0..points.len() {
                    for b in a + 1..points.len() {
                        let diff: Vec<f64> = points[a].iter().zip(&points[b]).map(|(p, q)| p - q).collect();
                        let mut c = UniPoly::<f64>::new(vec![]);
                        for (j, p) in polys.iter().enumerate() {
                            c = poly_combine(&c, &scaled(p, diff[j]), 1.0);
                        }
                        kinks.extend(sign_changes(&c, t));
                    }
                }
            }
            let integral = adaptive_simpson_split(&best, 0.0, t, &kinks, QUAD_TOL);
            let mut point = free.clone();
            let nodes = crate::numeric::split_nodes(0.0, t, &kinks);
            for w in nodes.windows(2) {
                let wm = channel_values(&polys, 0.5 * (w[0] + w[1]));
                let u = points
                    .iter()
                    .max_by(|a, b| dot(&wm, a).total_cmp(&dot(&wm, b)))
                    .unwrap();
                for j in 0..spec.m() {
                    let rng = spec.block(j);
                    for (p, z) in point[rng.clone()].iter_mut().zip(zeta_block(rng.len(), w[0], w[1])) {
                        *p += u[j] * z;
                    }
                }
            }
            Ok(SupportResult {
                value: dot(y, &free) + integral,
                argmax_state: Some(point),
            })
        }
        InputSet::PNormBall { p } => {
            if !(*p > 0.0) {
                return Err(ReachError::validation("p", format!("must be positive, got {p}")));
            }
            let q = holder_conjugate(*p);
            let polys = channel_polys(spec, y);
            let kinks = channel_kinks(&polys, t, q.is_infinite());
            let f = |s: f64| q_norm(&channel_values(&polys, s), q);
            let integral = adaptive_simpson_split(&f, 0.0, t, &kinks, QUAD_TOL);
            let mut point = free.clone();
            for j in 0..spec.m() {
                let rng = spec.block(j);
                for (k, idx) in rng.clone().enumerate() {
                    let g = |s: f64| {
                        let w = channel_values(&polys, s);
                        ball_maximizer(&w, *p, q)[j] * xi_block(rng.len(), s)[k]
                    };
                    point[idx] += adaptive_simpson_split(&g, 0.0, t, &kinks, QUAD_TOL);
                }
            }
            Ok(SupportResult {
                value: dot(y, &free) + integral,
                argmax_state: Some(point),
            })
        }
    }
}

fn scaled(p: &UniPoly<f64>, c: f64) -> UniPoly<f64> {
    UniPoly::<f64>::new(p.coeffs().iter().map(|v| v * c).collect())
}

/// `argmax_{||u||_p <= 1} <w, u>`.
fn ball_maximizer(w: &[f64], p: f64, q: f64) -> Vec<f64> {
    let mut u = vec![0.0; w.len()];
    if q.is_infinite() {
        if let Some((k, _)) = w.iter().enumerate().max_by(|a, b| a.1.abs().total_cmp(&b.1.abs())) {
            u[k] = w[k].signum() * (w[k] != 0.0) as u8 as f64;
        }
    } else if q == 1.0 || p.is_infinite() {
        for (ui, wi) in u.iter_mut().zip(w) {
            *ui = if *wi > 0.0 { 1.0 } else if *wi < 0.0 { -1.0 } else { 0.0 };
        }
    } else {
        let n = q_norm(w, q);
        if n > 0.0 {
            for (ui, wi) in u.iter_mut().zip(w) {
                *ui = wi.signum() * (wi.abs() / n).powf(q - 1.0);
            }
        }
    }
    u
}

/// Support of `Phi(t) conv(X0) + R(0, t)`.
pub fn support_sum_with_initial_set(spec: &ReachSpec, x0_points: &[Vec<f64>], y: &[f64]) -> Result<f64> {
    check_direction(spec, y)?;
    if x0_points.is_empty() {
        return Err(ReachError::InvalidInput("empty initial set".into()));
    }
    let origin = spec.with_x0(vec![0.0; spec.d()])?;
    let mut best = f64::NEG_INFINITY;
    for x0 in x0_points {
        if x0.len() != spec.d() {
            return Err(ReachError::Shape(format!("initial point has {} entries, expected {}", x0.len(), spec.d())));
        }
        let moved = spec.with_x0(x0.clone())?.free_response();
        best = best.max(dot(y, &moved));
    }
    Ok(best + support_value(&origin, y))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WidthResult {
    pub value: f64,
    /// Set when the supplied direction was not unit length and got normalized.
    pub normalized: bool,
}

/// Width `h(eta) + h(-eta)` in direction `eta`.
pub fn width(spec: &ReachSpec, eta: &[f64]) -> Result<WidthResult> {
    check_direction(spec, eta)?;
    let n = crate::linalg::norm2(eta);
    if n == 0.0 {
        return Err(ReachError::InvalidInput("zero direction".into()));
    }
    let normalized = (n - 1.0).abs() > 1e-12;
    let e: Vec<f64> = if normalized { eta.iter().map(|v| v / n).collect() } else { eta.to_vec() };
    let value = (0..spec.m())
        .map(|j| 2.0 * spec.input.mu_j(j) * block_abs_integral(&e[spec.block(j)], spec.t))
        .collect::<KahanSum>()
        .value();
    Ok(WidthResult { value, normalized })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(r: &[usize], t: f64) -> ReachSpec {
        ReachSpec::symmetric(r, &vec![1.0; r.len()], t).unwrap()
    }

    #[test]
    fn single_integrator() {
        let h = support_box(&sym(&[1], 2.0), &[1.0]).unwrap();
        assert_eq!(h.value, 2.0);
        assert_eq!(h.argmax_state.unwrap(), vec![2.0]);
    }

    #[test]
    fn double_integrator_values() {
        let s = sym(&[2], 1.0);
        assert!((support_box(&s, &[0.0, 1.0]).unwrap().value - 1.0).abs() < 1e-15);
        assert!((support_box(&s, &[1.0, 0.0]).unwrap().value - 0.5).abs() < 1e-15);
        assert!((support_box(&s, &[1.0, -1.0]).unwrap().value - 0.5).abs() < 1e-15);
        assert_eq!(support_box(&s, &[0.0, 0.0]).unwrap().value, 0.0);
    }

    #[test]
    fn argmax_lies_on_hyperplane() {
        let s = ReachSpec::new(&[3, 2], vec![-1.0, 0.5], vec![2.0, 1.5], vec![0.3, -1.0, 2.0, 0.1, 0.4], 1.7).unwrap();
        let y = [0.7, -1.3, 0.2, -0.4, 0.9];
        let h = support_box(&s, &y).unwrap();
        assert!((dot(&y, h.argmax_state.as_ref().unwrap()) - h.value).abs() < 1e-12);
        assert!((support_value(&s, &y) - h.value).abs() < 1e-13);
    }

    #[test]
    fn widths() {
        assert_eq!(width(&sym(&[1], 2.0), &[1.0]).unwrap().value, 4.0);
        assert!((width(&sym(&[2], 1.0), &[0.0, 1.0]).unwrap().value - 2.0).abs() < 1e-15);
        let t: f64 = 1.3;
        let z = [t.powi(3) / 6.0, t * t / 2.0, t];
        let n = crate::linalg::norm2(&z);
        let w = width(&sym(&[3], t), &z.map(|v| v / n)).unwrap();
        let want = t / 3.0 * (t.powi(4) + 9.0 * t * t + 36.0).sqrt();
        assert!((w.value - want).abs() < 1e-13);
        assert!(width(&sym(&[2], 1.0), &[0.0, 3.0]).unwrap().normalized);
    }

    #[test]
    fn point_cloud_matches_box() {
        let s = sym(&[2, 1], 1.4);
        let cloud = vec![vec![-1.0, -1.0], vec![-1.0, 1.0], vec![1.0, -1.0], vec![1.0, 1.0]];
        let y = [0.3, -0.8, 0.5];
        let a = support_general(&s, &InputSet::PointCloud(cloud), &y).unwrap();
        let b = support_box(&s, &y).unwrap();
        assert!((a.value - b.value).abs() < 1e-9);
        assert!((dot(&y, a.argmax_state.as_ref().unwrap()) - a.value).abs() < 1e-9);
        assert!(support_general(&s, &InputSet::PointCloud(vec![]), &y).is_err());
    }

    #[test]
    fn p_ball_limits() {
        let s = sym(&[2, 2], 1.0);
        let y = [0.3, -0.8, 0.5, 0.2];
        let inf = support_general(&s, &InputSet::PNormBall { p: f64::INFINITY }, &y).unwrap();
        assert!((inf.value - support_box(&s, &y).unwrap().value).abs() < 1e-9);
        let two = support_general(&s, &InputSet::PNormBall { p: 2.0 }, &y).unwrap();
        assert!(two.value <= inf.value + 1e-9);
        assert!((dot(&y, two.argmax_state.as_ref().unwrap()) - two.value).abs() < 1e-8);
        let s1 = sym(&[3], 1.0);
        let y1 = [1.0, -2.0, 0.5];
        let half = support_general(&s1, &InputSet::PNormBall { p: 0.5 }, &y1).unwrap();
        assert!((half.value - support_box(&s1, &y1).unwrap().value).abs() < 1e-9);
    }

    #[test]
    fn initial_set_sum() {
        let s = sym(&[1], 0.001);
        let v = support_sum_with_initial_set(&s, &[vec![0.0], vec![1.0]], &[1.0]).unwrap();
        assert!((v - 1.001).abs() < 1e-15);
        assert!(support_sum_with_initial_set(&s, &[], &[1.0]).is_err());
    }
}
