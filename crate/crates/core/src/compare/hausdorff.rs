//! Hausdorff distance between the box-input reach set and the reach set under
//! a unit p-norm ball of inputs.

use crate::error::{ReachError, Result};
use crate::linalg::{dot, norm2};
use crate::numeric::{adaptive_simpson_split, split_nodes, GAUSS_LEGENDRE_8};
use crate::rng;
use crate::support::{channel_kinks, channel_polys, channel_values, holder_conjugate, q_norm};
use crate::system::{xi_block, ReachSpec};
use crate::poly::UniPoly;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const HAUSDORFF_STARTS: usize = 2048;
pub const HAUSDORFF_ITERS: usize = 500;
const HAUSDORFF_SEED: u64 = 0x4A05_D0FF;
const POLISH_KEEP: usize = 8;
const FINAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HausdorffResult {
    pub p: f64,
    pub distance: f64,
    pub direction: Vec<f64>,
    pub starts: usize,
}

struct Objective<'a> {
    spec: &'a ReachSpec,
    q: f64,
}

impl Objective<'_> {
    fn integrand(&self, polys: &[UniPoly<f64>], s: f64) -> f64 {
        let w = channel_values(polys, s);
        w.iter().map(|v| v.abs()).sum::<f64>() - q_norm(&w, self.q)
    }

    fn kinks(&self, polys: &[UniPoly<f64>]) -> Vec<f64> {
        channel_kinks(polys, self.spec.t, self.q.is_infinite())
    }

    /// Value and a supergradient by panelled Gauss–Legendre quadrature.
    fn value_grad(&self, y: &[f64]) -> (f64, Vec<f64>) {
        let spec = self.spec;
        let polys = channel_polys(spec, y);
        let nodes = split_nodes(0.0, spec.t, &self.kinks(&polys));
        let mut val = 0.0;
        let mut grad = vec![0.0; y.len()];
        for win in nodes.windows(2) {
            let panels = 2;
            let h = (win[1] - win[0]) / panels as f64;
            for p in 0..panels {
                let mid = win[0] + (p as f64 + 0.5) * h;
                for &(x, wt) in &GAUSS_LEGENDRE_8 {
                    let s = mid + 0.5 * h * x;
                    let scale = 0.5 * h * wt;
                    let w = channel_values(&polys, s);
                    let qn = q_norm(&w, self.q);
                    val += scale * (w.iter().map(|v| v.abs()).sum::<f64>() - qn);
                    let dq = dual_weights(&w, qn, self.q);
                    for (j, &r) in spec.r().iter().enumerate() {
                        let c = scale * (w[j].signum() * (w[j] != 0.0) as u8 as f64 - dq[j]);
                        if c != 0.0 {
                            for (g, xv) in grad[spec.block(j)].iter_mut().zip(xi_block(r, s)) {
                                *g += c * xv;
                            }
                        }
                    }
                }
            }
        }
        (val, grad)
    }

    fn value_fine(&self, y: &[f64]) -> f64 {
        let polys = channel_polys(self.spec, y);
        let f = |s: f64| self.integrand(&polys, s);
        adaptive_simpson_split(&f, 0.0, self.spec.t, &self.kinks(&polys), FINAL_TOL)
    }
}

/// Gradient of `w -> |w|_q`.
fn dual_weights(w: &[f64], qn: f64, q: f64) -> Vec<f64> {
    let mut out = vec![0.0; w.len()];
    if qn == 0.0 {
        return out;
    }
    if q.is_infinite() {
        if let Some((k, _)) = w.iter().enumerate().max_by(|a, b| a.1.abs().total_cmp(&b.1.abs())) {
            out[k] = w[k].signum();
        }
    } else if q == 1.0 {
        for (o, v) in out.iter_mut().zip(w) {
            *o = v.signum() * (*v != 0.0) as u8 as f64;
        }
    } else {
        for (o, v) in out.iter_mut().zip(w) {
            *o = v.signum() * (v.abs() / qn).powf(q - 1.0);
        }
    }
    out
}

fn check_setting(spec: &ReachSpec, p: f64) -> Result<()> {
    if !(p > 0.0) {
        return Err(ReachError::validation("p", format!("must be positive, got {p}")));
    }
    if spec.input.alpha().iter().any(|&a| a != -1.0) {
        return Err(ReachError::validation("alpha", "Hausdorff comparison needs the input box [-1, 1]"));
    }
    if spec.input.beta().iter().any(|&b| b != 1.0) {
        return Err(ReachError::validation("beta", "Hausdorff comparison needs the input box [-1, 1]"));
    }
    Ok(())
}

fn normalize(y: &mut [f64]) {
    let n = norm2(y);
    if n > 0.0 {
        y.iter_mut().for_each(|v| *v /= n);
    }
}

fn ascend(obj: &Objective, y0: &[f64]) -> (f64, Vec<f64>) {
    let mut y = y0.to_vec();
    let mut best = (f64::NEG_INFINITY, y.clone());
    for k in 1..=HAUSDORFF_ITERS {
        let (v, g) = obj.value_grad(&y);
        if v > best.0 {
            best = (v, y.clone());
        }
        let gy = dot(&g, &y);
        let tangent: Vec<f64> = g.iter().zip(&y).map(|(a, b)| a - gy * b).collect();
        let nt = norm2(&tangent);
        if nt < 1e-14 {
            break;
        }
        let step = 1.0 / (k as f64).sqrt();
        for (yi, ti) in y.iter_mut().zip(&tangent) {
            *yi += step * ti / nt;
        }
        normalize(&mut y);
    }
    best
}

/// Adaptive-step local ascent on the sphere, accepting only improvements.
fn polish(obj: &Objective, y0: &[f64], v0: f64) -> (f64, Vec<f64>) {
    let (mut v, mut y) = (v0, y0.to_vec());
    let mut step = 1e-2;
    while step > 1e-13 {
        let (_, g) = obj.value_grad(&y);
        let gy = dot(&g, &y);
        let tangent: Vec<f64> = g.iter().zip(&y).map(|(a, b)| a - gy * b).collect();
        let nt = norm2(&tangent);
        if nt < 1e-15 {
            break;
        }
        let mut cand: Vec<f64> = y.iter().zip(&tangent).map(|(a, b)| a + step * b / nt).collect();
        normalize(&mut cand);
        let (cv, _) = obj.value_grad(&cand);
        if cv > v {
            v = cv;
            y = cand;
            step *= 1.5;
        } else {
            step *= 0.5;
        }
    }
    (v, y)
}

fn search(obj: &Objective, extra: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let d = obj.spec.d();
    let mut r = rng::seeded(HAUSDORFF_SEED);
    let mut starts: Vec<Vec<f64>> = extra.to_vec();
    while starts.len() < HAUSDORFF_STARTS + extra.len() {
        starts.push(rng::unit_vector(&mut r, d));
    }
    let mut found: Vec<(f64, Vec<f64>)> = starts.par_iter().map(|y| ascend(obj, y)).collect();
    found.sort_by(|a, b| b.0.total_cmp(&a.0));
    found.truncate(POLISH_KEEP);
    found
        .par_iter()
        .map(|(v, y)| {
            let (_, y) = polish(obj, y, *v);
            (obj.value_fine(&y), y)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .expect("at least one start")
}

fn trivially_zero(spec: &ReachSpec, q: f64) -> bool {
    spec.m() == 1 || q == 1.0
}

/// `max_{|y| <= 1} int_0^t (|w(s)|_1 - |w(s)|_q) ds`, `w_j = <y_j, xi_j>`,
/// maximized by multi-start projected supergradient ascent.
pub fn hausdorff_p(spec: &ReachSpec, p: f64) -> Result<HausdorffResult> {
    check_setting(spec, p)?;
    let q = holder_conjugate(p);
    let obj = Objective { spec, q };
    if trivially_zero(spec, q) {
        let mut e = vec![0.0; spec.d()];
        e[spec.d() - 1] = 1.0;
        return Ok(HausdorffResult { p, distance: 0.0, direction: e, starts: 0 });
    }
    let (distance, direction) = search(&obj, &[]);
    Ok(HausdorffResult { p, distance: distance.max(0.0), direction, starts: HAUSDORFF_STARTS })
}

/// Distances for several `p`, sharing maximizers between neighbours.
///
/// The objective decreases pointwise as `p` grows, so a maximizer for one `p`
/// is a valid start for every other; the results are nonincreasing in `p`.
pub fn hausdorff_sweep(spec: &ReachSpec, ps: &[f64]) -> Result<Vec<HausdorffResult>> {
    for &p in ps {
        check_setting(spec, p)?;
    }
    let mut out: Vec<HausdorffResult> = ps.iter().map(|&p| hausdorff_p(spec, p)).collect::<Result<_>>()?;
    let dirs: Vec<Vec<f64>> = out.iter().filter(|r| r.starts > 0).map(|r| r.direction.clone()).collect();
    for res in out.iter_mut().filter(|r| r.starts > 0) {
        let obj = Objective { spec, q: holder_conjugate(res.p) };
        for y in &dirs {
            let (v, _) = obj.value_grad(y);
            let (_, y2) = polish(&obj, y, v);
            let fine = obj.value_fine(&y2);
            if fine > res.distance {
                res.distance = fine;
                res.direction = y2;
            }
        }
    }
    Ok(out)
}
