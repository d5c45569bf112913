//! Membership tests, combined blockwise over the Cartesian product.

use super::implicit::ImplicitSurface;
use crate::error::{ReachError, Result};
use crate::linalg::{dot, norm2};
use crate::rng;
use crate::support::support_box;
use crate::system::ReachSpec;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::atomic::{AtomicBool, Ordering};

const CERTIFICATE_STARTS: usize = 512;
const CERTIFICATE_ITERS: usize = 200;
const CERTIFICATE_SEED: u64 = 0x00C0_FFEE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Membership {
    Inside,
    Boundary,
    Outside,
}

impl Membership {
    fn from_margin(margin: f64, tol: f64) -> Self {
        if margin > tol {
            Membership::Outside
        } else if margin < -tol {
            Membership::Inside
        } else {
            Membership::Boundary
        }
    }

    /// Conjunction over the factors of a Cartesian product.
    fn and(self, other: Self) -> Self {
        use Membership::*;
        match (self, other) {
            (Outside, _) | (_, Outside) => Outside,
            (Boundary, _) | (_, Boundary) => Boundary,
            _ => Inside,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Membership::Inside => "inside",
            Membership::Boundary => "boundary",
            Membership::Outside => "outside",
        }
    }
}

#[derive(Debug, Clone)]
enum BlockTest {
    /// Zero input width: the block collapses to its trajectory point.
    Point(Vec<f64>),
    Interval { lo: f64, hi: f64 },
    Implicit(Box<ImplicitSurface>),
    Certificate(ReachSpec),
}

/// Membership test prepared once per spec.
#[derive(Debug, Clone)]
pub struct MembershipOracle {
    spec: ReachSpec,
    blocks: Vec<BlockTest>,
}

impl MembershipOracle {
    pub fn new(spec: &ReachSpec) -> Result<Self> {
        let center = spec.center();
        let mut blocks = Vec::with_capacity(spec.m());
        for (j, &r) in spec.r().iter().enumerate() {
            let mu = spec.input.mu_j(j);
            let rng = spec.block(j);
            blocks.push(if mu == 0.0 {
                BlockTest::Point(center[rng].to_vec())
            } else if r == 1 {
                let c = center[rng.start];
                BlockTest::Interval {
                    lo: c - mu * spec.t,
                    hi: c + mu * spec.t,
                }
            } else if r <= 3 {
                BlockTest::Implicit(Box::new(ImplicitSurface::new(spec, j)?))
            } else {
                BlockTest::Certificate(spec.block_spec(j))
            });
        }
        Ok(Self {
            spec: spec.clone(),
            blocks,
        })
    }

    pub fn spec(&self) -> &ReachSpec {
        &self.spec
    }

    /// Classifies `x` with a `[-tol, tol]` boundary band on each block's
    /// margin (polynomial value for implicit blocks, signed distance otherwise).
    pub fn classify(&self, x: &[f64], tol: f64) -> Result<Membership> {
        if x.len() != self.spec.d() {
            return Err(ReachError::Shape(format!("point has {} entries, expected {}", x.len(), self.spec.d())));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(ReachError::Numeric("non-finite point".into()));
        }
        let mut out = Membership::Inside;
        for (j, test) in self.blocks.iter().enumerate() {
            let xj = &x[self.spec.block(j)];
            let m = match test {
                BlockTest::Point(c) => {
                    let dev = xj.iter().zip(c).fold(0.0f64, |a, (u, v)| a.max((u - v).abs()));
                    if dev <= tol {
                        Membership::Boundary
                    } else {
                        Membership::Outside
                    }
                }
                BlockTest::Interval { lo, hi } => Membership::from_margin((lo - xj[0]).max(xj[0] - hi), tol),
                BlockTest::Implicit(s) => {
                    let (up, lo) = s.eval(xj);
                    Membership::from_margin(up.max(lo), tol)
                }
                BlockTest::Certificate(bs) => Membership::from_margin(certificate_margin(bs, xj, tol), tol),
            };
            out = out.and(m);
            if out == Membership::Outside {
                break;
            }
        }
        Ok(out)
    }

    /// Fast boolean test used by sampling loops.
    pub fn is_member(&self, x: &[f64], tol: f64) -> bool {
        !matches!(self.classify(x, tol), Ok(Membership::Outside) | Err(_))
    }
}

/// Tests `x` against the reach set.
pub fn contains(spec: &ReachSpec, x: &[f64], tol: f64) -> Result<Membership> {
    MembershipOracle::new(spec)?.classify(x, tol)
}

/// `max_{|y| = 1} <y, x> - h(y)`: positive outside (the distance), negative
/// inside, found by multi-start projected supergradient ascent.
pub(crate) fn certificate_margin(spec: &ReachSpec, x: &[f64], tol: f64) -> f64 {
    let n = x.len();
    let c = spec.center();
    let mut starts: Vec<Vec<f64>> = Vec::with_capacity(CERTIFICATE_STARTS);
    let dx: Vec<f64> = x.iter().zip(&c).map(|(a, b)| a - b).collect();
    let nd = norm2(&dx);
    if nd > 0.0 {
        starts.push(dx.iter().map(|v| v / nd).collect());
    }
    for k in 0..n {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; n];
            e[k] = s;
            starts.push(e);
        }
    }
    let mut r = rng::seeded(CERTIFICATE_SEED);
    while starts.len() < CERTIFICATE_STARTS {
        starts.push(rng::unit_vector(&mut r, n));
    }
    let done = AtomicBool::new(false);
    starts
        .par_iter()
        .map(|y0| {
            if done.load(Ordering::Relaxed) {
                return f64::NEG_INFINITY;
            }
            let v = ascend(spec, x, y0);
            if v > tol {
                done.store(true, Ordering::Relaxed);
            }
            v
        })
        .reduce(|| f64::NEG_INFINITY, f64::max)
}

fn ascend(spec: &ReachSpec, x: &[f64], y0: &[f64]) -> f64 {
    let mut y = y0.to_vec();
    let mut best = f64::NEG_INFINITY;
    for k in 1..=CERTIFICATE_ITERS {
        let h = support_box(spec, &y).expect("valid direction");
        let arg = h.argmax_state.unwrap();
        best = best.max(dot(&y, x) - h.value);
        let g: Vec<f64> = x.iter().zip(&arg).map(|(a, b)| a - b).collect();
        let gy = dot(&g, &y);
        let tangent: Vec<f64> = g.iter().zip(&y).map(|(a, b)| a - gy * b).collect();
        let nt = norm2(&tangent);
        if nt < 1e-15 {
            break;
        }
        let step = 0.5 / (k as f64).sqrt();
        for (yi, ti) in y.iter_mut().zip(&tangent) {
            *yi += step * ti / nt;
        }
        let ny = norm2(&y);
        y.iter_mut().for_each(|v| *v /= ny);
    }
    best
}
