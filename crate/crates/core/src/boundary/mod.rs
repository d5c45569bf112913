//! Boundary of single-input integrator reach sets: parametric points, implicit
//! bounding hypersurfaces, membership tests and the generic-line diagnostic.

mod implicit;
mod lines;
mod membership;

pub use implicit::{
    bounding_polynomial, implicit_degree, implicitize, rho_from_params, rho_map, AffineMap, ImplicitSurface,
    MAX_IMPLICIT_DEGREE,
};
pub use lines::{line_intersection_count, line_intersection_trials, LineCount, LineTrial};
pub use membership::{contains, Membership, MembershipOracle};

use crate::error::{ReachError, Result};
use crate::numeric::inv_factorial;
use crate::system::ReachSpec;
use serde::{Deserialize, Serialize};

/// Which of the two bounding surfaces a boundary point lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Upper,
    Lower,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Upper => 1.0,
            Sign::Lower => -1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Sign::Upper => "upper",
            Sign::Lower => "lower",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryParams {
    pub block: usize,
    pub sign: Sign,
    /// Switching times `0 <= s_1 <= ... <= s_{r-1} <= t`.
    pub s: Vec<f64>,
}

/// Boundary point of block `params.block`, as an `r_j`-vector.
pub fn boundary_point(spec: &ReachSpec, params: &BoundaryParams) -> Result<Vec<f64>> {
    let j = params.block;
    if j >= spec.m() {
        return Err(ReachError::validation("block", format!("block {j} out of range 0..{}", spec.m())));
    }
    let r = spec.r()[j];
    let s = &params.s;
    if s.len() + 1 != r {
        return Err(ReachError::validation("s", format!("expected {} parameters, got {}", r - 1, s.len())));
    }
    let t = spec.t;
    if s.iter().any(|v| !v.is_finite() || *v < 0.0 || *v > t) || s.windows(2).any(|w| w[0] > w[1]) {
        return Err(ReachError::validation("s", "parameters must be nondecreasing in [0, t]"));
    }
    Ok(boundary_point_unchecked(spec, j, params.sign, s))
}

pub(crate) fn boundary_point_unchecked(spec: &ReachSpec, j: usize, sign: Sign, s: &[f64]) -> Vec<f64> {
    let r = spec.r()[j];
    let t = spec.t;
    let mu = spec.input.mu_j(j);
    let nu = spec.input.nu_j(j);
    let free = crate::system::phi_block_apply(r, t, &spec.x0[spec.block(j)]);
    let lead = if r % 2 == 1 { 1.0 } else { -1.0 };
    (0..r)
        .map(|k| {
            let n = r - k;
            let tn = t.powi(n as i32);
            let alt: f64 = s
                .iter()
                .enumerate()
                .map(|(q, sq)| if q % 2 == 0 { sq.powi(n as i32) } else { -sq.powi(n as i32) })
                .sum();
            free[k] + inv_factorial(n) * (nu * tn + sign.factor() * mu * (lead * tn + 2.0 * alt))
        })
        .collect()
}

/// Nondecreasing index tuples `0 <= k_1 <= ... <= k_len <= top`.
fn simplex_lattice(len: usize, top: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; len];
    loop {
        out.push(cur.clone());
        let Some(i) = (0..len).rev().find(|&i| cur[i] < top) else {
            return out;
        };
        let v = cur[i] + 1;
        for c in &mut cur[i..] {
            *c = v;
        }
    }
}

/// Boundary samples of block `j` over the ordered simplex lattice
/// `s_q = t k_q / (grid - 1)`, both signs, `2 C(grid + r - 2, r - 1)` points.
pub fn sample_boundary(spec: &ReachSpec, j: usize, grid: usize) -> Result<Vec<(Sign, Vec<f64>)>> {
    if grid < 2 {
        return Err(ReachError::validation("grid", format!("must be at least 2, got {grid}")));
    }
    if j >= spec.m() {
        return Err(ReachError::validation("block", format!("block {j} out of range 0..{}", spec.m())));
    }
    let r = spec.r()[j];
    let step = spec.t / (grid - 1) as f64;
    let lattice = simplex_lattice(r - 1, grid - 1);
    let mut out = Vec::with_capacity(2 * lattice.len());
    for sign in [Sign::Upper, Sign::Lower] {
        for k in &lattice {
            let s: Vec<f64> = k
                .iter()
                .map(|&ki| if ki == grid - 1 { spec.t } else { ki as f64 * step })
                .collect();
            out.push((sign, boundary_point_unchecked(spec, j, sign, &s)));
        }
    }
    Ok(out)
}
