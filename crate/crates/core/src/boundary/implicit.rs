//! Implicit bounding polynomials through the Hankel-determinant route.
//!
//! With `lambda_k = rho_{r-k+1}` the alternating power sums of the switching
//! times are the log-derivative coefficients of a rational generating function
//! whose numerator and denominator degrees are at most `delta + 1` and `delta`.
//! Its series coefficients then satisfy a Hankel determinant identity, which is
//! the canonical polynomial in `rho`.

use super::Sign;
use crate::error::{ReachError, Result};
use crate::numeric::{factorial_rational, inv_factorial};
use crate::poly::rational::{from_f64, pow, Rational};
use crate::poly::{poly_matrix_det, series_exp, MultiPoly};
use crate::system::ReachSpec;
use num_traits::{One, Zero};
use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::Mutex;

pub const MAX_IMPLICIT_DEGREE: usize = 8;

static CACHE: Lazy<Mutex<HashMap<usize, MultiPoly>>> = Lazy::new(|| Mutex::new(HashMap::new()));

/// `delta = floor((r-1)/2)` and total degree `(delta+1)(r-delta)`.
pub fn implicit_degree(r: usize) -> usize {
    let delta = (r - 1) / 2;
    (delta + 1) * (r - delta)
}

/// Variable priority matching `lambda_1, lambda_2, ...`, i.e. `rho_r` first.
pub(crate) fn rho_priority(r: usize) -> Vec<usize> {
    (0..r).rev().collect()
}

/// Canonical implicit polynomial in `rho_1 .. rho_r`, normalized to be monic
/// in its lexicographically largest monomial with `rho_r` compared first.
pub fn implicitize(r: usize) -> Result<MultiPoly> {
    if !(2..=MAX_IMPLICIT_DEGREE).contains(&r) {
        return Err(ReachError::Capability(format!(
            "implicitization supports 2 <= r <= {MAX_IMPLICIT_DEGREE}, got r = {r}"
        )));
    }
    if let Some(p) = CACHE.lock().unwrap().get(&r) {
        return Ok(p.clone());
    }
    let vars = MultiPoly::var_names("rho", r);
    let lambdas: Vec<MultiPoly> = (1..=r).map(|k| MultiPoly::var(&vars, r - k)).collect();
    let a = series_exp(&lambdas, r)?;
    let delta = (r - 1) / 2;
    let hankel: Vec<Vec<MultiPoly>> = (0..=delta)
        .map(|i| (0..=delta).map(|j| a[r - 2 * delta + i + j].clone()).collect())
        .collect();
    let p = poly_matrix_det(&hankel)?.normalized(&rho_priority(r));
    CACHE.lock().unwrap().insert(r, p.clone());
    Ok(p)
}

/// `rho_k = sum_q (-1)^(q+1) s_q^(r-k+1)` for exact parameters.
pub fn rho_from_params(r: usize, s: &[Rational]) -> Vec<Rational> {
    (1..=r)
        .map(|k| {
            let n = (r - k + 1) as u32;
            s.iter().enumerate().fold(Rational::zero(), |acc, (q, sq)| {
                if q % 2 == 0 {
                    acc + pow(sq, n)
                } else {
                    acc - pow(sq, n)
                }
            })
        })
        .collect()
}

/// `x_k -> scale * x_k + offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub scale: f64,
    pub offset: f64,
}

impl AffineMap {
    pub fn apply(&self, x: f64) -> f64 {
        self.scale * x + self.offset
    }
}

/// Coordinate maps from block `j` states to `rho` for the chosen surface.
///
/// The upper maps follow the parameterization with the `+` sign. The lower
/// surface is the reflection of the upper one through the center of symmetry
/// `c`, so its maps are `rho^-(x) = rho^+(2c - x)`.
pub fn rho_map(spec: &ReachSpec, j: usize, sign: Sign) -> Result<Vec<AffineMap>> {
    let (scale, offset, center) = rho_parts(spec, j)?;
    Ok((0..scale.len())
        .map(|k| match sign {
            Sign::Upper => AffineMap {
                scale: scale[k],
                offset: offset[k],
            },
            Sign::Lower => AffineMap {
                scale: -scale[k],
                offset: 2.0 * scale[k] * center[k] + offset[k],
            },
        })
        .collect())
}

type Parts = (Vec<f64>, Vec<f64>, Vec<f64>);

fn rho_parts(spec: &ReachSpec, j: usize) -> Result<Parts> {
    if j >= spec.m() {
        return Err(ReachError::validation("block", format!("block {j} out of range 0..{}", spec.m())));
    }
    let mu = spec.input.mu_j(j);
    if mu == 0.0 {
        return Err(ReachError::Degenerate(format!("channel {j} has zero input width")));
    }
    let nu = spec.input.nu_j(j);
    let r = spec.r()[j];
    let t = spec.t;
    let free = crate::system::phi_block_apply(r, t, &spec.x0[spec.block(j)]);
    let center: Vec<f64> = spec.center()[spec.block(j)].to_vec();
    let lead = if r % 2 == 1 { 1.0 } else { -1.0 };
    let mut scale = Vec::with_capacity(r);
    let mut offset = Vec::with_capacity(r);
    for k in 0..r {
        let n = r - k;
        let sc = 1.0 / (2.0 * mu * inv_factorial(n));
        let tn = t.powi(n as i32);
        scale.push(sc);
        offset.push(-sc * free[k] - 0.5 * (lead * tn + nu / mu * tn));
    }
    Ok((scale, offset, center))
}

/// Exact rational version of the coordinate maps, as `(scale, offset)`.
pub(crate) fn rho_map_exact(spec: &ReachSpec, j: usize, sign: Sign) -> Result<Vec<(Rational, Rational)>> {
    let alpha = from_f64(spec.input.alpha()[j])?;
    let beta = from_f64(spec.input.beta()[j])?;
    let two = Rational::from_integer(2.into());
    let mu = (&beta - &alpha) / &two;
    let nu = (&beta + &alpha) / &two;
    if mu.is_zero() {
        return Err(ReachError::Degenerate(format!("channel {j} has zero input width")));
    }
    let t = from_f64(spec.t)?;
    let r = spec.r()[j];
    let x0: Vec<Rational> = spec.x0[spec.block(j)].iter().map(|&v| from_f64(v)).collect::<Result<_>>()?;
    let free: Vec<Rational> = (0..r)
        .map(|k| {
            (k..r).fold(Rational::zero(), |acc, l| {
                acc + pow(&t, (l - k) as u32) / factorial_rational(l - k) * &x0[l]
            })
        })
        .collect();
    let lead = if r % 2 == 1 { Rational::one() } else { -Rational::one() };
    let half = Rational::new(1.into(), 2.into());
    let mut out = Vec::with_capacity(r);
    for k in 0..r {
        let n = r - k;
        let tn = pow(&t, n as u32);
        let sc = factorial_rational(n) / (&two * &mu);
        let off = -(&sc * &free[k]) - &half * (&lead * &tn + &nu / &mu * &tn);
        out.push(match sign {
            Sign::Upper => (sc, off),
            Sign::Lower => {
                let center = &free[k] + &nu * &tn / factorial_rational(n);
                (-sc.clone(), &two * &sc * center + off)
            }
        })
    }
    Ok(out)
}

/// `p_j^upper` or `p_j^lower` in the block state variables `x1 .. xr`, with
/// exact rational coefficients taken from the spec's floating-point values.
pub fn bounding_polynomial(spec: &ReachSpec, j: usize, sign: Sign) -> Result<MultiPoly> {
    if j >= spec.m() {
        return Err(ReachError::validation("block", format!("block {j} out of range 0..{}", spec.m())));
    }
    let r = spec.r()[j];
    let core = implicitize(r)?;
    let vars = MultiPoly::var_names("x", r);
    let maps = rho_map_exact(spec, j, sign)?;
    let images: Vec<MultiPoly> = maps
        .iter()
        .enumerate()
        .map(|(k, (sc, off))| &MultiPoly::var(&vars, k).scale(sc) + &MultiPoly::constant(&vars, off.clone()))
        .collect();
    core.substitute(&images)
}

/// The canonical polynomial together with both surfaces' coordinate maps.
#[derive(Debug, Clone, PartialEq)]
pub struct ImplicitSurface {
    pub poly: MultiPoly,
    pub upper: Vec<AffineMap>,
    pub lower: Vec<AffineMap>,
    pub degree: usize,
    terms: Vec<(f64, Vec<u32>)>,
}

impl ImplicitSurface {
    pub fn new(spec: &ReachSpec, j: usize) -> Result<Self> {
        let r = spec.r()[j];
        let poly = implicitize(r)?;
        let terms = poly
            .terms()
            .map(|(e, c)| (crate::numeric::ratio_to_f64(c), e.clone()))
            .collect();
        Ok(Self {
            upper: rho_map(spec, j, Sign::Upper)?,
            lower: rho_map(spec, j, Sign::Lower)?,
            degree: implicit_degree(r),
            poly,
            terms,
        })
    }

    /// Canonical polynomial at a point in `rho` coordinates.
    pub fn eval_rho(&self, rho: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| c * e.iter().zip(rho).map(|(&k, &v)| v.powi(k as i32)).product::<f64>())
            .sum()
    }

    /// `(p_upper(x), p_lower(x))` for a block state `x`.
    pub fn eval(&self, x: &[f64]) -> (f64, f64) {
        let up: Vec<f64> = self.upper.iter().zip(x).map(|(m, v)| m.apply(*v)).collect();
        let lo: Vec<f64> = self.lower.iter().zip(x).map(|(m, v)| m.apply(*v)).collect();
        (self.eval_rho(&up), self.eval_rho(&lo))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rational::{int, rat};

    #[test]
    fn low_degree_forms() {
        assert_eq!(implicitize(2).unwrap().to_string(), "rho2^2 - rho1");
        assert_eq!(implicitize(3).unwrap().to_string(), "rho3^4 - 4*rho1*rho3 + 3*rho2^2");
        assert!(implicitize(1).unwrap_err().is_capability());
        assert!(implicitize(9).unwrap_err().is_capability());
    }

    #[test]
    fn degrees_match_formula() {
        for r in 2..=6 {
            assert_eq!(implicitize(r).unwrap().total_degree(), Some(implicit_degree(r) as u32));
        }
    }

    #[test]
    fn vanishes_on_rational_parameters() {
        let p = implicitize(4).unwrap();
        for s in [[rat(1, 3), rat(1, 2), int(2)], [int(0), rat(5, 7), rat(5, 7)], [rat(-2, 9), int(1), rat(3, 11)]] {
            assert!(p.eval_exact(&rho_from_params(4, &s)).is_zero());
        }
    }

    #[test]
    fn upper_maps_match_double_integrator() {
        let t = 1.25;
        let s = ReachSpec::symmetric(&[2], &[1.0], t).unwrap();
        let m = rho_map(&s, 0, Sign::Upper).unwrap();
        assert_eq!(m[0], AffineMap { scale: 1.0, offset: t * t / 2.0 });
        assert_eq!(m[1], AffineMap { scale: 0.5, offset: t / 2.0 });
        let degenerate = ReachSpec::new(&[2], vec![1.0], vec![1.0], vec![0.0; 2], 1.0).unwrap();
        assert!(matches!(rho_map(&degenerate, 0, Sign::Upper), Err(ReachError::Degenerate(_))));
    }

    #[test]
    fn lower_polynomial_is_reflection() {
        let s = ReachSpec::new(&[3], vec![-0.5], vec![2.0], vec![0.1, 0.2, 0.3], 2.1).unwrap();
        let surf = ImplicitSurface::new(&s, 0).unwrap();
        let c = s.center();
        let x = [0.7, -0.3, 1.1];
        let refl: Vec<f64> = x.iter().zip(&c).map(|(a, b)| 2.0 * b - a).collect();
        let (up, lo) = surf.eval(&x);
        let (up_r, lo_r) = surf.eval(&refl);
        assert!((up - lo_r).abs() < 1e-12 * up.abs().max(1.0));
        assert!((lo - up_r).abs() < 1e-12 * lo.abs().max(1.0));
        let exact_lo = bounding_polynomial(&s, 0, Sign::Lower).unwrap();
        assert!((exact_lo.eval_f64(&x) - lo).abs() < 1e-9 * lo.abs().max(1.0));
    }
}
