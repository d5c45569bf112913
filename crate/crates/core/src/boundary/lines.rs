//! Intersections of lines with the real algebraic boundary.

use super::implicit::{implicit_degree, implicitize, rho_map_exact};
use super::membership::{Membership, MembershipOracle};
use super::Sign;
use crate::error::{ReachError, Result};
use crate::poly::rational::{from_f64, Rational};
use crate::poly::{all_real_roots, MultiPoly, RatPoly};
use crate::rng;
use crate::system::ReachSpec;
use serde::{Deserialize, Serialize};

const CLUSTER_TOL: f64 = 1e-10;
const MAX_RESAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineCount {
    /// Real intersections with `{p_upper = 0}` and `{p_lower = 0}`.
    pub count: usize,
    /// `false` when the line is tangent, asymptotic or passes through a
    /// singular or shared point, so the count is not the generic one.
    pub generic: bool,
}

/// Counts real intersections of `point + lambda * direction` with both
/// bounding hypersurfaces of block `j`.
pub fn line_intersection_count(spec: &ReachSpec, j: usize, point: &[f64], direction: &[f64]) -> Result<LineCount> {
    if j >= spec.m() {
        return Err(ReachError::validation("block", format!("block {j} out of range 0..{}", spec.m())));
    }
    let r = spec.r()[j];
    if !(2..=3).contains(&r) {
        return Err(ReachError::Capability(format!("line counts need a block of dimension 2 or 3, got {r}")));
    }
    if point.len() != r || direction.len() != r {
        return Err(ReachError::Shape(format!("line data must have {r} entries")));
    }
    let block = spec.block_spec(j);
    if MembershipOracle::new(&block)?.classify(point, 0.0)? != Membership::Inside {
        return Err(ReachError::InvalidInput("line must pass through an interior point".into()));
    }
    let core = implicitize(r)?;
    let a: Vec<Rational> = point.iter().map(|&v| from_f64(v)).collect::<Result<_>>()?;
    let v: Vec<Rational> = direction.iter().map(|&v| from_f64(v)).collect::<Result<_>>()?;
    let lam = vec!["lambda".to_string()];
    let mut polys = Vec::with_capacity(2);
    for sign in [Sign::Upper, Sign::Lower] {
        let maps = rho_map_exact(&block, 0, sign)?;
        let images: Vec<MultiPoly> = maps
            .iter()
            .enumerate()
            .map(|(k, (sc, off))| {
                &MultiPoly::constant(&lam, sc * &a[k] + off) + &MultiPoly::var(&lam, 0).scale(&(sc * &v[k]))
            })
            .collect();
        polys.push(to_univariate(&core.substitute(&images)?));
    }
    let deg = implicit_degree(r);
    let mut generic = polys.iter().all(|p| p.degree() == Some(deg))
        && polys.iter().all(|p| p.gcd(&p.derivative()).degree() == Some(0))
        && polys[0].gcd(&polys[1]).degree() == Some(0);
    let mut roots: Vec<f64> = polys
        .iter()
        .flat_map(|p| all_real_roots(p, 1e-13))
        .map(|r| r.value)
        .collect();
    roots.sort_by(f64::total_cmp);
    if roots.windows(2).any(|w| w[1] - w[0] <= CLUSTER_TOL) {
        generic = false;
    }
    Ok(LineCount {
        count: roots.len(),
        generic,
    })
}

fn to_univariate(p: &MultiPoly) -> RatPoly {
    let deg = p.total_degree().unwrap_or(0) as usize;
    let mut c = vec![Rational::from_integer(0.into()); deg + 1];
    for (e, v) in p.terms() {
        c[e[0] as usize] = v.clone();
    }
    RatPoly::new(c)
}

/// Outcome of one random-line trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineTrial {
    /// Generic intersection count, or `None` if no generic line was found.
    pub count: Option<usize>,
    pub resamples: usize,
}

/// Random directions through `point`, resampling non-generic lines.
pub fn line_intersection_trials(
    spec: &ReachSpec,
    j: usize,
    point: &[f64],
    trials: usize,
    seed: u64,
) -> Result<Vec<LineTrial>> {
    let r = spec.r().get(j).copied().unwrap_or(0);
    let mut out = Vec::with_capacity(trials);
    for trial in 0..trials {
        let mut g = rng::stream(seed, trial as u64);
        let mut found = None;
        let mut resamples = 0;
        while resamples <= MAX_RESAMPLES {
            let dir = rng::unit_vector(&mut g, r);
            let c = line_intersection_count(spec, j, point, &dir)?;
            if c.generic {
                found = Some(c.count);
                break;
            }
            resamples += 1;
        }
        out.push(LineTrial {
            count: found,
            resamples,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generic_counts() {
        let s2 = ReachSpec::symmetric(&[2], &[1.0], 1.0).unwrap();
        let c = line_intersection_count(&s2, 0, &[0.05, 0.1], &[0.6, 0.8]).unwrap();
        assert_eq!(c, LineCount { count: 4, generic: true });
        let s3 = ReachSpec::symmetric(&[3], &[1.0], 1.0).unwrap();
        let trials = line_intersection_trials(&s3, 0, &[0.01, -0.02, 0.05], 10, 3).unwrap();
        let counts: Vec<usize> = trials.iter().map(|t| t.count.expect("generic line found")).collect();
        assert!(counts.iter().all(|c| [4, 6, 8].contains(c)), "{counts:?}");
        assert!(counts.iter().filter(|&&c| c == 4).count() >= 5, "{counts:?}");
    }

    #[test]
    fn rejects_exterior_points() {
        let s2 = ReachSpec::symmetric(&[2], &[1.0], 1.0).unwrap();
        assert!(line_intersection_count(&s2, 0, &[5.0, 0.0], &[1.0, 0.0]).is_err());
    }
}
