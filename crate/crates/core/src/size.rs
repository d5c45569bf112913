//! Closed-form size measures: volume, diameter, critical times and their
//! large-dimension limits.

use crate::error::{ReachError, Result};
use crate::linalg::norm2;
use crate::numeric::{factorial, factorial_rational, ln_biguint, ratio_to_f64};
use crate::poly::Rational;
use crate::support::width;
use crate::system::{zeta_block, ReachSpec};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Glaisher–Kinkelin constant.
pub const GLAISHER_KINKELIN: f64 = 1.28242712910062;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeReport {
    pub volume: f64,
    pub diameter: f64,
    /// `zeta/|zeta|`; absent when every channel has zero width.
    pub diameter_direction: Option<Vec<f64>>,
    pub per_block_volumes: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diameter {
    pub value: f64,
    pub direction: Option<Vec<f64>>,
}

/// `prod_{k=1}^{r-1} k!/(2k+1)!`.
pub fn volume_constant(r: usize) -> Rational {
    (1..r).fold(Rational::one(), |acc, k| acc * factorial_rational(k) / factorial_rational(2 * k + 1))
}

/// `ln prod_{k=1}^{r-1} k!/(2k+1)!`.
fn ln_volume_constant(r: usize) -> f64 {
    let c = volume_constant(r);
    ln_biguint(c.numer().magnitude()) - ln_biguint(c.denom().magnitude())
}

/// `c(r) = prod_{k=1}^{r-1} (k!)^2/(2k+1)!`, the leading coefficient of the
/// Vandermonde nested sum.
pub fn vandermonde_coefficient(r: usize) -> Rational {
    (1..r).fold(Rational::one(), |acc, k| {
        let f = factorial_rational(k);
        acc * f.clone() * f / factorial_rational(2 * k + 1)
    })
}

fn block_volume(r: usize, mu: f64, t: f64) -> f64 {
    if mu == 0.0 {
        return 0.0;
    }
    let c = ratio_to_f64(&volume_constant(r));
    let tri = (r * (r + 1) / 2) as i32;
    let direct = (2.0 * mu).powi(r as i32) * t.powi(tri) * c;
    if direct.is_finite() && direct.is_normal() {
        direct
    } else {
        ln_block_volume(r, mu, t).exp()
    }
}

fn ln_block_volume(r: usize, mu: f64, t: f64) -> f64 {
    if mu == 0.0 {
        return f64::NEG_INFINITY;
    }
    r as f64 * (2.0 * mu).ln() + (r * (r + 1) / 2) as f64 * t.ln() + ln_volume_constant(r)
}

/// Volume of each block's reach set.
pub fn block_volumes(spec: &ReachSpec) -> Vec<f64> {
    spec.r()
        .iter()
        .enumerate()
        .map(|(j, &r)| block_volume(r, spec.input.mu_j(j), spec.t))
        .collect()
}

/// `ln vol`, finite even where `vol` itself under- or overflows.
pub fn ln_volume(spec: &ReachSpec) -> f64 {
    spec.r()
        .iter()
        .enumerate()
        .map(|(j, &r)| ln_block_volume(r, spec.input.mu_j(j), spec.t))
        .sum()
}

/// Lebesgue volume of the reach set.
pub fn volume(spec: &ReachSpec) -> f64 {
    let parts = block_volumes(spec);
    let prod: f64 = parts.iter().product();
    if prod.is_finite() && (prod.is_normal() || parts.contains(&0.0)) {
        prod
    } else {
        ln_volume(spec).exp()
    }
}

/// Volume as an exact rational, reading every float input exactly.
pub fn volume_exact(spec: &ReachSpec) -> Result<Rational> {
    let exact = |x: f64, field: &str| {
        Rational::from_float(x).ok_or_else(|| ReachError::validation(field, "not finite"))
    };
    let t = exact(spec.t, "t")?;
    let mut acc = Rational::one();
    for (j, &r) in spec.r().iter().enumerate() {
        let width = exact(spec.input.beta()[j], "beta")? - exact(spec.input.alpha()[j], "alpha")?;
        let tri = (r * (r + 1) / 2) as i32;
        acc = acc * pow(&width, r as i32) * pow(&t, tri) * volume_constant(r);
    }
    Ok(acc)
}

/// Volume from exact rational channel half-widths and horizon.
pub fn volume_rational(r: &[usize], mu: &[Rational], t: &Rational) -> Result<Rational> {
    if r.len() != mu.len() {
        return Err(ReachError::validation("mu", format!("expected {} entries, got {}", r.len(), mu.len())));
    }
    if !t.is_positive() {
        return Err(ReachError::validation("t", "must be positive"));
    }
    if mu.iter().any(|m| m.is_negative()) {
        return Err(ReachError::validation("mu", "must be nonnegative"));
    }
    let two = Rational::from_integer(BigInt::from(2));
    Ok(r.iter().zip(mu).fold(Rational::one(), |acc, (&rj, m)| {
        let tri = (rj * (rj + 1) / 2) as i32;
        acc * pow(&(two.clone() * m), rj as i32) * pow(t, tri) * volume_constant(rj)
    }))
}

fn pow(x: &Rational, e: i32) -> Rational {
    num_traits::pow(x.clone(), e as usize)
}

/// Brunn–Minkowski lower bound on the volume when the initial set has volume
/// `vol_x0`.
pub fn volume_lower_bound(spec: &ReachSpec, vol_x0: f64) -> Result<f64> {
    if !(vol_x0.is_finite() && vol_x0 >= 0.0) {
        return Err(ReachError::validation("vol_x0", format!("must be nonnegative and finite, got {vol_x0}")));
    }
    let d = spec.d() as f64;
    let root = (ln_volume(spec) / d).exp();
    Ok((vol_x0.powf(1.0 / d) + root).powf(d))
}

/// `2 |zeta(t)|` with the channel-scaled stacked `zeta`.
pub fn diameter(spec: &ReachSpec) -> Diameter {
    let mut z = Vec::with_capacity(spec.d());
    for (j, &r) in spec.r().iter().enumerate() {
        let mu = spec.input.mu_j(j);
        z.extend(zeta_block(r, 0.0, spec.t).into_iter().map(|v| mu * v));
    }
    let n = norm2(&z);
    Diameter {
        value: 2.0 * n,
        direction: (n > 0.0).then(|| z.iter().map(|v| v / n).collect()),
    }
}

/// Unit vector with azimuth `phi` and polar angle `theta`.
pub fn spherical_to_unit(phi: f64, theta: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

/// Width of a three-dimensional reach set at spherical angles.
pub fn width_at_angles(spec: &ReachSpec, phi: f64, theta: f64) -> Result<f64> {
    if spec.d() != 3 {
        return Err(ReachError::Capability(format!("angular width needs d = 3, got d = {}", spec.d())));
    }
    Ok(width(spec, &spherical_to_unit(phi, theta))?.value)
}

/// The two `(phi, theta)` maximizers of the width of the triple integrator.
pub fn diameter_maximizers(spec: &ReachSpec) -> Result<[(f64, f64); 2]> {
    if spec.r() != [3] {
        return Err(ReachError::Capability(format!(
            "diameter maximizers are available for r = (3) only, got r = {:?}",
            spec.r()
        )));
    }
    let t = spec.t;
    let n = (t.powi(4) + 9.0 * t * t + 36.0).sqrt();
    let phi = (3.0 / t).atan();
    Ok([
        (phi, (6.0 / n).acos()),
        (std::f64::consts::PI + phi, (-6.0 / n).acos()),
    ])
}

pub fn size_report(spec: &ReachSpec) -> SizeReport {
    let dia = diameter(spec);
    SizeReport {
        volume: volume(spec),
        diameter: dia.value,
        diameter_direction: dia.direction,
        per_block_volumes: block_volumes(spec),
    }
}

/// Horizon at which the single-input volume in dimension `d` overtakes the
/// one in dimension `d_prime`, for a common input half-width `mu`.
pub fn critical_time(d: usize, d_prime: usize, mu: f64) -> Result<f64> {
    if d_prime < 1 || d <= d_prime {
        return Err(ReachError::validation("d", format!("need d > d' >= 1, got d = {d}, d' = {d_prime}")));
    }
    if !(mu.is_finite() && mu > 0.0) {
        return Err(ReachError::validation("mu", format!("must be positive and finite, got {mu}")));
    }
    let prod = (d_prime..d).fold(BigUint::one(), |acc, k| acc * (factorial(2 * k + 1) / factorial(k)));
    let s = (d + d_prime + 1) as f64;
    let ln_t = -2.0 / s * (2.0 * mu).ln() + 2.0 / ((d - d_prime) as f64 * s) * ln_biguint(&prod);
    Ok(ln_t.exp())
}

/// `I_0(x)` by its power series.
pub fn bessel_i0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * k);
        sum += term;
        if term < 1e-17 * sum {
            return sum;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Asymptotic {
    VolumeDToInf { d: usize, mu: f64, t: f64 },
    TcrDToInf { d: usize, mu: f64 },
    DiameterDToInf { mu: f64, t: f64 },
}

/// Large-dimension approximations for a single-input chain of length `d`.
pub fn asymptotics(kind: Asymptotic) -> f64 {
    match kind {
        Asymptotic::VolumeDToInf { d, mu, t } => ln_volume_asymptotic(d, mu, t).exp(),
        Asymptotic::TcrDToInf { d, mu } => {
            let d = d as f64;
            4.0 / std::f64::consts::E * d * mu.powf(-1.0 / d) * 2f64.powf(-1.5 / d)
        }
        Asymptotic::DiameterDToInf { mu, t } => 2.0 * mu * (bessel_i0(2.0 * t) - 1.0).sqrt(),
    }
}

/// Logarithm of the large-`d` volume formula.
pub fn ln_volume_asymptotic(d: usize, mu: f64, t: f64) -> f64 {
    let d = d as f64;
    let ln2 = std::f64::consts::LN_2;
    d * (2.0 * mu).ln() + d * (d + 1.0) / 2.0 * t.ln() + 1.5 * d * d + 1.0 / 12.0
        - GLAISHER_KINKELIN.ln()
        - (2.0 * d * d - 1.0 / 12.0) * ln2
        - (d * d + 1.0 / 12.0) * d.ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    Volume,
    Diameter,
}

/// `(d, t, value)` samples of the single-input volume or diameter on a
/// uniform horizon grid `t_max k / (samples - 1)`, `k >= 1`.
pub fn size_curves(kind: CurveKind, d_list: &[usize], t_max: f64, samples: usize, mu: f64) -> Result<Vec<(usize, f64, f64)>> {
    if samples < 2 {
        return Err(ReachError::validation("samples", "need at least 2"));
    }
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(ReachError::validation("t_max", "must be positive and finite"));
    }
    let mut grid = Vec::new();
    for &d in d_list {
        crate::system::RelativeDegree::new(&[d])?;
        for k in 1..samples {
            grid.push((d, t_max * k as f64 / (samples - 1) as f64));
        }
    }
    grid.par_iter()
        .map(|&(d, t)| {
            let spec = ReachSpec::symmetric(&[d], &[mu], t)?;
            let v = match kind {
                CurveKind::Volume => volume(&spec),
                CurveKind::Diameter => diameter(&spec).value,
            };
            Ok((d, t, v))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rational::rat;

    fn sym(r: &[usize], mu: &[f64], t: f64) -> ReachSpec {
        ReachSpec::symmetric(r, mu, t).unwrap()
    }

    #[test]
    fn double_integrator_volume() {
        for t in [0.5, 1.0, 3.0] {
            let v = volume(&sym(&[2], &[1.0], t));
            assert!((v - 2.0 / 3.0 * t * t * t).abs() < 1e-14 * v);
        }
        assert_eq!(volume_exact(&sym(&[2], &[1.0], 3.0)).unwrap(), rat(18, 1));
    }

    #[test]
    fn cylinder_volume() {
        let s = sym(&[2, 1], &[5.0, 3.0], 4.0);
        assert_eq!(volume_exact(&s).unwrap(), rat(25600, 1));
        assert!((volume(&s) - 25600.0).abs() < 1e-11);
        assert_eq!(block_volumes(&s).len(), 2);
    }

    #[test]
    fn interval_length() {
        assert_eq!(volume(&sym(&[1], &[0.75], 2.0)), 3.0);
    }

    #[test]
    fn extreme_dimensions_stay_finite() {
        let s = sym(&[60], &[1.0], 1.0);
        let lv = ln_volume(&s);
        assert!(lv.is_finite() && lv < -1000.0);
        assert_eq!(volume(&s), 0.0);
    }

    #[test]
    fn lower_bound_examples() {
        let s = sym(&[2], &[1.0], 1.0);
        assert!((volume_lower_bound(&s, 0.0).unwrap() - volume(&s)).abs() < 1e-14);
        let b = volume_lower_bound(&s, 1.0).unwrap();
        assert!((b - (1.0 + (2.0f64 / 3.0).sqrt()).powi(2)).abs() < 1e-13);
        assert!(volume_lower_bound(&s, 2.0).unwrap() > b);
        assert!(volume_lower_bound(&s, -1.0).is_err());
    }

    #[test]
    fn triple_integrator_diameter() {
        for t in [0.5, 1.0, 2.1] {
            let d = diameter(&sym(&[3], &[1.0], t));
            let want = t / 3.0 * (t.powi(4) + 9.0 * t * t + 36.0).sqrt();
            assert!((d.value - want).abs() < 1e-13 * want);
            let w = width(&sym(&[3], &[1.0], t), d.direction.as_ref().unwrap()).unwrap().value;
            assert!((w - d.value).abs() < 1e-12 * want);
        }
        assert!((diameter(&sym(&[2], &[1.0], 1.0)).value - 5f64.sqrt()).abs() < 1e-15);
        let flat = ReachSpec::new(&[2], vec![1.0], vec![1.0], vec![0.0; 2], 1.0).unwrap();
        assert_eq!(diameter(&flat).direction, None);
    }

    #[test]
    fn maximizers_are_antipodal() {
        let s = sym(&[3], &[1.0], 2.1);
        let [a, b] = diameter_maximizers(&s).unwrap();
        let (ua, ub) = (spherical_to_unit(a.0, a.1), spherical_to_unit(b.0, b.1));
        for k in 0..3 {
            assert!((ua[k] + ub[k]).abs() < 1e-14);
        }
        let dia = diameter(&s).value;
        assert!((width_at_angles(&s, a.0, a.1).unwrap() - dia).abs() < 1e-10);
        assert!(diameter_maximizers(&sym(&[2], &[1.0], 1.0)).unwrap_err().is_capability());
    }

    #[test]
    fn critical_times() {
        assert!((critical_time(3, 2, 1.0).unwrap() - 30f64.cbrt()).abs() < 1e-12);
        assert!((critical_time(4, 3, 1.0).unwrap() - 420f64.powf(0.25)).abs() < 1e-12);
        assert!(critical_time(2, 2, 1.0).is_err());
        let t = critical_time(5, 2, 0.7).unwrap();
        let a = volume(&sym(&[5], &[0.7], t));
        let b = volume(&sym(&[2], &[0.7], t));
        assert!((a - b).abs() < 1e-12 * a);
    }

    #[test]
    fn bessel_values() {
        assert_eq!(bessel_i0(0.0), 1.0);
        assert!((bessel_i0(2.0) - 2.279585302336067).abs() < 1e-15);
        let lim = asymptotics(Asymptotic::DiameterDToInf { mu: 1.0, t: 1.0 });
        assert!((lim - 2.0 * 1.279585302336067f64.sqrt()).abs() < 1e-14);
        assert!((lim - 2.262373).abs() < 5e-6);
    }

    #[test]
    fn tcr_asymptotic_ratio() {
        let a = asymptotics(Asymptotic::TcrDToInf { d: 40, mu: 1.0 });
        let e = critical_time(40, 39, 1.0).unwrap();
        assert!((a / e - 1.0).abs() < 0.05);
    }

    #[test]
    fn curves_cover_grid() {
        let c = size_curves(CurveKind::Volume, &[2, 3], 2.0, 5, 1.0).unwrap();
        assert_eq!(c.len(), 8);
        assert_eq!(c[3], (2, 2.0, 2.0 / 3.0 * 8.0));
    }

    #[test]
    fn vandermonde_small() {
        assert_eq!(vandermonde_coefficient(1), rat(1, 1));
        assert_eq!(vandermonde_coefficient(2), rat(1, 6));
        assert_eq!(vandermonde_coefficient(3), rat(1, 6) * rat(4, 120));
    }
}
