//! Real-root isolation for univariate polynomials.
//!
//! Float coefficients go through a derivative cascade: the critical points of
//! `p` split the interval into monotone pieces, each bracketing at most one
//! simple root, which bisection then refines. Roots at critical points have
//! even multiplicity exactly when the derivative changes sign there. Rational
//! coefficients use square-free factorization and Sturm sequences.

use super::rational::{from_f64, Rational};
use super::uni::{sign_variations, RatPoly, UniPoly};
use crate::error::{ReachError, Result};
use crate::numeric::ratio_to_f64;
use num_traits::{Signed, Zero};

/// A real root with the parity of its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub value: f64,
    /// `true` when `p` does not change sign across the root.
    pub even: bool,
}

/// All real roots of `p` in `[lo, hi]`, sorted, each located within `tol`.
///
/// The zero polynomial has no isolated roots and yields an empty list.
pub fn real_roots_in_interval(p: &UniPoly<f64>, lo: f64, hi: f64, tol: f64) -> Result<Vec<Root>> {
    if !p.is_finite() {
        return Err(ReachError::Numeric("non-finite polynomial coefficient".into()));
    }
    if !(lo.is_finite() && hi.is_finite()) || hi < lo {
        return Err(ReachError::InvalidInput(format!("bad interval [{lo}, {hi}]")));
    }
    let mut roots = cascade(p, lo, hi, tol.max(0.0));
    dedup(&mut roots, tol);
    Ok(roots)
}

fn cascade(p: &UniPoly<f64>, lo: f64, hi: f64, tol: f64) -> Vec<Root> {
    match p.degree() {
        None | Some(0) => Vec::new(),
        Some(1) => {
            let c = p.coeffs();
            let x = -c[0] / c[1];
            if x >= lo && x <= hi {
                vec![Root { value: x, even: false }]
            } else {
                Vec::new()
            }
        }
        Some(_) => {
            let crit = cascade(&p.derivative(), lo, hi, tol);
            let mut pts: Vec<(f64, Option<bool>)> = vec![(lo, None)];
            for c in &crit {
                if c.value <= lo {
                    pts[0].1 = Some(c.even);
                } else if c.value < hi {
                    pts.push((c.value, Some(c.even)));
                }
            }
            let hi_crit = crit.iter().rev().find(|c| c.value >= hi).map(|c| c.even);
            pts.push((hi, hi_crit));
            let signs: Vec<i32> = pts.iter().map(|&(x, _)| zero_aware_sign(p, x)).collect();

            let mut roots = Vec::new();
            for (i, &(x, crit_even)) in pts.iter().enumerate() {
                if signs[i] == 0 {
                    roots.push(Root {
                        value: x,
                        even: crit_even.is_some_and(|e| !e),
                    });
                }
                if i + 1 < pts.len() && signs[i] * signs[i + 1] < 0 {
                    roots.push(Root {
                        value: bisect(p, x, pts[i + 1].0, signs[i], tol),
                        even: false,
                    });
                }
            }
            roots.sort_by(|a, b| a.value.total_cmp(&b.value));
            roots
        }
    }
}

fn zero_aware_sign(p: &UniPoly<f64>, x: f64) -> i32 {
    let v = p.eval(x);
    if v.abs() <= p.eval_error_bound(x) {
        0
    } else if v > 0.0 {
        1
    } else {
        -1
    }
}

fn bisect(p: &UniPoly<f64>, mut a: f64, mut b: f64, sa: i32, tol: f64) -> f64 {
    loop {
        let m = 0.5 * (a + b);
        if b - a <= tol || m <= a || m >= b {
            return m;
        }
        let v = p.eval(m);
        if v == 0.0 {
            return m;
        }
        if (v > 0.0) == (sa > 0) {
            a = m;
        } else {
            b = m;
        }
    }
}

fn dedup(roots: &mut Vec<Root>, tol: f64) {
    roots.dedup_by(|b, a| (b.value - a.value).abs() <= tol.max(f64::EPSILON * a.value.abs()));
}

/// Roots of a rational polynomial in `[lo, hi]`, refined to width `tol`.
/// Parity comes from the exact multiplicity.
pub fn real_roots_exact(p: &RatPoly, lo: &Rational, hi: &Rational, tol: f64) -> Vec<Root> {
    let mut out = Vec::new();
    for (mult, f) in p.square_free_factors() {
        for v in isolate_square_free(&f, lo, hi, tol) {
            out.push(Root {
                value: v,
                even: mult % 2 == 0,
            });
        }
    }
    out.sort_by(|a, b| a.value.total_cmp(&b.value));
    out
}

/// Number of distinct real roots over the whole line.
pub fn count_real_roots(p: &RatPoly) -> usize {
    if p.degree().unwrap_or(0) == 0 {
        return 0;
    }
    let sf = p.div_rem(&p.gcd(&p.derivative())).0;
    let seq = sf.sturm_sequence();
    sign_variations(&seq, None, false) - sign_variations(&seq, None, true)
}

/// Every real root over the whole line, via a Cauchy bound.
pub fn all_real_roots(p: &RatPoly, tol: f64) -> Vec<Root> {
    let Some(n) = p.degree() else {
        return Vec::new();
    };
    if n == 0 {
        return Vec::new();
    }
    let lc = p.leading().unwrap().abs();
    let bound = p.coeffs()[..n]
        .iter()
        .map(|c| c.abs() / &lc)
        .fold(Rational::zero(), |a, b| if b > a { b } else { a })
        + Rational::from_integer(1.into());
    real_roots_exact(p, &-bound.clone(), &bound, tol)
}

/// Converts float coefficients exactly, then counts distinct real roots.
pub fn count_real_roots_f64(p: &UniPoly<f64>) -> Result<usize> {
    let q = RatPoly::new(p.coeffs().iter().map(|&c| from_f64(c)).collect::<Result<_>>()?);
    Ok(count_real_roots(&q))
}

fn isolate_square_free(f: &RatPoly, lo: &Rational, hi: &Rational, tol: f64) -> Vec<f64> {
    let seq = f.sturm_sequence();
    let mut out = Vec::new();
    if f.sign_at(lo) == 0 {
        out.push(ratio_to_f64(lo));
    }
    let two = Rational::from_integer(2.into());
    let mut stack = vec![(lo.clone(), hi.clone())];
    while let Some((a, b)) = stack.pop() {
        let n = sign_variations(&seq, Some(&a), true) - sign_variations(&seq, Some(&b), true);
        match n {
            0 => {}
            1 => out.push(refine(f, a, b, tol)),
            _ => {
                let m = (&a + &b) / &two;
                stack.push((m.clone(), b));
                stack.push((a, m));
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Refines the single root of `f` in `(a, b]`.
fn refine(f: &RatPoly, mut a: Rational, mut b: Rational, tol: f64) -> f64 {
    if f.sign_at(&b) == 0 {
        return ratio_to_f64(&b);
    }
    // One simple root in (a, b]: the sign just right of `a` is opposite to f(b).
    let sa = -f.sign_at(&b);
    let two = Rational::from_integer(2.into());
    while ratio_to_f64(&(&b - &a)) > tol {
        let m = (&a + &b) / &two;
        let sm = f.sign_at(&m);
        if sm == 0 {
            return ratio_to_f64(&m);
        }
        if sm == sa {
            a = m;
        } else {
            b = m;
        }
    }
    ratio_to_f64(&((a + b) / two))
}

#[cfg(test)]
mod tests {
    use super::super::rational::{int, rat};
    use super::*;

    fn roots(c: &[f64], lo: f64, hi: f64) -> Vec<Root> {
        real_roots_in_interval(&UniPoly::<f64>::new(c.to_vec()), lo, hi, 1e-13).unwrap()
    }

    #[test]
    fn simple_quadratic() {
        let r = roots(&[-1.0, 0.0, 1.0], 0.0, 2.0);
        assert_eq!(r.len(), 1);
        assert!((r[0].value - 1.0).abs() < 1e-13 && !r[0].even);
    }

    #[test]
    fn tangential_root_is_even() {
        let r = roots(&[1.0, -2.0, 1.0], 0.0, 2.0);
        assert_eq!(r, vec![Root { value: 1.0, even: true }]);
    }

    #[test]
    fn triple_root_changes_sign() {
        // (s - 1/2)^3
        let r = roots(&[-0.125, 0.75, -1.5, 1.0], 0.0, 1.0);
        assert_eq!(r.len(), 1);
        assert!((r[0].value - 0.5).abs() < 1e-9 && !r[0].even);
    }

    #[test]
    fn quadratic_from_support_direction() {
        // s^2/2 - s + 1/4 on [0, 3]: roots 1 -+ 1/sqrt(2)
        let r = roots(&[0.25, -1.0, 0.5], 0.0, 3.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(r.len(), 2);
        assert!((r[0].value - (1.0 - h)).abs() < 1e-13);
        assert!((r[1].value - (1.0 + h)).abs() < 1e-13);
    }

    #[test]
    fn rejects_non_finite() {
        let p = UniPoly::<f64>::new(vec![1.0, f64::NAN]);
        assert!(real_roots_in_interval(&p, 0.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn exact_roots_with_multiplicity() {
        let p = RatPoly::from_roots(&[rat(1, 3), rat(1, 3), int(1), int(5)]);
        let r = real_roots_exact(&p, &int(0), &int(2), 1e-14);
        assert_eq!(r.len(), 2);
        assert!((r[0].value - 1.0 / 3.0).abs() < 1e-13 && r[0].even);
        assert!((r[1].value - 1.0).abs() < 1e-13 && !r[1].even);
        assert_eq!(count_real_roots(&p), 3);
        assert_eq!(all_real_roots(&p, 1e-12).len(), 3);
    }
}
