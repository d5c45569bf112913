//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library's numerics.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qf(x: f64) -> Q {
    Q::from_float(x).unwrap()
}

pub fn qpow(x: &Q, n: u32) -> Q {
    (0..n).fold(Q::one(), |a, _| a * x)
}

pub fn fact(n: u64) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

pub fn fact_q(n: u64) -> Q {
    (1..=n).fold(Q::one(), |a, k| a * Q::from_integer(BigInt::from(k)))
}

/// Plain recursive adaptive Simpson.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Simpson on equal sub-intervals, so kinks cannot hide from the first pass.
pub fn simpson_pieces<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, pieces: usize, tol: f64) -> f64 {
    let h = (b - a) / pieces as f64;
    (0..pieces)
        .map(|i| simpson(f, a + i as f64 * h, a + (i + 1) as f64 * h, tol / pieces as f64))
        .sum()
}

/// `<y, xi(s)>` for one block: `sum_k y_k s^(r-1-k)/(r-1-k)!`.
pub fn channel(y: &[f64], s: f64) -> f64 {
    let r = y.len();
    y.iter()
        .enumerate()
        .map(|(k, yk)| yk * s.powi((r - 1 - k) as i32) / fact((r - 1 - k) as u64))
        .sum()
}

/// `Phi(t) x` for one block.
pub fn free_block(x: &[f64], t: f64) -> Vec<f64> {
    let r = x.len();
    (0..r)
        .map(|k| (k..r).map(|l| x[l] * t.powi((l - k) as i32) / fact((l - k) as u64)).sum())
        .collect()
}

/// One block of the support function by quadrature.
pub fn support_block_quad(y: &[f64], x0: &[f64], alpha: f64, beta: f64, t: f64) -> f64 {
    let mu = 0.5 * (beta - alpha);
    let nu = 0.5 * (beta + alpha);
    let free: f64 = y.iter().zip(free_block(x0, t)).map(|(a, b)| a * b).sum();
    let f = |s: f64| {
        let w = channel(y, s);
        nu * w + mu * w.abs()
    };
    free + simpson_pieces(&f, 0.0, t, 64, 1e-13)
}

/// Width `2 mu int_0^t |<eta, xi(s)>| ds` of a single block by quadrature.
pub fn width_quad(eta: &[f64], mu: f64, t: f64) -> f64 {
    2.0 * mu * simpson_pieces(&|s| channel(eta, s).abs(), 0.0, t, 32, 1e-14)
}

/// `I_0(2)` summed until the terms vanish in double precision.
pub fn i0_of_two() -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    let mut k = 0.0;
    while term > 0.0 {
        sum += term;
        k += 1.0;
        term /= k * k;
    }
    sum
}

/// Brute-force `sum_{0 <= i_1 < ... < i_r <= n} prod_{a<b} (i_b - i_a)`.
pub fn vandermonde_sum(r: usize, n: usize) -> BigInt {
    fn rec(r: usize, n: usize, start: usize, cur: &mut Vec<i64>, acc: &mut BigInt) {
        if cur.len() == r {
            let mut p = BigInt::one();
            for b in 0..r {
                for a in 0..b {
                    p *= cur[b] - cur[a];
                }
            }
            *acc += p;
            return;
        }
        for i in start..=n {
            cur.push(i as i64);
            rec(r, n, i + 1, cur, acc);
            cur.pop();
        }
    }
    let mut acc = BigInt::zero();
    rec(r, n, 0, &mut Vec::new(), &mut acc);
    acc
}

/// Leading coefficient of the degree-`deg` polynomial through `(n, v[n])`,
/// `n = 0, 1, ...`, via forward differences; `None` if higher differences
/// do not vanish.
pub fn leading_coefficient(values: &[BigInt], deg: usize) -> Option<Q> {
    let mut diffs: Vec<BigInt> = values.to_vec();
    let mut lead = None;
    for level in 1..values.len() {
        diffs = diffs.windows(2).map(|w| &w[1] - &w[0]).collect();
        if level == deg {
            if diffs.iter().any(|v| v != &diffs[0]) {
                return None;
            }
            lead = Some(Q::from_integer(diffs[0].clone()) / fact_q(deg as u64));
        }
        if level > deg && diffs.iter().any(|v| !v.is_zero()) {
            return None;
        }
    }
    lead
}
