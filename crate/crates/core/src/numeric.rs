//! Shared numeric helpers: exact factorial tables, compensated summation and
//! one-dimensional quadrature.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use once_cell::sync::Lazy;

const TABLE_LEN: usize = 172;

static FACTORIALS: Lazy<Vec<BigUint>> = Lazy::new(|| {
    let mut out = Vec::with_capacity(TABLE_LEN);
    let mut acc = BigUint::one();
    out.push(acc.clone());
    for k in 1..TABLE_LEN {
        acc *= BigUint::from(k);
        out.push(acc.clone());
    }
    out
});

static INV_FACTORIALS_F64: Lazy<Vec<f64>> = Lazy::new(|| {
    FACTORIALS
        .iter()
        .map(|f| ratio_to_f64(&BigRational::new(BigInt::one(), BigInt::from(f.clone()))))
        .collect()
});

/// Exact `n!`.
pub fn factorial(n: usize) -> BigUint {
    if n < TABLE_LEN {
        return FACTORIALS[n].clone();
    }
    let mut acc = FACTORIALS[TABLE_LEN - 1].clone();
    for k in TABLE_LEN..=n {
        acc *= BigUint::from(k);
    }
    acc
}

/// `n!` as an exact rational.
pub fn factorial_rational(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(factorial(n)))
}

/// `1/n!` rounded once from the exact rational.
pub fn inv_factorial(n: usize) -> f64 {
    if n < TABLE_LEN {
        INV_FACTORIALS_F64[n]
    } else {
        0.0
    }
}

/// `s^k / k!` in floating point.
#[inline]
pub fn power_over_factorial(s: f64, k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    s.powi(k as i32) * inv_factorial(k)
}

/// Correctly rounded conversion of an exact rational to `f64`.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_zero() {
            0.0
        } else if (r.numer() < &BigInt::zero()) == (r.denom() < &BigInt::zero()) {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        }
    })
}

/// Exact rational representation of a finite `f64`.
pub fn f64_to_ratio(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

/// Natural logarithm of a (possibly huge) positive integer.
pub fn ln_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().map(f64::ln).unwrap_or(f64::INFINITY);
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Kahan–Babuška compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = KahanSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

pub fn kahan_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<KahanSum>().value()
}

const MAX_SIMPSON_DEPTH: u32 = 48;

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, MAX_SIMPSON_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol || (m - a) <= f64::EPSILON * m.abs().max(1.0) {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson over `[a, b]` after splitting at the given interior
/// breakpoints (kinks of the integrand). The tolerance is shared across pieces
/// in proportion to their length.
pub fn adaptive_simpson_split<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    tol: f64,
) -> f64 {
    let nodes = split_nodes(a, b, breakpoints);
    let len = b - a;
    kahan_sum(
        nodes
            .windows(2)
            .map(|w| adaptive_simpson(f, w[0], w[1], tol * (w[1] - w[0]) / len)),
    )
}

pub(crate) fn split_nodes(a: f64, b: f64, breakpoints: &[f64]) -> Vec<f64> {
    let mut nodes = Vec::with_capacity(breakpoints.len() + 2);
    nodes.push(a);
    let mut inner: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x > a && x < b)
        .collect();
    inner.sort_by(|x, y| x.partial_cmp(y).unwrap());
    for x in inner {
        if x - nodes.last().unwrap() > 1e-14 * (b - a) {
            nodes.push(x);
        }
    }
    if b - nodes.last().unwrap() > 1e-14 * (b - a) || nodes.len() == 1 {
        nodes.push(b);
    } else {
        *nodes.last_mut().unwrap() = b;
    }
    nodes
}

/// 8-point Gauss–Legendre nodes and weights on `[-1, 1]`.
pub const GAUSS_LEGENDRE_8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (-0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
];

/// Composite 8-point Gauss–Legendre rule with `panels` equal panels per piece
/// between breakpoints.
pub fn gauss_legendre_split<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    panels: usize,
) -> f64 {
    let nodes = split_nodes(a, b, breakpoints);
    let mut acc = KahanSum::new();
    for w in nodes.windows(2) {
        let h = (w[1] - w[0]) / panels as f64;
        for p in 0..panels {
            let lo = w[0] + p as f64 * h;
            let mid = lo + 0.5 * h;
            for &(x, wt) in &GAUSS_LEGENDRE_8 {
                acc.add(0.5 * h * wt * f(mid + 0.5 * h * x));
            }
        }
    }
    acc.value()
}

/// Binomial coefficient as `f64` (exact for moderate arguments).
pub fn binomial_f64(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}
