//! Dense univariate polynomials with ascending coefficients.

use super::rational::{sign, Rational};
use num_traits::{One, Zero};
use std::ops::{Add, Mul, Neg, Sub};

/// `c[0] + c[1] x + ... + c[n] x^n`; trailing zeros are trimmed, so the zero
/// polynomial is the empty sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct UniPoly<T> {
    coeffs: Vec<T>,
}

pub type RatPoly = UniPoly<Rational>;

impl<T> UniPoly<T> {
    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }
}

impl UniPoly<f64> {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    /// Running error bound for Horner evaluation at `x`.
    pub fn eval_error_bound(&self, x: f64) -> f64 {
        let ax = x.abs();
        let mag = self.coeffs.iter().rev().fold(0.0, |acc, c: &f64| acc * ax + c.abs());
        4.0 * (self.coeffs.len() as f64 + 1.0) * f64::EPSILON * mag
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        )
    }

    /// Antiderivative vanishing at zero.
    pub fn antiderivative(&self) -> Self {
        let mut c = Vec::with_capacity(self.coeffs.len() + 1);
        c.push(0.0);
        c.extend(self.coeffs.iter().enumerate().map(|(k, v)| v / (k + 1) as f64));
        Self::new(c)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    /// Exact rational image of the coefficients.
    pub fn to_rational(&self) -> Option<RatPoly> {
        self.coeffs
            .iter()
            .map(|&c| Rational::from_float(c))
            .collect::<Option<Vec<_>>>()
            .map(RatPoly::new)
    }
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn sign_at(&self, x: &Rational) -> i32 {
        sign(&self.eval(x))
    }

    /// Sign as `x -> +inf` (`positive`) or `x -> -inf`.
    pub fn sign_at_infinity(&self, positive: bool) -> i32 {
        match self.coeffs.last() {
            None => 0,
            Some(lc) => {
                let s = sign(lc);
                if positive || self.coeffs.len() % 2 == 1 {
                    s
                } else {
                    -s
                }
            }
        }
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer(k.into()))
                .collect(),
        )
    }

    pub fn to_f64(&self) -> UniPoly<f64> {
        UniPoly::<f64>::new(self.coeffs.iter().map(crate::numeric::ratio_to_f64).collect())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Scaled to leading coefficient one.
    pub fn monic(&self) -> Self {
        match self.coeffs.last() {
            None => self.clone(),
            Some(lc) => self.scale(&lc.recip()),
        }
    }

    /// Euclidean division `self = q * other + r`.
    pub fn div_rem(&self, other: &Self) -> (Self, Self) {
        let dd = other.degree().expect("division by the zero polynomial");
        let lc = other.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        let n = self.coeffs.len();
        if n <= dd {
            return (Self::new(vec![]), self.clone());
        }
        let mut quo = vec![Rational::zero(); n - dd];
        for i in (0..n - dd).rev() {
            let q = &rem[i + dd] / &lc;
            if !q.is_zero() {
                for (k, c) in other.coeffs.iter().enumerate() {
                    rem[i + k] -= &q * c;
                }
            }
            quo[i] = q;
        }
        rem.truncate(dd);
        (Self::new(quo), Self::new(rem))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Yun's square-free factorization: `self = c * prod_i f_i^i`, returned as
    /// `(i, f_i)` for the non-constant factors.
    pub fn square_free_factors(&self) -> Vec<(usize, Self)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let dp = self.derivative();
        let a0 = self.gcd(&dp);
        let mut b = self.div_rem(&a0).0;
        let mut c = dp.div_rem(&a0).0;
        let mut d = &c - &b.derivative();
        let mut i = 1;
        while b.degree().unwrap_or(0) > 0 {
            let a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((i, a.clone()));
            }
            b = b.div_rem(&a).0;
            c = d.div_rem(&a).0;
            d = &c - &b.derivative();
            i += 1;
        }
        out
    }

    /// Sturm sequence of `self` (assumed square-free for root counting).
    pub fn sturm_sequence(&self) -> Vec<Self> {
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let r = seq[n - 2].div_rem(&seq[n - 1]).1;
            if r.is_zero() {
                break;
            }
            seq.push(-r);
        }
        seq
    }
}

/// Number of sign changes in a Sturm sequence at `x` (`None` = at +inf/-inf
/// selected by `pos_inf`).
pub(crate) fn sign_variations(seq: &[RatPoly], x: Option<&Rational>, pos_inf: bool) -> usize {
    let mut last = 0;
    let mut count = 0;
    for p in seq {
        let s = match x {
            Some(v) => p.sign_at(v),
            None => p.sign_at_infinity(pos_inf),
        };
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

impl<'a> Add<&'a RatPoly> for &'a RatPoly {
    type Output = RatPoly;
    fn add(self, rhs: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let z = Rational::zero();
        RatPoly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) + rhs.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }
}

impl<'a> Sub<&'a RatPoly> for &'a RatPoly {
    type Output = RatPoly;
    fn sub(self, rhs: &RatPoly) -> RatPoly {
        self + &(-rhs.clone())
    }
}

impl Neg for RatPoly {
    type Output = RatPoly;
    fn neg(self) -> RatPoly {
        RatPoly::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl<'a> Mul<&'a RatPoly> for &'a RatPoly {
    type Output = RatPoly;
    fn mul(self, rhs: &RatPoly) -> RatPoly {
        if self.is_zero() || rhs.is_zero() {
            return RatPoly::new(vec![]);
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::new(out)
    }
}

impl RatPoly {
    /// `prod (x - r_i)`.
    pub fn from_roots(roots: &[Rational]) -> Self {
        roots.iter().fold(Self::constant(Rational::one()), |acc, r| {
            &acc * &Self::new(vec![-r.clone(), Rational::one()])
        })
    }
}
