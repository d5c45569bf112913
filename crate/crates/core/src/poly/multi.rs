//! Sparse multivariate polynomials with exact rational coefficients.

use super::rational::{parse, Rational};
use crate::error::{ReachError, Result};
use crate::numeric::ratio_to_f64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub type Exponent = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    vars: Vec<String>,
    terms: BTreeMap<Exponent, Rational>,
}

impl MultiPoly {
    pub fn zero(vars: &[String]) -> Self {
        Self {
            vars: vars.to_vec(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &[String], c: Rational) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(vec![0; vars.len()], c);
        }
        p
    }

    pub fn one(vars: &[String]) -> Self {
        Self::constant(vars, Rational::one())
    }

    /// The indeterminate `vars[i]`.
    pub fn var(vars: &[String], i: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        Self::monomial(vars, e, Rational::one())
    }

    pub fn monomial(vars: &[String], e: Exponent, c: Rational) -> Self {
        assert_eq!(e.len(), vars.len(), "exponent arity");
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(e, c);
        }
        p
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, merging repeats.
    pub fn from_terms(vars: &[String], terms: impl IntoIterator<Item = (Exponent, Rational)>) -> Result<Self> {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            if e.len() != vars.len() {
                return Err(ReachError::Shape(format!(
                    "exponent {:?} has arity {}, expected {}",
                    e,
                    e.len(),
                    vars.len()
                )));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    /// Variables named `prefix1 .. prefixN`.
    pub fn var_names(prefix: &str, n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("{prefix}{i}")).collect()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &[u32]) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    fn add_term(&mut self, e: Exponent, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        Self {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(&self.vars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.nvars());
        self.terms
            .iter()
            .map(|(e, c)| {
                ratio_to_f64(c)
                    * e.iter()
                        .zip(x)
                        .map(|(&k, &v)| v.powi(k as i32))
                        .product::<f64>()
            })
            .sum()
    }

    pub fn eval_exact(&self, x: &[Rational]) -> Rational {
        assert_eq!(x.len(), self.nvars());
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (&k, v) in e.iter().zip(x) {
                for _ in 0..k {
                    t *= v;
                }
            }
            acc += t;
        }
        acc
    }

    /// Replaces `vars[i]` by `images[i]`; the result lives in the images' ring.
    pub fn substitute(&self, images: &[MultiPoly]) -> Result<MultiPoly> {
        if images.len() != self.nvars() {
            return Err(ReachError::Shape(format!(
                "{} images for {} variables",
                images.len(),
                self.nvars()
            )));
        }
        let Some(target) = images.first().map(|p| p.vars.clone()) else {
            return Ok(self.clone());
        };
        if images.iter().any(|p| p.vars != target) {
            return Err(ReachError::Shape("images use different variable sets".into()));
        }
        let mut powers: Vec<Vec<MultiPoly>> = images.iter().map(|p| vec![MultiPoly::one(&p.vars)]).collect();
        let mut out = MultiPoly::zero(&target);
        for (e, c) in &self.terms {
            let mut t = MultiPoly::constant(&target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap() * &images[i];
                    powers[i].push(next);
                }
                if k > 0 {
                    t = &t * &powers[i][k as usize];
                }
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Leading term under lexicographic order with variable priority `order`
    /// (`order[0]` compared first).
    pub fn leading_term(&self, order: &[usize]) -> Option<(&Exponent, &Rational)> {
        self.terms.iter().max_by(|a, b| lex_cmp(a.0, b.0, order))
    }

    /// Scales so the lex-leading coefficient under `order` is one.
    pub fn normalized(&self, order: &[usize]) -> Self {
        match self.leading_term(order) {
            None => self.clone(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }

    /// `q` with `self = q * divisor`, if the division is exact.
    pub fn exact_div(&self, divisor: &MultiPoly) -> Result<MultiPoly> {
        let order: Vec<usize> = (0..self.nvars()).collect();
        let Some((de, dc)) = divisor.leading_term(&order) else {
            return Err(ReachError::InvalidInput("division by zero polynomial".into()));
        };
        let (de, dc) = (de.clone(), dc.clone());
        let mut rem = self.clone();
        let mut quo = MultiPoly::zero(&self.vars);
        while let Some((re, rc)) = rem.leading_term(&order) {
            if !re.iter().zip(&de).all(|(a, b)| a >= b) {
                return Err(ReachError::InvalidInput("polynomial division is not exact".into()));
            }
            let e: Exponent = re.iter().zip(&de).map(|(a, b)| a - b).collect();
            let m = MultiPoly::monomial(&self.vars, e, rc / &dc);
            rem = &rem - &(&m * divisor);
            quo = &quo + &m;
        }
        Ok(quo)
    }

    /// Terms sorted by descending lex order under `order`, for display.
    fn sorted_terms(&self, order: &[usize]) -> Vec<(&Exponent, &Rational)> {
        let mut t: Vec<_> = self.terms.iter().collect();
        t.sort_by(|a, b| lex_cmp(b.0, a.0, order));
        t
    }

    /// Human-readable form with terms in descending lex order under `order`.
    pub fn display_with(&self, order: &[usize]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (e, c)) in self.sorted_terms(order).into_iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(v, &k)| {
                    if k == 1 {
                        self.vars[v].clone()
                    } else {
                        format!("{}^{}", self.vars[v], k)
                    }
                })
                .collect();
            if mono.is_empty() {
                s.push_str(&mag.to_string());
            } else if mag.is_one() {
                s.push_str(&mono.join("*"));
            } else {
                s.push_str(&format!("{}*{}", mag, mono.join("*")));
            }
        }
        s
    }
}

fn lex_cmp(a: &[u32], b: &[u32], order: &[usize]) -> Ordering {
    for &i in order {
        match a[i].cmp(&b[i]) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let order: Vec<usize> = (0..self.nvars()).rev().collect();
        f.write_str(&self.display_with(&order))
    }
}

fn check_ring(a: &MultiPoly, b: &MultiPoly) {
    assert_eq!(a.vars, b.vars, "polynomials over different variable sets");
}

impl<'a> Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        check_ring(self, rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        check_ring(self, rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&-Rational::one())
    }
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        check_ring(self, rhs);
        let mut out = MultiPoly::zero(&self.vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Exponent = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDoc {
    e: Vec<u32>,
    c: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyDoc {
    vars: Vec<String>,
    terms: Vec<TermDoc>,
}

impl Serialize for MultiPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let order: Vec<usize> = (0..self.nvars()).rev().collect();
        PolyDoc {
            vars: self.vars.clone(),
            terms: self
                .sorted_terms(&order)
                .into_iter()
                .map(|(e, c)| TermDoc {
                    e: e.clone(),
                    c: c.to_string(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = PolyDoc::deserialize(d)?;
        let terms = doc
            .terms
            .into_iter()
            .map(|t| parse(&t.c).map(|c| (t.e, c)))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        MultiPoly::from_terms(&doc.vars, terms).map_err(serde::de::Error::custom)
    }
}

/// Coefficients `A_0 .. A_order` of `exp(-sum_k lambda_k tau^k / k)`.
///
/// Uses `k A_k = -sum_{i=1}^{min(k,d)} lambda_i A_{k-i}`, which follows from
/// differentiating the series in `tau`.
pub fn series_exp(lambdas: &[MultiPoly], order: usize) -> Result<Vec<MultiPoly>> {
    if order < 1 {
        return Err(ReachError::OutOfRange {
            what: "order",
            value: order as f64,
            lo: 1.0,
            hi: f64::INFINITY,
        });
    }
    let Some(first) = lambdas.first() else {
        return Err(ReachError::InvalidInput("series_exp needs at least one coefficient".into()));
    };
    let vars = first.vars.clone();
    let mut a = vec![MultiPoly::one(&vars)];
    for k in 1..=order {
        let mut acc = MultiPoly::zero(&vars);
        for i in 1..=k.min(lambdas.len()) {
            acc = &acc + &(&lambdas[i - 1] * &a[k - i]);
        }
        a.push(acc.scale(&Rational::new((-1).into(), (k as i64).into())));
    }
    Ok(a)
}

/// `series_exp` over fresh symbols `l1 .. ld`.
pub fn series_exp_symbolic(d: usize, order: usize) -> Result<Vec<MultiPoly>> {
    let vars = MultiPoly::var_names("l", d);
    let lambdas: Vec<MultiPoly> = (0..d).map(|i| MultiPoly::var(&vars, i)).collect();
    series_exp(&lambdas, order)
}

/// Exact determinant of a square matrix of polynomials.
///
/// Cofactor expansion up to size 4, fraction-free Bareiss elimination beyond.
pub fn poly_matrix_det(m: &[Vec<MultiPoly>]) -> Result<MultiPoly> {
    let n = m.len();
    if n == 0 {
        return Err(ReachError::Shape("empty matrix".into()));
    }
    if let Some(i) = m.iter().position(|row| row.len() != n) {
        return Err(ReachError::Shape(format!("row {i} has {} entries, expected {n}", m[i].len())));
    }
    let vars = m[0][0].vars.clone();
    if m.iter().flatten().any(|p| p.vars != vars) {
        return Err(ReachError::Shape("entries use different variable sets".into()));
    }
    if n <= 4 {
        Ok(cofactor(m))
    } else {
        bareiss(m)
    }
}

fn cofactor(m: &[Vec<MultiPoly>]) -> MultiPoly {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    if n == 2 {
        return &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]);
    }
    let mut acc = MultiPoly::zero(&m[0][0].vars);
    for col in 0..n {
        if m[0][col].is_zero() {
            continue;
        }
        let minor: Vec<Vec<MultiPoly>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != col)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        let term = &m[0][col] * &cofactor(&minor);
        acc = if col % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

fn bareiss(m: &[Vec<MultiPoly>]) -> Result<MultiPoly> {
    let n = m.len();
    let vars = m[0][0].vars.clone();
    let mut a: Vec<Vec<MultiPoly>> = m.to_vec();
    let mut prev = MultiPoly::one(&vars);
    let mut negate = false;
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    negate = !negate;
                }
                None => return Ok(MultiPoly::zero(&vars)),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.exact_div(&prev)?;
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    Ok(if negate { -&det } else { det })
}
