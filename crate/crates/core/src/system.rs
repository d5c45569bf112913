//! Integrator systems, input boxes and reach-set specifications, together with
//! the state-transition matrix and the moment vectors `xi` and `zeta`.

use crate::error::{ReachError, Result};
use crate::linalg::Matrix;
use crate::numeric::{factorial_rational, inv_factorial, power_over_factorial};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::ops::Range;

/// Relative-degree vector `(r_1, ..., r_m)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct RelativeDegree {
    r: Vec<usize>,
    offsets: Vec<usize>,
}

impl RelativeDegree {
    pub fn new(r: &[usize]) -> Result<Self> {
        if r.is_empty() {
            return Err(ReachError::InvalidDegrees("empty degree list".into()));
        }
        if let Some(j) = r.iter().position(|&x| x == 0) {
            return Err(ReachError::InvalidDegrees(format!("r[{j}] must be at least 1")));
        }
        let mut offsets = Vec::with_capacity(r.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for &rj in r {
            acc += rj;
            offsets.push(acc);
        }
        Ok(Self {
            r: r.to_vec(),
            offsets,
        })
    }

    /// Parses signed degrees, rejecting non-positive entries.
    pub fn from_signed(r: &[i64]) -> Result<Self> {
        if let Some(j) = r.iter().position(|&x| x <= 0) {
            return Err(ReachError::InvalidDegrees(format!(
                "r[{j}] = {} must be at least 1",
                r[j]
            )));
        }
        Self::new(&r.iter().map(|&x| x as usize).collect::<Vec<_>>())
    }

    pub fn r(&self) -> &[usize] {
        &self.r
    }

    /// Total state dimension.
    pub fn d(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// Number of inputs.
    pub fn m(&self) -> usize {
        self.r.len()
    }

    /// State coordinates belonging to block `j`.
    pub fn block(&self, j: usize) -> Range<usize> {
        self.offsets[j]..self.offsets[j + 1]
    }
}

impl<'de> Deserialize<'de> for RelativeDegree {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            r: Vec<i64>,
        }
        let raw = Raw::deserialize(de)?;
        RelativeDegree::from_signed(&raw.r).map_err(serde::de::Error::custom)
    }
}

/// Block-diagonal chain of integrators `x' = A x + B u`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorSystem {
    pub degrees: RelativeDegree,
    pub a: Matrix,
    pub b: Matrix,
}

impl IntegratorSystem {
    pub fn d(&self) -> usize {
        self.degrees.d()
    }

    pub fn m(&self) -> usize {
        self.degrees.m()
    }
}

/// Builds the shift-block matrices `A` and `B` for the given degrees.
pub fn build_system(degrees: &RelativeDegree) -> IntegratorSystem {
    let d = degrees.d();
    let m = degrees.m();
    let mut a = Matrix::zeros(d, d);
    let mut b = Matrix::zeros(d, m);
    for j in 0..m {
        let blk = degrees.block(j);
        for i in blk.start..blk.end - 1 {
            a[(i, i + 1)] = 1.0;
        }
        b[(blk.end - 1, j)] = 1.0;
    }
    IntegratorSystem {
        degrees: degrees.clone(),
        a,
        b,
    }
}

/// `exp(A dt)`: each block is upper triangular with entries `dt^(l-k)/(l-k)!`.
pub fn state_transition(sys: &IntegratorSystem, dt: f64) -> Result<Matrix> {
    check_time("dt", dt)?;
    let d = sys.d();
    let mut phi = Matrix::zeros(d, d);
    for j in 0..sys.m() {
        let blk = sys.degrees.block(j);
        for k in blk.clone() {
            for l in k..blk.end {
                phi[(k, l)] = power_over_factorial(dt, l - k);
            }
        }
    }
    Ok(phi)
}

/// Exact rational `exp(A dt)`.
pub fn state_transition_exact(sys: &IntegratorSystem, dt: &BigRational) -> Result<Vec<Vec<BigRational>>> {
    if dt < &BigRational::zero() {
        return Err(ReachError::OutOfRange {
            what: "dt",
            value: crate::numeric::ratio_to_f64(dt),
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    let d = sys.d();
    let mut powers = vec![BigRational::one()];
    for p in 1..d {
        powers.push(&powers[p - 1] * dt);
    }
    let mut phi = vec![vec![BigRational::zero(); d]; d];
    for j in 0..sys.m() {
        let blk = sys.degrees.block(j);
        for k in blk.clone() {
            for l in k..blk.end {
                phi[k][l] = &powers[l - k] / factorial_rational(l - k);
            }
        }
    }
    Ok(phi)
}

fn check_time(what: &'static str, v: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(ReachError::Numeric(format!("{what} = {v}")));
    }
    if v < 0.0 {
        return Err(ReachError::OutOfRange {
            what,
            value: v,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    Ok(())
}

/// Per-channel input bounds `alpha <= u <= beta`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputBox {
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

impl InputBox {
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        if alpha.len() != beta.len() {
            return Err(ReachError::validation(
                "beta",
                format!("expected {} bounds, got {}", alpha.len(), beta.len()),
            ));
        }
        for (field, v) in [("alpha", &alpha), ("beta", &beta)] {
            if let Some(j) = v.iter().position(|x| !x.is_finite()) {
                return Err(ReachError::validation(field, format!("entry {j} is not finite")));
            }
        }
        if let Some(j) = (0..alpha.len()).find(|&j| alpha[j] > beta[j]) {
            return Err(ReachError::validation(
                "alpha",
                format!("alpha[{j}] = {} exceeds beta[{j}] = {}", alpha[j], beta[j]),
            ));
        }
        Ok(Self { alpha, beta })
    }

    /// The box `[-mu_j, mu_j]` per channel.
    pub fn symmetric(mu: &[f64]) -> Result<Self> {
        Self::new(mu.iter().map(|m| -m).collect(), mu.to_vec())
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn m(&self) -> usize {
        self.alpha.len()
    }

    /// Half-widths `(beta - alpha)/2`.
    pub fn mu(&self) -> Vec<f64> {
        (0..self.m()).map(|j| self.mu_j(j)).collect()
    }

    /// Midpoints `(beta + alpha)/2`.
    pub fn nu(&self) -> Vec<f64> {
        (0..self.m()).map(|j| self.nu_j(j)).collect()
    }

    pub fn mu_j(&self, j: usize) -> f64 {
        0.5 * (self.beta[j] - self.alpha[j])
    }

    pub fn nu_j(&self, j: usize) -> f64 {
        0.5 * (self.beta[j] + self.alpha[j])
    }
}

/// A forward reach-set query: system, input box, initial state and horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct ReachSpec {
    pub system: IntegratorSystem,
    pub input: InputBox,
    pub x0: Vec<f64>,
    pub t: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    schema: Option<u32>,
    r: Vec<i64>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    x0: Vec<f64>,
    t: f64,
}

pub const SPEC_SCHEMA_VERSION: u32 = 1;

impl ReachSpec {
    pub fn new(r: &[usize], alpha: Vec<f64>, beta: Vec<f64>, x0: Vec<f64>, t: f64) -> Result<Self> {
        let degrees = RelativeDegree::new(r)?;
        Self::from_parts(degrees, alpha, beta, x0, t)
    }

    /// Zero initial state and symmetric box `[-mu_j, mu_j]`.
    pub fn symmetric(r: &[usize], mu: &[f64], t: f64) -> Result<Self> {
        let d = r.iter().sum();
        Self::new(r, mu.iter().map(|m| -m).collect(), mu.to_vec(), vec![0.0; d], t)
    }

    fn from_parts(degrees: RelativeDegree, alpha: Vec<f64>, beta: Vec<f64>, x0: Vec<f64>, t: f64) -> Result<Self> {
        let m = degrees.m();
        if alpha.len() != m {
            return Err(ReachError::validation("alpha", format!("expected {m} entries, got {}", alpha.len())));
        }
        if beta.len() != m {
            return Err(ReachError::validation("beta", format!("expected {m} entries, got {}", beta.len())));
        }
        let input = InputBox::new(alpha, beta)?;
        if x0.len() != degrees.d() {
            return Err(ReachError::validation(
                "x0",
                format!("expected {} entries, got {}", degrees.d(), x0.len()),
            ));
        }
        if let Some(i) = x0.iter().position(|x| !x.is_finite()) {
            return Err(ReachError::validation("x0", format!("entry {i} is not finite")));
        }
        if !(t.is_finite() && t > 0.0) {
            return Err(ReachError::validation("t", format!("must be positive and finite, got {t}")));
        }
        Ok(Self {
            system: build_system(&degrees),
            input,
            x0,
            t,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SpecDoc = serde_json::from_str(text).map_err(|e| {
            let msg = e.to_string();
            let field = msg
                .split('`')
                .nth(1)
                .filter(|_| msg.contains("field"))
                .unwrap_or("spec")
                .to_string();
            ReachError::validation(field, msg)
        })?;
        if let Some(v) = doc.schema {
            if v != SPEC_SCHEMA_VERSION {
                return Err(ReachError::validation("schema", format!("unsupported schema version {v}")));
            }
        }
        let degrees = RelativeDegree::from_signed(&doc.r)?;
        Self::from_parts(degrees, doc.alpha, doc.beta, doc.x0, doc.t)
    }

    pub fn to_json(&self) -> String {
        let doc = SpecDoc {
            schema: Some(SPEC_SCHEMA_VERSION),
            r: self.r().iter().map(|&x| x as i64).collect(),
            alpha: self.input.alpha().to_vec(),
            beta: self.input.beta().to_vec(),
            x0: self.x0.clone(),
            t: self.t,
        };
        serde_json::to_string(&doc).expect("spec serializes")
    }

    pub fn r(&self) -> &[usize] {
        self.system.degrees.r()
    }

    pub fn d(&self) -> usize {
        self.system.d()
    }

    pub fn m(&self) -> usize {
        self.system.m()
    }

    pub fn block(&self, j: usize) -> Range<usize> {
        self.system.degrees.block(j)
    }

    /// Same system and inputs at a different horizon.
    pub fn with_t(&self, t: f64) -> Result<Self> {
        Self::from_parts(
            self.system.degrees.clone(),
            self.input.alpha().to_vec(),
            self.input.beta().to_vec(),
            self.x0.clone(),
            t,
        )
    }

    pub fn with_x0(&self, x0: Vec<f64>) -> Result<Self> {
        Self::from_parts(
            self.system.degrees.clone(),
            self.input.alpha().to_vec(),
            self.input.beta().to_vec(),
            x0,
            self.t,
        )
    }

    /// The single-input spec of block `j`.
    pub fn block_spec(&self, j: usize) -> Self {
        let rng = self.block(j);
        Self::new(
            &[self.r()[j]],
            vec![self.input.alpha()[j]],
            vec![self.input.beta()[j]],
            self.x0[rng].to_vec(),
            self.t,
        )
        .expect("block of a valid spec is valid")
    }

    /// `Phi(t) x0`.
    pub fn free_response(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.d()];
        for j in 0..self.m() {
            let rng = self.block(j);
            let x = phi_block_apply(self.r()[j], self.t, &self.x0[rng.clone()]);
            out[rng].copy_from_slice(&x);
        }
        out
    }

    /// Center of symmetry `Phi(t) x0 + sum_j nu_j zeta_j(t)`.
    pub fn center(&self) -> Vec<f64> {
        let mut c = self.free_response();
        for j in 0..self.m() {
            let nu = self.input.nu_j(j);
            let z = zeta_block(self.r()[j], 0.0, self.t);
            for (ci, zi) in c[self.block(j)].iter_mut().zip(z) {
                *ci += nu * zi;
            }
        }
        c
    }
}

/// `xi_j(s) = (s^(r-1)/(r-1)!, ..., s, 1)`.
pub fn xi_block(r: usize, s: f64) -> Vec<f64> {
    (0..r).map(|k| power_over_factorial(s, r - 1 - k)).collect()
}

/// Componentwise `(t1^n - t0^n)/n!` with `n = r - k + 1` for 1-based `k`.
pub fn zeta_block(r: usize, t0: f64, t1: f64) -> Vec<f64> {
    (0..r)
        .map(|k| {
            let n = (r - k) as i32;
            (t1.powi(n) - t0.powi(n)) * inv_factorial(r - k)
        })
        .collect()
}

/// `exp(A_j dt) x` for a single block.
pub fn phi_block_apply(r: usize, dt: f64, x: &[f64]) -> Vec<f64> {
    debug_assert_eq!(x.len(), r);
    (0..r)
        .map(|k| (k..r).map(|l| power_over_factorial(dt, l - k) * x[l]).sum())
        .collect()
}

/// Stacked `xi(s)`, optionally weighted blockwise by `mu_j`.
pub fn xi(spec: &ReachSpec, s: f64, scaled: bool) -> Result<Vec<f64>> {
    if !s.is_finite() || s < 0.0 || s > spec.t {
        return Err(ReachError::OutOfRange {
            what: "s",
            value: s,
            lo: 0.0,
            hi: spec.t,
        });
    }
    let mut out = Vec::with_capacity(spec.d());
    for (j, &rj) in spec.r().iter().enumerate() {
        let w = if scaled { spec.input.mu_j(j) } else { 1.0 };
        out.extend(xi_block(rj, s).into_iter().map(|v| w * v));
    }
    Ok(out)
}

/// Stacked `zeta(t0, t1) = int_{t0}^{t1} xi(s) ds`, optionally `mu`-weighted.
pub fn zeta(spec: &ReachSpec, t0: f64, t1: f64, scaled: bool) -> Result<Vec<f64>> {
    if !(t0.is_finite() && t1.is_finite()) {
        return Err(ReachError::Numeric(format!("zeta bounds ({t0}, {t1})")));
    }
    if t0 < 0.0 || t0 > t1 {
        return Err(ReachError::OutOfRange {
            what: "t0",
            value: t0,
            lo: 0.0,
            hi: t1,
        });
    }
    let mut out = Vec::with_capacity(spec.d());
    for (j, &rj) in spec.r().iter().enumerate() {
        let w = if scaled { spec.input.mu_j(j) } else { 1.0 };
        out.extend(zeta_block(rj, t0, t1).into_iter().map(|v| w * v));
    }
    Ok(out)
}
