//! Zonotopes, the Riemann-sum approximants of the reach set and exact
//! zonotope volumes.

use crate::error::{ReachError, Result};
use crate::linalg::{det_in_place, dot, norm2};
use crate::numeric::{binomial_f64, KahanSum};
use crate::rng;
use crate::system::{xi_block, ReachSpec};
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Direct enumeration cap on the number of generator subsets.
const ENUMERATION_LIMIT: f64 = 1e6;
/// Cap on the number of planar sub-problems spawned by the projection recursion.
const RECURSION_LIMIT: f64 = 2e7;
const SUBSET_SAMPLES: usize = 1 << 18;
const SUBSET_SEED: u64 = 0x5EED_2047;

/// `center + sum_i [-1, 1] g_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Zonotope {
    pub center: Vec<f64>,
    pub generators: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ApproxMode {
    InnerSample,
    OuterPad,
}

impl std::str::FromStr for ApproxMode {
    type Err = ReachError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inner-sample" => Ok(ApproxMode::InnerSample),
            "outer-pad" => Ok(ApproxMode::OuterPad),
            _ => Err(ReachError::validation("mode", format!("expected inner-sample or outer-pad, got `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VolumeMethod {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZonotopeVolume {
    pub value: f64,
    /// Standard error of a sampled estimate, zero when exact.
    pub std_error: f64,
    pub method: VolumeMethod,
}

impl Zonotope {
    pub fn new(center: Vec<f64>, generators: Vec<Vec<f64>>) -> Result<Self> {
        let d = center.len();
        if let Some(g) = generators.iter().find(|g| g.len() != d) {
            return Err(ReachError::Shape(format!("generator has {} entries, expected {d}", g.len())));
        }
        Ok(Self { center, generators })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// `h_Z(y) = <y, c> + sum_i |<y, g_i>|`.
    pub fn support(&self, y: &[f64]) -> f64 {
        let mut acc = KahanSum::new();
        acc.add(dot(y, &self.center));
        for g in &self.generators {
            acc.add(dot(y, g).abs());
        }
        acc.value()
    }

    /// Width `2 sum_i |<y, g_i>|` in unit direction `y`.
    pub fn width(&self, y: &[f64]) -> f64 {
        2.0 * self.generators.iter().map(|g| dot(y, g).abs()).sum::<f64>()
    }
}

/// Riemann-sum zonotope of the reach set on `n` uniform steps.
///
/// `InnerSample` uses generators `(t/n) mu_j xi_j(i t/n)`, `i = 0..=n`.
/// `OuterPad` uses midpoint generators plus an axis-aligned box covering the
/// per-cell deviation of `xi_j`, so the result contains the reach set.
pub fn zonotope_approximant(spec: &ReachSpec, n: usize, mode: ApproxMode) -> Result<Zonotope> {
    let d = spec.d();
    if n < d {
        return Err(ReachError::Degenerate(format!("n = {n} is below the state dimension {d}")));
    }
    let t = spec.t;
    let h = t / n as f64;
    let mut gens = Vec::new();
    let mut pad = vec![0.0; d];
    for (j, &r) in spec.r().iter().enumerate() {
        let mu = spec.input.mu_j(j);
        if mu == 0.0 {
            continue;
        }
        let rng = spec.block(j);
        let mut push = |s: f64| {
            let mut g = vec![0.0; d];
            for (gi, xv) in g[rng.clone()].iter_mut().zip(xi_block(r, s)) {
                *gi = h * mu * xv;
            }
            gens.push(g);
        };
        match mode {
            ApproxMode::InnerSample => (0..=n).for_each(|i| push(i as f64 * h)),
            ApproxMode::OuterPad => {
                for i in 0..n {
                    let s = (i as f64 + 0.5) * h;
                    push(s);
                    // xi is coordinatewise nondecreasing and convex on s >= 0.
                    let hi = xi_block(r, s + 0.5 * h);
                    let mid = xi_block(r, s);
                    for (k, idx) in rng.clone().enumerate() {
                        pad[idx] += mu * h * (hi[k] - mid[k]);
                    }
                }
            }
        }
    }
    if mode == ApproxMode::OuterPad {
        for (k, &p) in pad.iter().enumerate() {
            if p > 0.0 {
                let mut g = vec![0.0; d];
                // One ulp-scale margin absorbs the rounding in the sums above.
                g[k] = p * (1.0 + 1e-12);
                gens.push(g);
            }
        }
    }
    Zonotope::new(spec.center(), gens)
}

/// Volume `2^d sum_{|S| = d} |det g_S|`, evaluated exactly where feasible and
/// by subset sampling otherwise.
pub fn zonotope_volume(z: &Zonotope) -> ZonotopeVolume {
    let d = z.dim();
    let gens: Vec<&Vec<f64>> = z.generators.iter().filter(|g| g.iter().any(|v| *v != 0.0)).collect();
    let mut value = 1.0;
    let mut var_rel = 0.0;
    let mut method = VolumeMethod::Exact;
    for comp in components(d, &gens) {
        let k = comp.coords.len();
        let local: Vec<Vec<f64>> = comp
            .gens
            .iter()
            .map(|&i| comp.coords.iter().map(|&c| gens[i][c]).collect())
            .collect();
        let v = volume_in(&local, k);
        if v.method == VolumeMethod::Sampled {
            method = VolumeMethod::Sampled;
        }
        if v.value == 0.0 {
            return ZonotopeVolume { value: 0.0, std_error: 0.0, method };
        }
        var_rel += (v.std_error / v.value).powi(2);
        value *= v.value;
    }
    if gens.is_empty() && d > 0 {
        value = 0.0;
    }
    ZonotopeVolume {
        value,
        std_error: value * var_rel.sqrt(),
        method,
    }
}

struct Component {
    coords: Vec<usize>,
    gens: Vec<usize>,
}

/// Splits generators into groups with disjoint coordinate support; the
/// zonotope is the Cartesian product of the groups.
fn components(d: usize, gens: &[&Vec<f64>]) -> Vec<Component> {
    let mut parent: Vec<usize> = (0..d).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut x = x;
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for g in gens {
        let nz: Vec<usize> = (0..d).filter(|&k| g[k] != 0.0).collect();
        for w in nz.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[a] = b;
        }
    }
    let mut out: Vec<Component> = Vec::new();
    let mut slot = vec![usize::MAX; d];
    for k in 0..d {
        let root = find(&mut parent, k);
        if slot[root] == usize::MAX {
            slot[root] = out.len();
            out.push(Component { coords: Vec::new(), gens: Vec::new() });
        }
        out[slot[root]].coords.push(k);
    }
    for (i, g) in gens.iter().enumerate() {
        if let Some(k) = (0..d).find(|&k| g[k] != 0.0) {
            let root = find(&mut parent, k);
            out[slot[root]].gens.push(i);
        }
    }
    out
}

fn volume_in(gens: &[Vec<f64>], k: usize) -> ZonotopeVolume {
    let exact = |value| ZonotopeVolume { value, std_error: 0.0, method: VolumeMethod::Exact };
    let n = gens.len();
    if n < k {
        return exact(0.0);
    }
    match k {
        0 => exact(1.0),
        1 => exact(2.0 * gens.iter().map(|g| g[0].abs()).sum::<f64>()),
        2 => exact(planar_area(gens)),
        _ if binomial_f64(n, k) <= ENUMERATION_LIMIT => exact(enumerate_volume(gens, k)),
        _ if (n as f64).powi(k as i32 - 2) <= RECURSION_LIMIT => exact(projection_volume(gens, k)),
        _ => sampled_volume(gens, k),
    }
}

/// Area of a planar zonotope: `4 sum_{i<j} |g_i x g_j|` in `O(n log n)`
/// after sorting by angle.
fn planar_area(gens: &[Vec<f64>]) -> f64 {
    let mut v: Vec<(f64, f64)> = gens
        .iter()
        .map(|g| if g[1] < 0.0 || (g[1] == 0.0 && g[0] < 0.0) { (-g[0], -g[1]) } else { (g[0], g[1]) })
        .filter(|g| g.0 != 0.0 || g.1 != 0.0)
        .collect();
    v.sort_by(|a, b| a.1.atan2(a.0).total_cmp(&b.1.atan2(b.0)));
    let (mut sx, mut sy) = (KahanSum::new(), KahanSum::new());
    let mut acc = KahanSum::new();
    for &(x, y) in &v {
        acc.add(sx.value() * y - sy.value() * x);
        sx.add(x);
        sy.add(y);
    }
    4.0 * acc.value()
}

fn enumerate_volume(gens: &[Vec<f64>], k: usize) -> f64 {
    let n = gens.len();
    let firsts: Vec<usize> = (0..=n - k).collect();
    let total: f64 = firsts
        .par_iter()
        .map(|&first| {
            let mut acc = KahanSum::new();
            let mut idx: Vec<usize> = (0..k).map(|i| first + i).collect();
            let mut buf = vec![0.0; k * k];
            loop {
                for (r, &i) in idx.iter().enumerate() {
                    buf[r * k..(r + 1) * k].copy_from_slice(&gens[i]);
                }
                acc.add(det_in_place(&mut buf, k).abs());
                // Advance the tail, keeping idx[0] fixed.
                let mut p = k - 1;
                loop {
                    if p == 0 {
                        return acc.value();
                    }
                    if idx[p] < n - k + p {
                        idx[p] += 1;
                        for q in p + 1..k {
                            idx[q] = idx[q - 1] + 1;
                        }
                        break;
                    }
                    p -= 1;
                }
            }
        })
        .collect::<Vec<f64>>()
        .into_iter()
        .collect::<KahanSum>()
        .value();
    2f64.powi(k as i32) * total
}

/// `vol_k(Z) = (2/k) sum_i |g_i| vol_{k-1}(P_i Z)` with `P_i` the orthogonal
/// projection along `g_i`.
fn projection_volume(gens: &[Vec<f64>], k: usize) -> f64 {
    let parts: Vec<f64> = gens
        .par_iter()
        .map(|g| {
            let len = norm2(g);
            if len == 0.0 {
                return 0.0;
            }
            let projected: Vec<Vec<f64>> = gens.iter().map(|h| project_out(g, len, h)).collect();
            len * volume_in(&projected, k - 1).value
        })
        .collect();
    2.0 / k as f64 * parts.into_iter().collect::<KahanSum>().value()
}

/// Coordinates of `h` in an orthonormal basis of `g^perp`, via the Householder
/// reflection taking `g` to a multiple of the last axis.
fn project_out(g: &[f64], len: f64, h: &[f64]) -> Vec<f64> {
    let k = g.len();
    let mut v = g.to_vec();
    let sgn = if g[k - 1] >= 0.0 { 1.0 } else { -1.0 };
    v[k - 1] += sgn * len;
    let vv = dot(&v, &v);
    let c = 2.0 * dot(&v, h) / vv;
    (0..k - 1).map(|i| h[i] - c * v[i]).collect()
}

fn sampled_volume(gens: &[Vec<f64>], k: usize) -> ZonotopeVolume {
    let n = gens.len();
    let chunks = 64;
    let per = SUBSET_SAMPLES / chunks;
    let stats: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut r = rng::stream(SUBSET_SEED, c as u64);
            let mut buf = vec![0.0; k * k];
            let mut pick = Vec::with_capacity(k);
            let (mut s1, mut s2) = (KahanSum::new(), KahanSum::new());
            for _ in 0..per {
                pick.clear();
                while pick.len() < k {
                    let i = r.random_range(0..n);
                    if !pick.contains(&i) {
                        pick.push(i);
                    }
                }
                for (row, &i) in pick.iter().enumerate() {
                    buf[row * k..(row + 1) * k].copy_from_slice(&gens[i]);
                }
                let v = det_in_place(&mut buf, k).abs();
                s1.add(v);
                s2.add(v * v);
            }
            (s1.value(), s2.value())
        })
        .collect();
    let m = (per * chunks) as f64;
    let mean = stats.iter().map(|s| s.0).sum::<f64>() / m;
    let var = (stats.iter().map(|s| s.1).sum::<f64>() / m - mean * mean).max(0.0) * m / (m - 1.0);
    let scale = 2f64.powi(k as i32) * binomial_f64(n, k);
    ZonotopeVolume {
        value: scale * mean,
        std_error: scale * (var / m).sqrt(),
        method: VolumeMethod::Sampled,
    }
}

/// Generator count up to which the diameter is found by enumerating sign
/// patterns.
pub const DIAMETER_ENUMERATION_MAX: usize = 20;

/// Diameter `2 max_s |sum_i s_i g_i|`.
///
/// Exact for at most [`DIAMETER_ENUMERATION_MAX`] generators. Larger
/// zonotopes use the fixed-point ascent `y <- sum sign(<y, g_i>) g_i` from
/// `start` and the coordinate axes, which never decreases the width.
pub fn zonotope_diameter(z: &Zonotope, start: Option<&[f64]>) -> f64 {
    let d = z.dim();
    let gens: Vec<&Vec<f64>> = z.generators.iter().filter(|g| g.iter().any(|v| *v != 0.0)).collect();
    let n = gens.len();
    if n == 0 {
        return 0.0;
    }
    if n <= DIAMETER_ENUMERATION_MAX {
        // Fixing the sign of the first generator halves the patterns.
        let best = (0u64..1u64 << (n - 1))
            .into_par_iter()
            .map(|mask| {
                let mut s = gens[0].clone();
                for (i, g) in gens.iter().enumerate().skip(1) {
                    let sg = if mask >> (i - 1) & 1 == 1 { -1.0 } else { 1.0 };
                    for (a, b) in s.iter_mut().zip(g.iter()) {
                        *a += sg * b;
                    }
                }
                norm2(&s)
            })
            .reduce(|| 0.0, f64::max);
        return 2.0 * best;
    }
    let mut starts: Vec<Vec<f64>> = (0..d)
        .map(|k| {
            let mut e = vec![0.0; d];
            e[k] = 1.0;
            e
        })
        .collect();
    if let Some(s) = start {
        starts.push(s.to_vec());
    }
    starts
        .par_iter()
        .map(|y0| {
            let mut y = y0.clone();
            let mut best = 0.0f64;
            for _ in 0..200 {
                let mut s = vec![0.0; d];
                for g in &gens {
                    let sg = if dot(&y, g) >= 0.0 { 1.0 } else { -1.0 };
                    for (a, b) in s.iter_mut().zip(g.iter()) {
                        *a += sg * b;
                    }
                }
                let ns = norm2(&s);
                if ns <= best * (1.0 + 1e-15) {
                    break;
                }
                best = ns;
                y = s.iter().map(|v| v / ns).collect();
            }
            best
        })
        .reduce(|| 0.0, f64::max)
        * 2.0
}
