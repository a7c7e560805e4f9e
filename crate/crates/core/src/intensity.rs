//! Joint intensities `ρ_k = det[K(x_i, x_j)]` of the two processes, and the
//! algebraic identity relating their exponential-sum kernels.

use faer::{c64, Mat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::kernels::{cue_kernel, dyson_kernel};

/// Largest determinant size accepted.
pub const MAX_K: usize = 8;
/// Values in `[-ZERO_CLIP, 0)` are reported as zero.
pub const ZERO_CLIP: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntensityQuery {
    pub n: usize,
    pub m: usize,
    pub points: Vec<f64>,
}

impl IntensityQuery {
    pub fn new(n: usize, m: usize, points: Vec<f64>) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::OutOfRange {
                name: if n == 0 { "n" } else { "m" },
                value: 0.0,
                reason: "must be at least 1",
            });
        }
        let k = points.len();
        if !(1..=MAX_K).contains(&k) {
            return Err(Error::OutOfRange {
                name: "k",
                value: k as f64,
                reason: "number of points must be between 1 and 8",
            });
        }
        if let Some(&x) = points.iter().find(|x| !(-PI..PI).contains(*x)) {
            return Err(Error::OutOfRange {
                name: "point",
                value: x,
                reason: "must lie in [-π, π)",
            });
        }
        Ok(IntensityQuery { n, m, points })
    }

    pub fn k(&self) -> usize {
        self.points.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntensityPair {
    pub rho: f64,
    pub rho_m: f64,
}

impl IntensityPair {
    pub fn margin(&self) -> f64 {
        self.rho_m - self.rho
    }
}

fn clip(v: f64) -> f64 {
    if (-ZERO_CLIP..0.0).contains(&v) {
        0.0
    } else {
        v
    }
}

fn kernel_det(points: &[f64], kernel: impl Fn(f64, f64) -> f64) -> f64 {
    let k = points.len();
    Mat::<f64>::from_fn(k, k, |i, j| kernel(points[i], points[j])).determinant()
}

/// `ρ_k` and `ρ_k^{(m)}` at the query points, Lebesgue reference measure.
pub fn joint_intensity(q: &IntensityQuery) -> IntensityPair {
    let (n, m) = (q.n, q.m);
    IntensityPair {
        rho: clip(kernel_det(&q.points, |x, y| cue_kernel(n, 1, x, y))),
        rho_m: clip(kernel_det(&q.points, |x, y| cue_kernel(n, m, x, y))),
    }
}

/// Max entrywise gap between `[T^{(m)}(x_j, x_l)]` and
/// `(1/m) Σ_p D^p [T(x_j, x_l)] (D^p)*`, `D = diag(e^{i x_j / m})`.
pub fn verify_conjugation_identity(n: usize, m: usize, points: &[f64]) -> f64 {
    let k = points.len();
    let mf = m as f64;
    let lhs = Mat::<c64>::from_fn(k, k, |i, j| dyson_kernel(n, m, points[i], points[j]));
    let base = Mat::<c64>::from_fn(k, k, |i, j| dyson_kernel(n, 1, points[i], points[j]));
    let mut rhs = Mat::<c64>::zeros(k, k);
    for p in 0..m {
        let d = Mat::<c64>::from_fn(k, k, |i, j| {
            if i == j {
                c64::cis(p as f64 * points[i] / mf)
            } else {
                c64::new(0.0, 0.0)
            }
        });
        rhs += &d * &base * d.adjoint();
    }
    let scale = c64::new(1.0 / mf, 0.0);
    let mut worst: f64 = 0.0;
    for i in 0..k {
        for j in 0..k {
            worst = worst.max((lhs[(i, j)] - rhs[(i, j)] * scale).norm());
        }
    }
    worst
}

/// `det[T(x_i, x_j)] / (2π)^k`: the intensity through the exponential-sum
/// kernel, normalised to Lebesgue measure.
pub fn dyson_intensity(n: usize, m: usize, points: &[f64]) -> f64 {
    let k = points.len();
    let t = Mat::<c64>::from_fn(k, k, |i, j| dyson_kernel(n, m, points[i], points[j]));
    t.determinant().re / (2.0 * PI).powi(k as i32)
}

/// One audited query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntensityAudit {
    pub query: IntensityQuery,
    pub pair: IntensityPair,
}

impl IntensityAudit {
    pub const CSV_HEADER: &'static str = "n,m,k,points,rho,rho_m,margin";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},\"{}\",{:.12e},{:.12e},{:.12e}",
            self.query.n,
            self.query.m,
            self.query.k(),
            serde_json::to_string(&self.query.points).unwrap(),
            self.pair.rho,
            self.pair.rho_m,
            self.pair.margin()
        )
    }
}

/// Seeded random queries: `n`, `m` and `k` drawn from the given menus,
/// points uniform in `[-π, π)`.
pub fn random_queries(seed: u64, count: usize, ns: &[usize], ms: &[usize], ks: &[usize]) -> Vec<IntensityQuery> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = ns[rng.random_range(0..ns.len())];
            let m = ms[rng.random_range(0..ms.len())];
            let k = ks[rng.random_range(0..ks.len())];
            let points = (0..k).map(|_| rng.random_range(-PI..PI)).collect();
            IntensityQuery::new(n, m, points).expect("menu values are valid")
        })
        .collect()
}

pub fn audit(queries: Vec<IntensityQuery>) -> Vec<IntensityAudit> {
    queries
        .into_iter()
        .map(|query| IntensityAudit {
            pair: joint_intensity(&query),
            query,
        })
        .collect()
}
