//! Kolmogorov–Smirnov statistics, the exact Gaussian comparison of window
//! counts, and the Monte Carlo count comparison between the two processes.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::arcset::ArcSet;
use crate::counting::{count_distribution, CountDistribution};
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::operator;
use crate::sampler::sample_cue;

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KsKind {
    TwoSample,
    SampleVsGaussian,
    ExactVsGaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsReport {
    pub statistic: f64,
    pub kind: KsKind,
    pub sample_sizes: Vec<usize>,
    /// `(mean, variance)` of the reference Gaussian.
    pub gaussian_params: Option<(f64, f64)>,
}

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// `sup_t |F̂_x(t) - F̂_y(t)|`.
pub fn ks_two_sample(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::EmptySample);
    }
    let xs = sorted(xs);
    let ys = sorted(ys);
    let (nx, ny) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut sup: f64 = 0.0;
    while i < xs.len() || j < ys.len() {
        let v = match (xs.get(i), ys.get(j)) {
            (Some(&a), Some(&b)) => a.min(b),
            (Some(&a), None) => a,
            (None, Some(&b)) => b,
            (None, None) => unreachable!(),
        };
        while i < xs.len() && xs[i] <= v {
            i += 1;
        }
        while j < ys.len() && ys[j] <= v {
            j += 1;
        }
        sup = sup.max((i as f64 / nx - j as f64 / ny).abs());
    }
    Ok(sup)
}

/// `sup_t |F̂(t) - Φ((t - mean)/√variance)|`, checked on both sides of every atom.
pub fn ks_vs_gaussian(xs: &[f64], mean: f64, variance: f64) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::EmptySample);
    }
    if variance.is_nan() || variance <= 0.0 {
        return Err(Error::OutOfRange {
            name: "variance",
            value: variance,
            reason: "must be positive",
        });
    }
    let sd = variance.sqrt();
    let xs = sorted(xs);
    let n = xs.len() as f64;
    let mut sup: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        let v = xs[i];
        let below = i as f64 / n;
        while i < xs.len() && xs[i] == v {
            i += 1;
        }
        let at = i as f64 / n;
        let phi = normal_cdf((v - mean) / sd);
        sup = sup.max((below - phi).abs()).max((at - phi).abs());
    }
    Ok(sup)
}

/// Kolmogorov distance between an integer law and a Gaussian. The step CDF
/// is constant on `[k, k+1)`, so the supremum is reached at an integer from
/// one side or the other.
pub fn exact_ks_vs_gaussian(law: &CountDistribution, mean: f64, variance: f64) -> f64 {
    let sd = variance.sqrt();
    let mut sup: f64 = 0.0;
    let mut left = 0.0;
    for (k, cdf) in law.cdf_table().into_iter().enumerate() {
        let phi = normal_cdf((k as f64 - mean) / sd);
        sup = sup.max((left - phi).abs()).max((cdf - phi).abs());
        left = cdf;
    }
    sup
}

/// `sup_k |F̂(k) - F(k)|` between observed counts and an integer law. Both
/// CDFs are right-continuous steps on the integers.
pub fn ks_vs_law(counts: &[usize], law: &CountDistribution) -> Result<f64> {
    if counts.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut sorted_counts = counts.to_vec();
    sorted_counts.sort_unstable();
    let top = sorted_counts.last().copied().unwrap_or(0).max(law.max_count());
    let total = counts.len() as f64;
    let mut sup: f64 = 0.0;
    for k in 0..=top {
        let below = sorted_counts.partition_point(|&c| c <= k) as f64 / total;
        sup = sup.max((below - law.cdf(k as i64)).abs());
    }
    Ok(sup)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CltReport {
    pub n: usize,
    pub theta: f64,
    pub exact_ks: f64,
    /// `3√2 / (32 √log(e^{3/2} nθ))`.
    pub lower_bound: f64,
    /// `3√3 π / √log(2nθ/3π)`; infinite when the logarithm is not positive.
    pub upper_bound: f64,
    /// `3 / (32 √Var N_θ)`: half the guaranteed largest jump of the CDF.
    pub jump_bound: f64,
    pub variance: f64,
    /// `3π/n ≤ θ`: the sandwich is guaranteed.
    pub in_hypothesis: bool,
}

impl CltReport {
    pub const CSV_HEADER: &'static str = "n,theta,exact_ks,lower,upper,jump_bound,variance,in_hypothesis";

    pub fn sandwich_holds(&self) -> bool {
        self.lower_bound <= self.exact_ks && self.exact_ks <= self.upper_bound && self.jump_bound <= self.exact_ks
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{}",
            self.n,
            self.theta,
            self.exact_ks,
            self.lower_bound,
            self.upper_bound,
            self.jump_bound,
            self.variance,
            self.in_hypothesis
        )
    }
}

/// Exact Kolmogorov distance of the standardised count `N_θ` to `N(0, 1)`,
/// with the closed-form sandwich.
pub fn exact_gaussian_ks(n: usize, theta: f64, order_hint: Option<usize>) -> Result<CltReport> {
    if !(theta > 0.0 && theta <= PI / 2.0) {
        return Err(Error::OutOfRange {
            name: "theta",
            value: theta,
            reason: "must lie in (0, π/2]",
        });
    }
    let window = ArcSet::symmetric(theta)?;
    let kernel = KernelSpec::cue(n, 1);
    let quad = operator::Quadrature::for_kernel(&window, &kernel, order_hint)?;
    let law = count_distribution(&operator::spectrum(&kernel, &window, Some(quad))?)?;
    let mean = n as f64 * theta / PI;
    let exact_ks = exact_ks_vs_gaussian(&law, mean, law.variance);
    let nt = n as f64 * theta;
    let log_ratio = (2.0 * nt / (3.0 * PI)).ln();
    Ok(CltReport {
        n,
        theta,
        exact_ks,
        lower_bound: 3.0 * 2f64.sqrt() / (32.0 * (1.5 + nt.ln()).sqrt()),
        upper_bound: if log_ratio > 0.0 {
            3.0 * 3f64.sqrt() * PI / log_ratio.sqrt()
        } else {
            f64::INFINITY
        },
        jump_bound: 3.0 / (32.0 * law.variance.sqrt()),
        variance: law.variance,
        in_hypothesis: theta >= 3.0 * PI / n as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Figure1Config {
    pub n: usize,
    pub theta: f64,
    pub m: usize,
    pub trials: usize,
    pub seed: u64,
}

impl Figure1Config {
    pub const SMALL: Figure1Config = Figure1Config {
        n: 100,
        theta: 0.2,
        m: 2,
        trials: 500,
        seed: 2016,
    };
    pub const LARGE: Figure1Config = Figure1Config {
        n: 500,
        theta: 0.25,
        m: 2,
        trials: 200,
        seed: 2016,
    };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Figure1Result {
    pub config: Figure1Config,
    /// `nθ/π`.
    pub gaussian_mean: f64,
    /// Average of the two sample variances.
    pub gaussian_variance: f64,
    pub ks_n_vs_gaussian: f64,
    pub ks_m_vs_gaussian: f64,
    pub ks_two_sample: f64,
    pub counts_n: Vec<usize>,
    pub counts_m: Vec<usize>,
}

fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

/// Batch seed for one of the two ensembles in a comparison run.
pub fn derive_seed(master: u64, tag: u64) -> u64 {
    // splitmix64 finaliser
    let mut z = master ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Sample `N_θ` from `n x n` matrices and `N_θ^{(m)}` from `mn x mn`
/// matrices, then compute the three KS statistics.
pub fn reproduce_figure1(config: &Figure1Config) -> Result<Figure1Result> {
    if config.trials == 0 || config.n == 0 || config.m == 0 {
        return Err(Error::OutOfRange {
            name: "trials/n/m",
            value: 0.0,
            reason: "must be at least 1",
        });
    }
    let window = ArcSet::symmetric(config.theta)?;
    let small = sample_cue(config.n, config.trials, derive_seed(config.seed, 1))?;
    let large = sample_cue(config.m * config.n, config.trials, derive_seed(config.seed, 2))?;
    let counts_n = small.count_in_window(&window, 1)?;
    let counts_m = large.count_in_window(&window, config.m)?;
    let xn: Vec<f64> = counts_n.iter().map(|&c| c as f64).collect();
    let xm: Vec<f64> = counts_m.iter().map(|&c| c as f64).collect();
    let gaussian_mean = config.n as f64 * config.theta / PI;
    let gaussian_variance = 0.5 * (sample_variance(&xn) + sample_variance(&xm));
    Ok(Figure1Result {
        config: *config,
        gaussian_mean,
        gaussian_variance,
        ks_n_vs_gaussian: ks_vs_gaussian(&xn, gaussian_mean, gaussian_variance)?,
        ks_m_vs_gaussian: ks_vs_gaussian(&xm, gaussian_mean, gaussian_variance)?,
        ks_two_sample: ks_two_sample(&xn, &xm)?,
        counts_n,
        counts_m,
    })
}

fn ecdf(sorted_counts: &[usize], t: f64) -> f64 {
    let below = sorted_counts.partition_point(|&c| (c as f64) <= t);
    below as f64 / sorted_counts.len() as f64
}

impl Figure1Result {
    /// `t,F_N,F_Nm,Phi` on a grid of step 0.05 covering the observed counts.
    pub fn curves_csv(&self) -> String {
        let mut a = self.counts_n.clone();
        let mut b = self.counts_m.clone();
        a.sort_unstable();
        b.sort_unstable();
        let lo = a[0].min(b[0]) as f64 - 1.0;
        let hi = (*a.last().unwrap()).max(*b.last().unwrap()) as f64 + 1.0;
        let sd = self.gaussian_variance.sqrt();
        let steps = ((hi - lo) / 0.05).round() as usize;
        let mut out = String::from("t,F_N,F_Nm,Phi\n");
        for s in 0..=steps {
            let t = lo + s as f64 * 0.05;
            let phi = if sd > 0.0 {
                normal_cdf((t - self.gaussian_mean) / sd)
            } else {
                f64::NAN
            };
            writeln!(out, "{t:.2},{:.6},{:.6},{phi:.6}", ecdf(&a, t), ecdf(&b, t)).unwrap();
        }
        out
    }

    /// The three statistics as tagged reports.
    pub fn ks_reports(&self) -> [KsReport; 3] {
        let t = self.config.trials;
        let gauss = Some((self.gaussian_mean, self.gaussian_variance));
        [
            KsReport {
                statistic: self.ks_n_vs_gaussian,
                kind: KsKind::SampleVsGaussian,
                sample_sizes: vec![t],
                gaussian_params: gauss,
            },
            KsReport {
                statistic: self.ks_m_vs_gaussian,
                kind: KsKind::SampleVsGaussian,
                sample_sizes: vec![t],
                gaussian_params: gauss,
            },
            KsReport {
                statistic: self.ks_two_sample,
                kind: KsKind::TwoSample,
                sample_sizes: vec![t, t],
                gaussian_params: None,
            },
        ]
    }

    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "config": self.config,
            "gaussian_mean": self.gaussian_mean,
            "gaussian_variance": self.gaussian_variance,
            "ks": {
                "N_vs_gaussian": self.ks_n_vs_gaussian,
                "Nm_vs_gaussian": self.ks_m_vs_gaussian,
                "N_vs_Nm": self.ks_two_sample,
            },
            "version": env!("CARGO_PKG_VERSION"),
        })
    }
}
