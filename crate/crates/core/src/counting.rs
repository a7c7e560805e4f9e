//! Exact counting laws and distances between them.
//!
//! The number of points a determinantal process puts in a window is
//! distributed as a sum of independent Bernoulli variables whose success
//! probabilities are the eigenvalues of the restricted kernel operator.
//! [`CountDistribution`] holds that Poisson-binomial law; [`distance_report`]
//! compares the laws of the two CUE windows and records every intermediate
//! bound of the coupling argument.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::arcset::ArcSet;
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::operator::{self, hs_distance, OperatorSpectrum, Quadrature, DROP_THRESHOLD};

/// Slack allowed on every link of the distance chain.
pub const CHAIN_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountDistribution {
    /// `pmf[k] = P[N = k]`.
    pub pmf: Vec<f64>,
    /// `Σ λ` of the generating spectrum.
    pub mean: f64,
    /// `Σ λ(1 - λ)` of the generating spectrum.
    pub variance: f64,
}

impl CountDistribution {
    /// Point mass at `k`.
    pub fn delta(k: usize) -> Self {
        let mut pmf = vec![0.0; k + 1];
        pmf[k] = 1.0;
        CountDistribution {
            pmf,
            mean: k as f64,
            variance: 0.0,
        }
    }

    /// Poisson-binomial law of independent Bernoulli(`λ_j`) variables.
    pub fn from_probabilities(probs: &[f64]) -> Result<Self> {
        let mut pmf = vec![1.0];
        let mut shift = 0usize;
        let mut mean = 0.0;
        let mut variance = 0.0;
        for &p in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::SpectrumOutOfRange { value: p, tol: 0.0 });
            }
            mean += p;
            variance += p * (1.0 - p);
            if p < DROP_THRESHOLD {
                continue;
            }
            if p > 1.0 - DROP_THRESHOLD {
                shift += 1;
                continue;
            }
            let q = 1.0 - p;
            pmf.push(0.0);
            for k in (1..pmf.len()).rev() {
                pmf[k] = q * pmf[k] + p * pmf[k - 1];
            }
            pmf[0] *= q;
        }
        if shift > 0 {
            let mut shifted = vec![0.0; shift];
            shifted.extend(pmf);
            pmf = shifted;
        }
        Ok(CountDistribution { pmf, mean, variance })
    }

    /// Largest value with nonzero probability slot.
    pub fn max_count(&self) -> usize {
        self.pmf.len() - 1
    }

    pub fn prob(&self, k: usize) -> f64 {
        self.pmf.get(k).copied().unwrap_or(0.0)
    }

    /// `P[N ≤ k]`.
    pub fn cdf(&self, k: i64) -> f64 {
        if k < 0 {
            return 0.0;
        }
        let k = (k as usize).min(self.max_count());
        self.pmf[..=k].iter().sum::<f64>().min(1.0)
    }

    /// Cumulative sums `F(0), F(1), …, F(max)`.
    pub fn cdf_table(&self) -> Vec<f64> {
        self.pmf
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect()
    }

    /// Mean recomputed from the mass function.
    pub fn pmf_mean(&self) -> f64 {
        self.pmf.iter().enumerate().map(|(k, p)| k as f64 * p).sum()
    }

    /// Variance recomputed from the mass function.
    pub fn pmf_variance(&self) -> f64 {
        let mu = self.pmf_mean();
        self.pmf
            .iter()
            .enumerate()
            .map(|(k, p)| (k as f64 - mu).powi(2) * p)
            .sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.pmf.iter().sum()
    }
}

/// Exact law of the count from a kernel spectrum.
pub fn count_distribution(spectrum: &OperatorSpectrum) -> Result<CountDistribution> {
    CountDistribution::from_probabilities(&spectrum.eigenvalues)
}

/// `½ Σ |p_k - q_k|`.
pub fn tv_distance(p: &CountDistribution, q: &CountDistribution) -> f64 {
    let len = p.pmf.len().max(q.pmf.len());
    0.5 * (0..len).map(|k| (p.prob(k) - q.prob(k)).abs()).sum::<f64>()
}

/// `Σ_k |F_p(k) - F_q(k)|`, the Wasserstein-1 distance on the integers.
pub fn w1_distance(p: &CountDistribution, q: &CountDistribution) -> f64 {
    let len = p.pmf.len().max(q.pmf.len());
    let (mut fp, mut fq, mut total) = (0.0, 0.0, 0.0);
    for k in 0..len {
        fp += p.prob(k);
        fq += q.prob(k);
        total += (fp - fq).abs();
    }
    total
}

/// Sorted-spectrum discrepancies: `(Σ|Δλ|, ΣΔλ²)` after zero padding.
pub fn spectral_gaps(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(|x, y| y.total_cmp(x));
    b.sort_by(|x, y| y.total_cmp(x));
    let len = a.len().max(b.len());
    let (mut l1, mut l2) = (0.0, 0.0);
    for j in 0..len {
        let d = a.get(j).copied().unwrap_or(0.0) - b.get(j).copied().unwrap_or(0.0);
        l1 += d.abs();
        l2 += d * d;
    }
    (l1, l2)
}

/// `√(mn) |A| diam A / (6π)`.
pub fn closed_form_bound(n: usize, m: usize, window: &ArcSet) -> f64 {
    ((m * n) as f64).sqrt() * window.measure() * window.diameter() / (6.0 * PI)
}

/// Distances between the `n x n` window count and its `m`-dilated
/// counterpart, with every bound of the coupling argument.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub n: usize,
    pub m: usize,
    pub window: ArcSet,
    pub tv_exact: f64,
    pub w1_exact: f64,
    /// `Σ |λ_j - λ̃_j|` over nonincreasing spectra.
    pub coupling_bound: f64,
    /// `√(N Σ (λ_j - λ̃_j)²)`.
    pub cs_bound: f64,
    /// `√N ‖K - K̃‖_HS`.
    pub hs_bound: f64,
    pub closed_form_bound: f64,
    /// Almost-sure bound on both counts: `N = mn`.
    pub point_bound: usize,
    /// `|Σλ - Σλ̃|` on the shared grid.
    pub trace_gap: f64,
    pub quadrature_nodes: usize,
    pub law: CountDistribution,
    pub law_m: CountDistribution,
    pub spectrum: OperatorSpectrum,
    pub spectrum_m: OperatorSpectrum,
}

impl DistanceReport {
    /// Every link of `tv ≤ w1 ≤ coupling ≤ cs ≤ hs (≤ closed form)` that
    /// fails by more than [`CHAIN_SLACK`]. The closed-form link only applies
    /// when `diam A ≤ π`.
    pub fn chain_violations(&self) -> Vec<String> {
        let mut links = vec![
            ("tv", self.tv_exact, "w1", self.w1_exact),
            ("w1", self.w1_exact, "coupling", self.coupling_bound),
            ("coupling", self.coupling_bound, "cs", self.cs_bound),
            ("cs", self.cs_bound, "hs", self.hs_bound),
        ];
        if self.window.diameter() <= PI {
            links.push(("hs", self.hs_bound, "closed_form", self.closed_form_bound));
        }
        links
            .into_iter()
            .filter(|&(_, lhs, _, rhs)| lhs > rhs + CHAIN_SLACK)
            .map(|(a, lhs, b, rhs)| format!("{a} = {lhs:.6e} > {b} = {rhs:.6e}"))
            .collect()
    }

    pub fn verify(&self) -> Result<()> {
        let v = self.chain_violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Violation(v.join("; ")))
        }
    }

    /// Header matching [`DistanceReport::csv_row`].
    pub const CSV_HEADER: &'static str = "n,m,A,tv,w1,coupling,cs,hs,closed_form";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},\"{}\",{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
            self.n,
            self.m,
            self.window.to_json(),
            self.tv_exact,
            self.w1_exact,
            self.coupling_bound,
            self.cs_bound,
            self.hs_bound,
            self.closed_form_bound
        )
    }
}

/// Build both spectra on one converged quadrature and fill every field.
pub fn distance_report(n: usize, m: usize, window: &ArcSet, order_hint: Option<usize>) -> Result<DistanceReport> {
    if n == 0 || m == 0 {
        return Err(Error::OutOfRange {
            name: if n == 0 { "n" } else { "m" },
            value: 0.0,
            reason: "must be at least 1",
        });
    }
    let point_bound = m * n;
    let closed = closed_form_bound(n, m, window);
    if window.is_empty() {
        let empty = OperatorSpectrum::from_eigenvalues(Vec::new())?;
        return Ok(DistanceReport {
            n,
            m,
            window: window.clone(),
            tv_exact: 0.0,
            w1_exact: 0.0,
            coupling_bound: 0.0,
            cs_bound: 0.0,
            hs_bound: 0.0,
            closed_form_bound: closed,
            point_bound,
            trace_gap: 0.0,
            quadrature_nodes: 0,
            law: CountDistribution::delta(0),
            law_m: CountDistribution::delta(0),
            spectrum: empty.clone(),
            spectrum_m: empty,
        });
    }

    let base = KernelSpec::cue(n, 1);
    let dilated = KernelSpec::cue(n, m);
    let start = Quadrature::for_kernel(window, &base, order_hint)?;
    let quad = operator::converge(&[base, dilated], start)?;

    let spectrum = operator::spectrum_on(&base, &quad)?;
    let spectrum_m = if m == 1 {
        spectrum.clone()
    } else {
        operator::spectrum_on(&dilated, &quad)?
    };
    let law = count_distribution(&spectrum)?;
    let law_m = count_distribution(&spectrum_m)?;
    let (l1, l2) = spectral_gaps(&spectrum.eigenvalues, &spectrum_m.eigenvalues);
    let hs = if m == 1 {
        0.0
    } else {
        hs_distance(&base, &dilated, &quad)
    };
    let nf = point_bound as f64;

    Ok(DistanceReport {
        n,
        m,
        window: window.clone(),
        tv_exact: tv_distance(&law, &law_m),
        w1_exact: w1_distance(&law, &law_m),
        coupling_bound: l1,
        cs_bound: (nf * l2).sqrt(),
        hs_bound: nf.sqrt() * hs,
        closed_form_bound: closed,
        point_bound,
        trace_gap: (spectrum.trace - spectrum_m.trace).abs(),
        quadrature_nodes: quad.len(),
        law,
        law_m,
        spectrum,
        spectrum_m,
    })
}

/// Count in a dilated window against the sine-kernel count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SineComparison {
    pub n: usize,
    pub window: ArcSet,
    pub w1: f64,
    pub tv: f64,
    /// `5 |A| diam A / n^{3/2}`.
    pub bound: f64,
    pub trace_cue: f64,
    pub trace_sine: f64,
}

impl SineComparison {
    pub const CSV_HEADER: &'static str = "n,w1,bound,ratio";

    pub fn ratio(&self) -> f64 {
        if self.bound == 0.0 {
            0.0
        } else {
            self.w1 / self.bound
        }
    }

    pub fn csv_row(&self) -> String {
        format!("{},{:.12e},{:.12e},{:.6}", self.n, self.w1, self.bound, self.ratio())
    }
}

/// Compare `N_{(2π/n) A}` for the `n x n` CUE with the sine-process count `S_A`.
/// `window` lives on the real line and must satisfy `A ⊆ [-n/2, n/2)` and
/// `diam A ≤ n/2`.
pub fn sine_comparison(n: usize, window: &ArcSet, order_hint: Option<usize>) -> Result<SineComparison> {
    let half = n as f64 / 2.0;
    if window.is_empty() {
        return Ok(SineComparison {
            n,
            window: window.clone(),
            w1: 0.0,
            tv: 0.0,
            bound: 0.0,
            trace_cue: 0.0,
            trace_sine: 0.0,
        });
    }
    let (lo, hi) = (window.intervals()[0].0, window.intervals().last().unwrap().1);
    if lo < -half || hi > half || window.diameter() > half {
        return Err(Error::OutOfRange {
            name: "n",
            value: n as f64,
            reason: "window must fit in [-n/2, n/2) with diameter at most n/2",
        });
    }
    let line = ArcSet::on_line(window.intervals())?;
    let scaled = line.scale(2.0 * PI / n as f64)?;
    let cue = KernelSpec::cue(n, 1);
    let cue_quad = Quadrature::for_kernel(&scaled, &cue, order_hint)?;
    let s_cue = operator::spectrum(&cue, &scaled, Some(cue_quad))?;
    let sine_quad = Quadrature::for_kernel(&line, &KernelSpec::Sine, order_hint)?;
    let s_sine = operator::spectrum(&KernelSpec::Sine, &line, Some(sine_quad))?;
    let p = count_distribution(&s_cue)?;
    let q = count_distribution(&s_sine)?;
    Ok(SineComparison {
        n,
        window: line.clone(),
        w1: w1_distance(&p, &q),
        tv: tv_distance(&p, &q),
        bound: 5.0 * line.measure() * line.diameter() / (n as f64).powf(1.5),
        trace_cue: s_cue.trace,
        trace_sine: s_sine.trace,
    })
}
