//! Nyström discretisation of kernel integral operators on a window.
//!
//! The operator `f ↦ ∫_A K(·, y) f(y) dy` is replaced by the symmetric
//! matrix `M_ij = √w_i K(x_i, x_j) √w_j` on Gauss–Legendre nodes. `M` is
//! similar to the plain Nyström matrix `K W`, so the spectra agree, and it
//! keeps a symmetric eigensolver applicable.

use std::f64::consts::PI;
use std::fmt::Write as _;

use faer::{Mat, Side};
use serde::{Deserialize, Serialize};

use crate::arcset::ArcSet;
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::quadrature::{gauss_legendre, push_panel};

/// Pre-clamp eigenvalues must lie in `[-SPECTRUM_TOL, 1 + SPECTRUM_TOL]`.
pub const SPECTRUM_TOL: f64 = 1e-6;
/// Eigenvalues at or below this are treated as zero and dropped.
pub const DROP_THRESHOLD: f64 = 1e-14;
/// Relative stability required of trace and `Σλ²` under order doubling.
pub const STABILITY_TOL: f64 = 1e-10;
/// Largest total node count the adaptive refinement will try.
pub const NODE_CAP: usize = 8192;

/// Composite Gauss–Legendre rule on a window, one panel per interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Order used on each interval of the window, in interval order.
    pub orders: Vec<usize>,
    window: ArcSet,
}

impl Quadrature {
    /// Default per-interval order resolves `sin(n(x-y)/2)` with 32 nodes per
    /// period, never fewer than 32 nodes.
    pub fn default_order(n: f64, len: f64) -> usize {
        let per = (8.0 * n * len / (2.0 * PI)).ceil() as usize;
        (2 * per).max(32)
    }

    /// Build a rule on `window` for a kernel oscillating like `sin(n u / 2)`.
    /// `order_hint` overrides the per-interval order.
    pub fn build(window: &ArcSet, n: f64, order_hint: Option<usize>) -> Result<Self> {
        if window.is_empty() {
            return Err(Error::EmptyWindow("cannot build a quadrature on an empty window"));
        }
        let orders: Vec<usize> = window
            .intervals()
            .iter()
            .map(|&(lo, hi)| order_hint.unwrap_or_else(|| Self::default_order(n, hi - lo)).max(1))
            .collect();
        Ok(Self::with_orders(window, orders))
    }

    pub fn for_kernel(window: &ArcSet, kernel: &KernelSpec, order_hint: Option<usize>) -> Result<Self> {
        Self::build(window, kernel.oscillation_n(), order_hint)
    }

    fn with_orders(window: &ArcSet, orders: Vec<usize>) -> Self {
        let total: usize = orders.iter().sum();
        let mut nodes = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        for (&(lo, hi), &order) in window.intervals().iter().zip(&orders) {
            let rule = gauss_legendre(order);
            push_panel(&rule, lo, hi, &mut nodes, &mut weights);
        }
        Quadrature {
            nodes,
            weights,
            orders,
            window: window.clone(),
        }
    }

    /// Same window, every panel at twice the order.
    pub fn refined(&self) -> Self {
        Self::with_orders(&self.window, self.orders.iter().map(|o| 2 * o).collect())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn window(&self) -> &ArcSet {
        &self.window
    }

    /// `Σ w_i K(x_i, x_i)`: the discrete trace.
    pub fn trace(&self, kernel: &KernelSpec) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * kernel.eval(x, x).re)
            .sum()
    }

    /// `Σ_ij w_i w_j |K(x_i, x_j)|²`, which equals `Σλ²` of the discretised operator.
    pub fn frobenius_sq(&self, kernel: &KernelSpec) -> f64 {
        let n = self.len();
        let mut total = 0.0;
        for i in 0..n {
            let (xi, wi) = (self.nodes[i], self.weights[i]);
            let mut row = 0.5 * wi * kernel.eval(xi, xi).norm_sqr();
            for j in (i + 1)..n {
                row += self.weights[j] * kernel.eval(xi, self.nodes[j]).norm_sqr();
            }
            total += 2.0 * wi * row;
        }
        total
    }
}

fn rel_change(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Double the order until trace and `Σλ²` of every kernel are stable to
/// [`STABILITY_TOL`] between consecutive orders. Returns the coarser of the
/// last agreeing pair.
pub fn converge(kernels: &[KernelSpec], start: Quadrature) -> Result<Quadrature> {
    let mut current = start;
    loop {
        let finer = current.refined();
        let mut worst: f64 = 0.0;
        for k in kernels {
            worst = worst
                .max(rel_change(current.trace(k), finer.trace(k)))
                .max(rel_change(current.frobenius_sq(k), finer.frobenius_sq(k)));
        }
        if worst <= STABILITY_TOL {
            return Ok(current);
        }
        if finer.len() > NODE_CAP {
            return Err(Error::QuadratureNotConverged {
                cap: NODE_CAP,
                change: worst,
            });
        }
        current = finer;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ClampReport {
    /// Values in `[-tol, 0)` raised to zero.
    pub below_zero: usize,
    /// Values in `(1, 1 + tol]` lowered to one.
    pub above_one: usize,
    /// Largest distance outside `[0, 1]` before clamping.
    pub max_excursion: f64,
    /// Eigenvalues at or below [`DROP_THRESHOLD`] after clamping.
    pub dropped: usize,
}

/// Spectrum of a kernel operator restricted to a window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorSpectrum {
    /// Nonincreasing, in `[0, 1]`, above [`DROP_THRESHOLD`].
    pub eigenvalues: Vec<f64>,
    pub trace: f64,
    /// Total number of quadrature nodes used.
    pub quadrature_order: usize,
    pub clamp_report: ClampReport,
}

impl OperatorSpectrum {
    /// Spectrum with no quadrature behind it (empty window, or given values).
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>) -> Result<Self> {
        for &v in &eigenvalues {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::SpectrumOutOfRange { value: v, tol: 0.0 });
            }
        }
        eigenvalues.sort_by(|a, b| b.total_cmp(a));
        let dropped = eigenvalues.iter().filter(|&&v| v <= DROP_THRESHOLD).count();
        eigenvalues.retain(|&v| v > DROP_THRESHOLD);
        Ok(OperatorSpectrum {
            trace: eigenvalues.iter().sum(),
            eigenvalues,
            quadrature_order: 0,
            clamp_report: ClampReport {
                dropped,
                ..ClampReport::default()
            },
        })
    }

    pub fn sum_sq(&self) -> f64 {
        self.eigenvalues.iter().map(|v| v * v).sum()
    }

    /// `index,eigenvalue` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,eigenvalue\n");
        for (i, v) in self.eigenvalues.iter().enumerate() {
            writeln!(out, "{i},{v:.17e}").unwrap();
        }
        out
    }
}

/// Eigenvalues on a fixed quadrature, no refinement.
pub fn spectrum_on(kernel: &KernelSpec, quad: &Quadrature) -> Result<OperatorSpectrum> {
    if !kernel.is_real_symmetric() {
        return Err(Error::UnsupportedKernel(
            "the Nyström eigensolver needs a real-symmetric kernel (CUE or Sine)",
        ));
    }
    let n = quad.len();
    let sqrt_w: Vec<f64> = quad.weights.iter().map(|w| w.sqrt()).collect();
    let matrix = Mat::<f64>::from_fn(n, n, |i, j| {
        sqrt_w[i] * kernel.eval_real(quad.nodes[i], quad.nodes[j]).unwrap() * sqrt_w[j]
    });
    let raw = matrix
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;

    let mut report = ClampReport::default();
    let mut values = Vec::with_capacity(raw.len());
    for v in raw {
        let excursion = if v < 0.0 { -v } else { (v - 1.0).max(0.0) };
        report.max_excursion = report.max_excursion.max(excursion);
        if excursion > SPECTRUM_TOL {
            return Err(Error::SpectrumOutOfRange {
                value: v,
                tol: SPECTRUM_TOL,
            });
        }
        let clamped = if v < 0.0 {
            report.below_zero += 1;
            0.0
        } else if v > 1.0 {
            report.above_one += 1;
            1.0
        } else {
            v
        };
        if clamped <= DROP_THRESHOLD {
            report.dropped += 1;
        } else {
            values.push(clamped);
        }
    }
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(OperatorSpectrum {
        trace: values.iter().sum(),
        eigenvalues: values,
        quadrature_order: n,
        clamp_report: report,
    })
}

/// Spectrum of `kernel` on the window of `quad`, refining the order until
/// the discretisation is stable. An empty window has an empty spectrum.
pub fn spectrum(kernel: &KernelSpec, window: &ArcSet, quad: Option<Quadrature>) -> Result<OperatorSpectrum> {
    if window.is_empty() {
        return OperatorSpectrum::from_eigenvalues(Vec::new());
    }
    let start = match quad {
        Some(q) => q,
        None => Quadrature::for_kernel(window, kernel, None)?,
    };
    let quad = converge(std::slice::from_ref(kernel), start)?;
    spectrum_on(kernel, &quad)
}

/// `‖K_a - K_b‖` in `L²(A × A)` by tensor quadrature.
pub fn hs_distance(a: &KernelSpec, b: &KernelSpec, quad: &Quadrature) -> f64 {
    let n = quad.len();
    let mut total = 0.0;
    for i in 0..n {
        let xi = quad.nodes[i];
        for j in 0..n {
            let d = a.eval(xi, quad.nodes[j]) - b.eval(xi, quad.nodes[j]);
            total += quad.weights[i] * quad.weights[j] * d.norm_sqr();
        }
    }
    total.sqrt()
}
