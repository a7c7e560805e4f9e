//! Variance of window counts: one-dimensional integral formula, closed-form
//! sandwich bounds, and the variance gap between the two processes.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::arcset::ArcSet;
use crate::error::{Error, Result};
use crate::kernels::dirichlet_quotient;
use crate::quadrature::integrate_adaptive;

/// Absolute tolerance handed to the adaptive integrator.
pub const INTEGRAL_TOL: f64 = 1e-10;

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta <= PI / 2.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "theta",
            value: theta,
            reason: "must lie in (0, π/2]",
        })
    }
}

fn period_breaks(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let step = 2.0 * PI / n as f64;
    let first = (lo / step).floor() as i64;
    let last = (hi / step).ceil() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

/// `Var N_θ` for the `n x n` CUE and the window `[-θ, θ)`, by adaptive
/// quadrature of
///
/// ```text
/// (1/2π²) [ ∫_0^{2θ} z F(z) dz + 2θ ∫_{2θ}^{π} F(z) dz ],   F(z) = sin²(nz/2) / sin²(z/2)
/// ```
///
/// with panels cut at the zeros `2πk/n` of the numerator.
pub fn variance_by_formula(n: usize, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    let fejer = |z: f64| dirichlet_quotient(n, 1, z).powi(2);
    let breaks = period_breaks(n, 0.0, PI);
    let inner = integrate_adaptive(|z| z * fejer(z), 0.0, 2.0 * theta, &breaks, INTEGRAL_TOL)?;
    let outer = integrate_adaptive(fejer, 2.0 * theta, PI, &breaks, INTEGRAL_TOL)?;
    Ok((inner + 2.0 * theta * outer) / (2.0 * PI * PI))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceBounds {
    /// Present when `3π/(2n) ≤ θ`.
    pub lower: Option<f64>,
    pub upper: f64,
}

/// Closed-form bounds on `Var N_θ^{(m)}`; they do not depend on `m`.
///
/// Lower: `log(2nθ/3π) / 3π²` when `3π/(2n) ≤ θ`. Upper: `(n²θ² + 2)/4`
/// for `θ ≤ 1/n`, else `½ log(e^{3/2} nθ)`.
pub fn variance_bounds(n: usize, m: usize, theta: f64) -> Result<VarianceBounds> {
    check_theta(theta)?;
    if n == 0 || m == 0 {
        return Err(Error::OutOfRange {
            name: if n == 0 { "n" } else { "m" },
            value: 0.0,
            reason: "must be at least 1",
        });
    }
    let nt = n as f64 * theta;
    let lower = (theta >= 3.0 * PI / (2.0 * n as f64)).then(|| (2.0 * nt / (3.0 * PI)).ln() / (3.0 * PI * PI));
    let upper = if nt <= 1.0 {
        (nt * nt + 2.0) / 4.0
    } else {
        0.5 * (1.5 + nt.ln())
    };
    Ok(VarianceBounds { lower, upper })
}

/// `1/sin²(u/2) - 1/(m² sin²(u/2m))`, series near `u = 0`.
pub fn inverse_sine_gap(m: usize, u: f64) -> f64 {
    let phi = 0.5 * u;
    if phi.abs() < 1e-2 {
        let m2 = (m * m) as f64;
        let p2 = phi * phi;
        (1.0 - 1.0 / m2) / 3.0
            + p2 * (1.0 - 1.0 / (m2 * m2)) / 15.0
            + 2.0 * p2 * p2 * (1.0 - 1.0 / (m2 * m2 * m2)) / 189.0
            + p2 * p2 * p2 * (1.0 - 1.0 / (m2 * m2 * m2 * m2)) / 675.0
    } else {
        let mf = m as f64;
        1.0 / phi.sin().powi(2) - 1.0 / (mf * (phi / mf).sin()).powi(2)
    }
}

/// `|A ∩ (A + u)|`.
pub fn self_overlap(window: &ArcSet, u: f64) -> f64 {
    let iv = window.intervals();
    let mut total = 0.0;
    for &(a0, a1) in iv {
        for &(b0, b1) in iv {
            let lo = a0.max(b0 + u);
            let hi = a1.min(b1 + u);
            if hi > lo {
                total += hi - lo;
            }
        }
    }
    total
}

/// The double integral
///
/// ```text
/// (1/4π²) ∬_{A×A} sin²(n(x-y)/2) [1/sin²((x-y)/2) - 1/(m² sin²((x-y)/2m))] dx dy
/// ```
///
/// reduced to one dimension through the overlap function of `A`.
/// Requires `diam A ≤ π`.
///
/// Since `Var N = ∫_A K(x,x) dx - ∬_{A×A} |K(x,y)|² dx dy` and the traces
/// agree, this integral is `Var N_A^{(m)} - Var N_A`: the dilated count is
/// the more spread out of the two.
pub fn variance_difference(n: usize, m: usize, window: &ArcSet) -> Result<f64> {
    let diam = window.diameter();
    if diam > PI {
        return Err(Error::OutOfRange {
            name: "diam A",
            value: diam,
            reason: "must be at most π",
        });
    }
    if window.is_empty() || m == 1 {
        return Ok(0.0);
    }
    let nf = n as f64;
    let integrand = |u: f64| (0.5 * nf * u).sin().powi(2) * inverse_sine_gap(m, u) * self_overlap(window, u);
    let mut breaks = period_breaks(n, 0.0, diam);
    for &(a0, a1) in window.intervals() {
        for &(b0, b1) in window.intervals() {
            breaks.extend([a0 - b0, a0 - b1, a1 - b0, a1 - b1].iter().map(|d| d.abs()));
        }
    }
    // integrand is even in u
    let half = integrate_adaptive(integrand, 0.0, diam, &breaks, INTEGRAL_TOL)?;
    Ok(2.0 * half / (4.0 * PI * PI))
}

/// `|A|² / 4π²`.
pub fn variance_difference_bound(window: &ArcSet) -> f64 {
    (window.measure() / (2.0 * PI)).powi(2)
}
