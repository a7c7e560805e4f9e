//! Gauss–Legendre rules and an adaptive panel integrator.

use crate::error::{Error, Result};

/// Nodes and weights of the `order`-point Gauss–Legendre rule on `[-1, 1]`.
///
/// Newton iteration on the three-term recurrence, started from the
/// Tricomi-type asymptotic guess. Accurate to a few ulps for orders in the
/// low thousands.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1, "Gauss-Legendre order must be positive");
    let n = order;
    let nf = n as f64;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        let k = (i + 1) as f64;
        let mut x = (std::f64::consts::PI * (k - 0.25) / (nf + 0.5)).cos() * (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Map the reference rule onto `[a, b)`, appending to `nodes`/`weights`.
pub fn push_panel(reference: &(Vec<f64>, Vec<f64>), a: f64, b: f64, nodes: &mut Vec<f64>, weights: &mut Vec<f64>) {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    for (x, w) in reference.0.iter().zip(&reference.1) {
        nodes.push(mid + half * x);
        weights.push(half * w);
    }
}

const PANEL_ORDER: usize = 20;
const MAX_DEPTH: usize = 40;

/// Adaptive Gauss–Legendre integration of `f` over `[a, b]`.
///
/// The range is first split at every point of `breakpoints` inside it; each
/// panel is then bisected until a 20-point rule and the sum of its two
/// halves agree within the panel's share of `abs_tol`.
pub fn integrate_adaptive<F>(f: F, a: f64, b: f64, breakpoints: &[f64], abs_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if b <= a {
        return Ok(0.0);
    }
    let rule = gauss_legendre(PANEL_ORDER);
    let mut cuts: Vec<f64> = std::iter::once(a)
        .chain(breakpoints.iter().copied().filter(|&p| p > a && p < b))
        .chain(std::iter::once(b))
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let total_len = b - a;
    let mut sum = 0.0;
    for w in cuts.windows(2) {
        let tol = abs_tol * (w[1] - w[0]) / total_len;
        sum += panel(&f, &rule, w[0], w[1], tol, 0)?;
    }
    Ok(sum)
}

fn fixed_rule<F: Fn(f64) -> f64>(f: &F, rule: &(Vec<f64>, Vec<f64>), a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    rule.0
        .iter()
        .zip(&rule.1)
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

fn panel<F: Fn(f64) -> f64>(f: &F, rule: &(Vec<f64>, Vec<f64>), a: f64, b: f64, tol: f64, depth: usize) -> Result<f64> {
    let whole = fixed_rule(f, rule, a, b);
    let mid = 0.5 * (a + b);
    let left = fixed_rule(f, rule, a, mid);
    let right = fixed_rule(f, rule, mid, b);
    let refined = left + right;
    let err = (refined - whole).abs();
    if err <= tol.max(1e-15 * refined.abs()) {
        return Ok(refined);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::QuadratureNotConverged {
            cap: MAX_DEPTH,
            change: err,
        });
    }
    Ok(panel(f, rule, a, mid, 0.5 * tol, depth + 1)? + panel(f, rule, mid, b, 0.5 * tol, depth + 1)?)
}
