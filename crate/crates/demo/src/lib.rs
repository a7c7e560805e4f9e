//! WebAssembly entry points for the static demo page in `www/`.
//!
//! Every export returns a JSON string so the page needs no generated
//! TypeScript types. Errors come back as `{"error": "..."}`.

use std::f64::consts::PI;

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use cue_dpp::kernels::dirichlet_quotient;
use cue_dpp::variance::{variance_bounds, variance_by_formula, variance_difference_bound};
use cue_dpp::{distance_report, ArcSet, Result};

/// Largest `n` accepted by the page; keeps eigensolves interactive.
pub const MAX_N: usize = 400;

fn respond(r: Result<Value>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

fn check_n(n: usize, m: usize) -> Result<()> {
    if n == 0 || n > MAX_N || m == 0 || m > 8 {
        return Err(cue_dpp::Error::OutOfRange {
            name: "n/m",
            value: n as f64,
            reason: "demo accepts 1 ≤ n ≤ 400 and 1 ≤ m ≤ 8",
        });
    }
    Ok(())
}

/// Both count laws on `[-theta, theta)` with the distance chain.
#[wasm_bindgen]
pub fn count_laws(n: usize, m: usize, theta: f64) -> String {
    respond((|| {
        check_n(n, m)?;
        let r = distance_report(n, m, &ArcSet::symmetric(theta)?, None)?;
        Ok(json!({
            "pmf": r.law.pmf,
            "pmf_m": r.law_m.pmf,
            "mean": r.law.mean,
            "variance": r.law.variance,
            "variance_m": r.law_m.variance,
            "tv": r.tv_exact,
            "w1": r.w1_exact,
            "coupling": r.coupling_bound,
            "cs": r.cs_bound,
            "hs": r.hs_bound,
            "closed_form": r.closed_form_bound,
        }))
    })())
}

/// `Var N_θ` and `Var N_θ^{(m)}` against `θ` on `steps` points of `(0, π/2]`,
/// with the closed-form bounds.
#[wasm_bindgen]
pub fn variance_curve(n: usize, m: usize, steps: usize) -> String {
    respond((|| {
        check_n(n, m)?;
        let steps = steps.clamp(2, 400);
        let mut rows = Vec::with_capacity(steps);
        for s in 1..=steps {
            let theta = 0.5 * PI * s as f64 / steps as f64;
            let b = variance_bounds(n, m, theta)?;
            let window = ArcSet::symmetric(theta)?;
            rows.push(json!({
                "theta": theta,
                "var": variance_by_formula(n, theta)?,
                "var_m": variance_by_formula(m * n, theta / m as f64)?,
                "lower": b.lower,
                "upper": b.upper,
                "gap_bound": variance_difference_bound(&window),
            }));
        }
        Ok(Value::Array(rows))
    })())
}

/// `|K_n(u)|` and `|K_n^{(m)}(u)|` for `u` on `points` samples of `[-π, π]`.
#[wasm_bindgen]
pub fn kernel_profile(n: usize, m: usize, points: usize) -> String {
    respond((|| {
        check_n(n, m)?;
        let points = points.clamp(2, 4000);
        let scale = 1.0 / (2.0 * PI);
        let rows: Vec<Value> = (0..points)
            .map(|i| {
                let u = -PI + 2.0 * PI * i as f64 / (points - 1) as f64;
                json!({
                    "u": u,
                    "k": scale * dirichlet_quotient(n, 1, u).abs(),
                    "k_m": scale * dirichlet_quotient(n, m, u).abs(),
                })
            })
            .collect();
        Ok(Value::Array(rows))
    })())
}
