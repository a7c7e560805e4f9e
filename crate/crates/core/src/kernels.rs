//! Pointwise kernel evaluation.
//!
//! All kernels depend only on `u = x - y`. Removable singularities of the
//! sine quotients are routed through a short Taylor expansion when `|u|`
//! falls below [`DIAGONAL_THRESHOLD`].

use std::f64::consts::PI;

use faer::c64;
use serde::{Deserialize, Serialize};

/// Below this separation the quotient is evaluated by its series.
pub const DIAGONAL_THRESHOLD: f64 = 1e-9;

/// Which determinantal kernel to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelSpec {
    /// Eigenangles of an `mn x mn` CUE matrix in `[-π/m, π/m)`, dilated by `m`.
    /// `m = 1` is the plain `n x n` CUE.
    Cue { n: usize, m: usize },
    /// Same process through the exponential-sum kernel.
    Dyson { n: usize, m: usize },
    /// `sin(π(x-y)) / (π(x-y))` on the real line.
    Sine,
}

impl KernelSpec {
    pub fn cue(n: usize, m: usize) -> Self {
        assert!(n >= 1 && m >= 1, "kernel parameters must be positive");
        KernelSpec::Cue { n, m }
    }

    pub fn dyson(n: usize, m: usize) -> Self {
        assert!(n >= 1 && m >= 1, "kernel parameters must be positive");
        KernelSpec::Dyson { n, m }
    }

    /// Real-symmetric kernels can go through the Nyström eigensolver.
    pub fn is_real_symmetric(&self) -> bool {
        !matches!(self, KernelSpec::Dyson { .. })
    }

    /// Real value for the real-symmetric kernels, `None` for Dyson.
    pub fn eval_real(&self, x: f64, y: f64) -> Option<f64> {
        match *self {
            KernelSpec::Cue { n, m } => Some(cue_kernel(n, m, x, y)),
            KernelSpec::Sine => Some(sine_kernel(x, y)),
            KernelSpec::Dyson { .. } => None,
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> c64 {
        match *self {
            KernelSpec::Dyson { n, m } => dyson_kernel(n, m, x, y),
            _ => c64::new(self.eval_real(x, y).unwrap(), 0.0),
        }
    }

    /// Angular frequency scale of the kernel's oscillation, in CUE units: the
    /// kernel oscillates like `sin(nu/2)`. The sine kernel `sin(πu)` matches
    /// `n = 2π`.
    pub fn oscillation_n(&self) -> f64 {
        match *self {
            KernelSpec::Cue { n, .. } | KernelSpec::Dyson { n, .. } => n as f64,
            KernelSpec::Sine => 2.0 * PI,
        }
    }
}

/// `sin(n u / 2) / (m sin(u / 2m))`, continuous through its removable zeros.
///
/// Tends to `n` as `u -> 0`. For `m = 1` the denominator also vanishes at
/// `u = ±2π`, where the quotient is `(-1)^(n+1)` times its value at `u ∓ 2π`.
pub fn dirichlet_quotient(n: usize, m: usize, u: f64) -> f64 {
    let nf = n as f64;
    let mf = m as f64;
    let (u, sign) = if m == 1 && u.abs() > PI {
        let flip = if n.is_multiple_of(2) { -1.0 } else { 1.0 };
        (u - 2.0 * PI * u.signum(), flip)
    } else {
        (u, 1.0)
    };
    if u.abs() < DIAGONAL_THRESHOLD {
        sign * nf * (1.0 - u * u * (nf * nf - 1.0 / (mf * mf)) / 24.0)
    } else {
        sign * (nf * u / 2.0).sin() / (mf * (u / (2.0 * mf)).sin())
    }
}

/// CUE kernel for the `m`-dilated process, with respect to Lebesgue measure.
pub fn cue_kernel(n: usize, m: usize, x: f64, y: f64) -> f64 {
    dirichlet_quotient(n, m, x - y) / (2.0 * PI)
}

/// `(1/m) Σ_{j<mn} exp(i j (x-y)/m)`, in closed form.
pub fn dyson_kernel(n: usize, m: usize, x: f64, y: f64) -> c64 {
    let u = x - y;
    let mf = m as f64;
    let total = (m * n) as f64;
    let phase = (total - 1.0) * u / (2.0 * mf);
    // |Σ| = sin(nu/2)/sin(u/2m); the prefactor 1/m matches dirichlet_quotient's m
    let modulus = dirichlet_quotient_unwrapped(n, m, u);
    c64::new(modulus * phase.cos(), modulus * phase.sin())
}

// Same quotient without the periodic shift: the Dyson phase carries the sign.
fn dirichlet_quotient_unwrapped(n: usize, m: usize, u: f64) -> f64 {
    let nf = n as f64;
    let mf = m as f64;
    if u.abs() < DIAGONAL_THRESHOLD {
        return nf * (1.0 - u * u * (nf * nf - 1.0 / (mf * mf)) / 24.0);
    }
    let den = mf * (u / (2.0 * mf)).sin();
    if den.abs() < DIAGONAL_THRESHOLD {
        // u near ±2πm: fall back to the explicit sum (m = 1 only in practice)
        let s: c64 = (0..m * n).map(|j| c64::cis(j as f64 * u / mf)).sum::<c64>() / mf;
        let phase = ((m * n) as f64 - 1.0) * u / (2.0 * mf);
        return (s * c64::cis(-phase)).re;
    }
    (nf * u / 2.0).sin() / den
}

/// Sine kernel; equals 1 on the diagonal.
pub fn sine_kernel(x: f64, y: f64) -> f64 {
    let u = PI * (x - y);
    if u.abs() < DIAGONAL_THRESHOLD {
        1.0 - u * u / 6.0
    } else {
        u.sin() / u
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_pairs(seed: u64, count: usize) -> Vec<(f64, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| (rng.random_range(-PI..PI), rng.random_range(-PI..PI)))
            .collect()
    }

    #[test]
    fn cue_diagonal() {
        for &(n, m) in &[(1, 1), (7, 1), (100, 2), (33, 5)] {
            let v = cue_kernel(n, m, 0.3, 0.3);
            assert!((v - n as f64 / (2.0 * PI)).abs() < 1e-14);
            let near = cue_kernel(n, m, 0.3, 0.3 + 1e-11);
            assert!((near - n as f64 / (2.0 * PI)).abs() < 1e-12);
        }
    }

    #[test]
    fn cue_n1_is_constant() {
        for (x, y) in random_pairs(1, 50) {
            assert!((cue_kernel(1, 1, x, y) - 1.0 / (2.0 * PI)).abs() < 1e-14);
        }
    }

    #[test]
    fn cue_n2_vanishes_at_antipode() {
        let v = cue_kernel(2, 1, 0.0, PI - 1e-7);
        assert!(v.abs() < 1e-6);
    }

    #[test]
    fn cue_is_continuous_across_two_pi() {
        // x - y close to ±2π: m = 1 denominator vanishes
        for n in [3usize, 4, 10] {
            let a = cue_kernel(n, 1, PI - 1e-12, -PI);
            let expected = n as f64 / (2.0 * PI) * if n % 2 == 0 { -1.0 } else { 1.0 };
            assert!((a - expected).abs() < 1e-9, "n={n}: {a} vs {expected}");
            let b = cue_kernel(n, 1, PI - 1e-3, -PI);
            let direct = (n as f64 * (2.0 * PI - 1e-3) / 2.0).sin() / ((2.0 * PI - 1e-3) / 2.0).sin() / (2.0 * PI);
            assert!((b - direct).abs() < 1e-9);
        }
    }

    #[test]
    fn cue_symmetry_is_exact() {
        for (x, y) in random_pairs(2, 200) {
            assert_eq!(cue_kernel(37, 3, x, y), cue_kernel(37, 3, y, x));
        }
    }

    #[test]
    fn cue_change_of_variables() {
        for &(n, m) in &[(5usize, 2usize), (20, 3), (100, 4)] {
            for (x, y) in random_pairs(3, 100) {
                let lhs = cue_kernel(n, m, x, y);
                let rhs = cue_kernel(m * n, 1, x / m as f64, y / m as f64) / m as f64;
                let scale = lhs.abs().max(1e-3);
                assert!((lhs - rhs).abs() <= 1e-12 * scale.max(1.0), "{lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn dyson_trivial_cases() {
        let d = dyson_kernel(9, 1, 0.4, 0.4);
        assert!((d.re - 9.0).abs() < 1e-14 && d.im.abs() < 1e-14);
        for (x, y) in random_pairs(4, 20) {
            let d = dyson_kernel(1, 1, x, y);
            assert!((d - c64::new(1.0, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn dyson_matches_explicit_sum() {
        for &(n, m) in &[(3usize, 1usize), (6, 2), (10, 4)] {
            for (x, y) in random_pairs(5, 50) {
                let sum: c64 = (0..m * n).map(|j| c64::cis(j as f64 * (x - y) / m as f64)).sum::<c64>() / m as f64;
                assert!((dyson_kernel(n, m, x, y) - sum).norm() < 1e-11);
            }
        }
    }

    #[test]
    fn dyson_is_conjugate_symmetric() {
        for (x, y) in random_pairs(6, 100) {
            let a = dyson_kernel(12, 3, x, y);
            let b = dyson_kernel(12, 3, y, x);
            assert!((a - b.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn dyson_conjugation_identity() {
        // T^(m)(x,y) = (1/m) Σ_p e^{ipx/m} T(x,y) e^{-ipy/m}
        for &(n, m) in &[(4usize, 2usize), (10, 3), (7, 5)] {
            for (x, y) in random_pairs(7, 100) {
                let lhs = dyson_kernel(n, m, x, y);
                let t = dyson_kernel(n, 1, x, y);
                let rhs: c64 = (0..m)
                    .map(|p| {
                        let p = p as f64 / m as f64;
                        c64::cis(p * x) * t * c64::cis(-p * y)
                    })
                    .sum::<c64>()
                    / m as f64;
                assert!((lhs - rhs).norm() < 1e-11);
            }
        }
    }

    #[test]
    fn dyson_modulus_matches_cue_for_m1() {
        for (x, y) in random_pairs(8, 100) {
            let t = dyson_kernel(15, 1, x, y).norm();
            let k = 2.0 * PI * cue_kernel(15, 1, x, y).abs();
            assert!((t - k).abs() < 1e-11);
        }
    }

    #[test]
    fn sine_values() {
        assert_eq!(sine_kernel(0.7, 0.7), 1.0);
        assert!(sine_kernel(0.0, 1.0).abs() < 1e-15);
        assert!((sine_kernel(0.0, 0.5) - 2.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn microscopic_limit_approaches_sine_kernel() {
        let (x, y) = (0.3, 1.7);
        let deviation = |n: usize| {
            let s = 2.0 * PI / n as f64;
            (s * cue_kernel(n, 1, s * x, s * y) - sine_kernel(x, y)).abs()
        };
        let d = [deviation(100), deviation(1_000), deviation(100_000)];
        assert!(d[0] > d[1] && d[1] > d[2]);
        assert!(d[2] < 1e-3);
    }

    #[test]
    fn spec_dispatch() {
        let k = KernelSpec::cue(10, 2);
        assert_eq!(k.eval_real(0.1, 0.2), Some(cue_kernel(10, 2, 0.1, 0.2)));
        assert!(KernelSpec::dyson(3, 1).eval_real(0.0, 0.1).is_none());
        assert!(!KernelSpec::dyson(3, 1).is_real_symmetric());
        assert_eq!(KernelSpec::Sine.eval(0.0, 0.0), c64::new(1.0, 0.0));
    }
}
