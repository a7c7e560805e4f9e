//! Seeded Haar sampling of CUE eigenangles.
//!
//! Each trial draws a complex Ginibre matrix, takes its QR factorisation
//! and multiplies `Q` by the phases of `diag(R)`, which makes `Q` exactly
//! Haar distributed. Trial `t` uses the ChaCha8 stream `t` under the master
//! seed, so a batch is bit-identical for any number of workers.

use std::f64::consts::PI;
use std::fmt::Write as _;

use faer::{c64, Mat};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::arcset::ArcSet;
use crate::error::{Error, Result};

/// Allowed drift of `|λ|` from 1 for a computed eigenvalue.
pub const UNIT_MODULUS_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub dimension: usize,
    pub trials: usize,
    pub master_seed: u64,
    /// Per trial, sorted eigenangles in `[-π, π)`.
    pub angles: Vec<Vec<f64>>,
}

/// Sidecar metadata written next to a batch CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchMeta {
    pub dimension: usize,
    pub trials: usize,
    pub master_seed: u64,
}

/// Random stream for one trial.
pub fn trial_rng(master_seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial as u64);
    rng
}

/// One Haar-distributed unitary matrix.
pub fn haar_unitary(dimension: usize, rng: &mut ChaCha8Rng) -> Mat<c64> {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut draw = || -> f64 { StandardNormal.sample(rng) };
    let ginibre = Mat::<c64>::from_fn(dimension, dimension, |_, _| c64::new(scale * draw(), scale * draw()));
    let qr = ginibre.qr();
    let r = qr.R();
    let phases: Vec<c64> = (0..dimension)
        .map(|j| {
            let d = r[(j, j)];
            let norm = d.norm();
            if norm == 0.0 {
                c64::new(1.0, 0.0)
            } else {
                d / norm
            }
        })
        .collect();
    let mut q = qr.compute_Q();
    for j in 0..dimension {
        let p = phases[j];
        for i in 0..dimension {
            q[(i, j)] *= p;
        }
    }
    q
}

/// Sorted eigenangles of one Haar unitary, in `[-π, π)`.
pub fn sample_angles(dimension: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let u = haar_unitary(dimension, rng);
    let eig = u.eigenvalues().map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let mut angles = Vec::with_capacity(dimension);
    for z in eig {
        if (z.norm() - 1.0).abs() > UNIT_MODULUS_TOL {
            return Err(Error::Eigensolver(format!("eigenvalue {z} is off the unit circle")));
        }
        let mut a = z.im.atan2(z.re);
        if a >= PI {
            a -= 2.0 * PI;
        }
        angles.push(a);
    }
    angles.sort_by(f64::total_cmp);
    Ok(angles)
}

fn run_trials(dimension: usize, trials: usize, master_seed: u64) -> Result<Vec<Vec<f64>>> {
    let job = |t: usize| sample_angles(dimension, &mut trial_rng(master_seed, t));
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..trials).into_par_iter().map(job).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..trials).map(job).collect()
    }
}

/// `trials` independent CUE spectra of size `dimension`.
pub fn sample_cue(dimension: usize, trials: usize, master_seed: u64) -> Result<SampleBatch> {
    if dimension == 0 || trials == 0 {
        return Err(Error::OutOfRange {
            name: if dimension == 0 { "dimension" } else { "trials" },
            value: 0.0,
            reason: "must be at least 1",
        });
    }
    Ok(SampleBatch {
        dimension,
        trials,
        master_seed,
        angles: run_trials(dimension, trials, master_seed)?,
    })
}

/// As [`sample_cue`], on a dedicated pool of `workers` threads.
#[cfg(feature = "parallel")]
pub fn sample_cue_with_workers(
    dimension: usize,
    trials: usize,
    master_seed: u64,
    workers: usize,
) -> Result<SampleBatch> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Eigensolver(format!("thread pool: {e}")))?;
    pool.install(|| sample_cue(dimension, trials, master_seed))
}

impl SampleBatch {
    /// Per trial, `#{φ : φ ∈ [-π/m, π/m), mφ ∈ A}`. `m = 1` counts `A` directly.
    pub fn count_in_window(&self, window: &ArcSet, m: usize) -> Result<Vec<usize>> {
        if m == 0 || !self.dimension.is_multiple_of(m) {
            return Err(Error::NotDivisible {
                dimension: self.dimension,
                m,
            });
        }
        let mf = m as f64;
        let (lo, hi) = (-PI / mf, PI / mf);
        Ok(self
            .angles
            .iter()
            .map(|trial| {
                trial
                    .iter()
                    .filter(|&&phi| phi >= lo && phi < hi && window.contains(mf * phi))
                    .count()
            })
            .collect())
    }

    pub fn meta(&self) -> BatchMeta {
        BatchMeta {
            dimension: self.dimension,
            trials: self.trials,
            master_seed: self.master_seed,
        }
    }

    /// `trial,angle` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,angle\n");
        for (t, trial) in self.angles.iter().enumerate() {
            for a in trial {
                writeln!(out, "{t},{a:.17e}").unwrap();
            }
        }
        out
    }

    pub fn meta_json(&self) -> String {
        serde_json::to_string_pretty(&self.meta()).expect("metadata serializes")
    }
}

/// `trial,count` rows.
pub fn counts_csv(counts: &[usize]) -> String {
    let mut out = String::from("trial,count\n");
    for (t, c) in counts.iter().enumerate() {
        writeln!(out, "{t},{c}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_spectrum_on_circle() {
        let b = sample_cue(12, 5, 7).unwrap();
        for trial in &b.angles {
            assert_eq!(trial.len(), 12);
            assert!(trial.iter().all(|&a| (-PI..PI).contains(&a)));
            assert!(trial.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn matrix_is_unitary() {
        let mut rng = trial_rng(3, 0);
        let u = haar_unitary(20, &mut rng);
        let prod = u.adjoint() * &u;
        for i in 0..20 {
            for j in 0..20 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((prod[(i, j)] - c64::new(expected, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn deterministic_streams() {
        let a = sample_cue(8, 6, 99).unwrap();
        let b = sample_cue(8, 6, 99).unwrap();
        assert_eq!(a, b);
        let c = sample_cue(8, 6, 100).unwrap();
        assert_ne!(a.angles, c.angles);
        // trial t does not depend on how many trials are requested
        let d = sample_cue(8, 3, 99).unwrap();
        assert_eq!(&a.angles[..3], &d.angles[..]);
    }

    #[test]
    fn counting_rules() {
        let b = sample_cue(6, 4, 1).unwrap();
        let full = ArcSet::new(&[(-PI, PI)]).unwrap();
        assert_eq!(b.count_in_window(&full, 1).unwrap(), vec![6; 4]);
        assert_eq!(b.count_in_window(&ArcSet::empty(), 1).unwrap(), vec![0; 4]);
        let a = ArcSet::symmetric(0.2).unwrap();
        let counts = b.count_in_window(&a, 2).unwrap();
        for (trial, &c) in b.angles.iter().zip(&counts) {
            let direct = trial.iter().filter(|&&p| (-0.1..0.1).contains(&p)).count();
            assert_eq!(c, direct);
        }
        assert!(matches!(
            b.count_in_window(&a, 4),
            Err(Error::NotDivisible { dimension: 6, m: 4 })
        ));
    }

    #[test]
    fn rejects_empty_requests() {
        assert!(sample_cue(0, 3, 1).is_err());
        assert!(sample_cue(3, 0, 1).is_err());
    }

    #[test]
    fn csv_and_sidecar() {
        let b = sample_cue(3, 2, 5).unwrap();
        let csv = b.to_csv();
        assert_eq!(csv.lines().count(), 1 + 6);
        let meta: BatchMeta = serde_json::from_str(&b.meta_json()).unwrap();
        assert_eq!(meta, b.meta());
        assert_eq!(counts_csv(&[2, 0]), "trial,count\n0,2\n1,0\n");
    }
}
