//! Counting statistics of CUE eigenvalues in mesoscopic windows.
//!
//! The eigenangles of an `n x n` Haar unitary matrix, and the eigenangles of
//! an `mn x mn` one lying in `[-π/m, π/m)` dilated by `m`, are both
//! determinantal point processes. This crate computes their counting laws
//! exactly from operator spectra, compares them (total variation,
//! Wasserstein, variances, joint intensities), and simulates them by direct
//! Haar sampling.
//!
//! Layout:
//!
//! - [`arcset`]: counting windows.
//! - [`kernels`]: pointwise kernel evaluation.
//! - [`quadrature`], [`operator`]: Nyström spectra and Hilbert–Schmidt norms.
//! - [`counting`]: Poisson-binomial count laws and the distance chain.
//! - [`variance`]: variance integrals and bounds.
//! - [`sampler`]: seeded Haar sampling of eigenangles.
//! - [`stats`]: Kolmogorov–Smirnov statistics and the Gaussian comparison.
//! - [`intensity`]: joint intensities as small determinants.

pub mod arcset;
pub mod counting;
pub mod error;
pub mod intensity;
pub mod kernels;
pub mod operator;
pub mod quadrature;
pub mod sampler;
pub mod stats;
pub mod variance;

pub use arcset::ArcSet;
pub use counting::{distance_report, CountDistribution, DistanceReport};
pub use error::{Error, Result};
pub use kernels::KernelSpec;
pub use operator::{OperatorSpectrum, Quadrature};
pub use sampler::SampleBatch;
