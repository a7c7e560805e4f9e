use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid interval [{lo}, {hi}): {reason}")]
    InvalidInterval { lo: f64, hi: f64, reason: &'static str },

    #[error("parameter `{name}` = {value} out of range: {reason}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("empty window: {0}")]
    EmptyWindow(&'static str),

    #[error("unsupported kernel for this operation: {0}")]
    UnsupportedKernel(&'static str),

    #[error("eigenvalue {value} outside [-{tol}, 1+{tol}]; quadrature under-resolved")]
    SpectrumOutOfRange { value: f64, tol: f64 },

    #[error("quadrature did not stabilise below {cap} nodes (last relative change {change:e})")]
    QuadratureNotConverged { cap: usize, change: f64 },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("matrix dimension {dimension} is not divisible by m = {m}")]
    NotDivisible { dimension: usize, m: usize },

    #[error("empty sample")]
    EmptySample,

    #[error("inequality violated: {0}")]
    Violation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
