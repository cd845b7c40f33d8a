//! Crate-wide error type.

use num_complex::Complex64;

/// Errors produced by the numerical layers and the experiment harness.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation (NaN, infinity, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A result would exceed the representable floating-point range.
    #[error("overflow: {0}")]
    Overflow(String),

    /// Quadrature failed to reach the requested tolerance. Carries the best
    /// estimate and the error bound that was actually achieved.
    #[error("accuracy error: achieved {achieved:.3e}, requested {requested:.3e}")]
    Accuracy {
        estimate: Complex64,
        achieved: f64,
        requested: f64,
    },

    /// Operation not defined for this angular-model variant.
    #[error("unsupported variant: {0}")]
    UnsupportedVariant(String),

    /// Vector length mismatch.
    #[error("dimension mismatch: {left} vs {right}")]
    Dimension { left: usize, right: usize },

    /// Invalid configuration (bad field values, inconsistent geometry, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// A Monte Carlo ensemble produced a degenerate estimate (zero denominator).
    #[error("degenerate ensemble: {0}")]
    DegenerateEnsemble(String),

    /// Filesystem or serialization failure in the experiment harness.
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
