use thiserror::Error;

/// Errors raised by the geometry, condition, solver and stability routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("pole of f at b = {b} (|f| = {f:e})")]
    Pole { b: f64, f: f64 },

    #[error("density must lie in (0,1), got {0}")]
    InvalidDensity(f64),

    #[error("convergence failure: {0}")]
    Convergence(String),

    #[error("quadrature budget exhausted after {evaluations} evaluations (error estimate {error_estimate:e})")]
    Tolerance { evaluations: usize, error_estimate: f64 },

    #[error("finite-difference stencil left the valid domain: {0}")]
    Stencil(String),

    #[error("degenerate probe failed: {0}")]
    Probe(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
