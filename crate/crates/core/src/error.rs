//! Error types shared across the crate.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Adaptive quadrature ran out of subdivisions before reaching the
    /// requested tolerance. Carries the best estimate found so far.
    #[error("quadrature accuracy failure: best estimate {value}, error {error:.3e} > tolerance {tolerance:.3e}")]
    AccuracyFailure {
        value: Complex64,
        error: f64,
        tolerance: f64,
    },

    /// An integrand sample came back non-finite.
    #[error("non-finite integrand sample at x = {x}")]
    NanSample { x: f64 },

    /// Singular quadrature was asked for a non-integrable power.
    #[error("non-integrable singularity exponent {exponent} (must be > -1)")]
    NonIntegrable { exponent: f64 },

    /// A spec or grid failed validation.
    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    /// A decomposition hit the measure-zero degenerate set.
    #[error("degenerate decomposition: {0}")]
    DegenerateDecomposition(String),

    /// An element sits on the boundary between the open orbits.
    #[error("boundary orbit: |v1^2 - v2^2| = {discriminant:.3e} below threshold")]
    BoundaryOrbit { discriminant: f64 },

    /// Internal consistency check failed (indicates a convention bug).
    #[error("internal consistency error: {0}")]
    Inconsistency(String),

    /// The requested function family or option is not supported.
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),

    /// A function's declared decay class cannot support the requested
    /// transform (the defining integral diverges).
    #[error("divergent integral: {0}")]
    Divergent(String),

    /// A sampled quantity could not be evaluated.
    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
