//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The spectral parameter lies in the essential spectrum, where the
    /// resolvent-side machinery (the k-map, resolvent blocks, bound
    /// functions) is undefined.
    #[error("lambda lies in the essential spectrum")]
    SpectralPoint,

    /// A k-parameter outside the punctured open unit disk.
    #[error("k must satisfy 0 < |k| < 1")]
    UnitDisk,

    /// A linear system whose pivot fell below the working-precision
    /// threshold.
    #[error("matrix is singular to working precision")]
    Singular,

    /// The eigenvalue iteration exhausted its budget.
    #[error("eigenvalue iteration failed to converge")]
    NoConvergence,

    /// An l^p exponent below 1.
    #[error("norm exponent must satisfy p >= 1")]
    BadExponent,

    /// Potential support sticks out of the truncation window.
    #[error("potential support exceeds the truncation window [-N, N]")]
    SupportOverflow,

    /// Parameters violate the small-budget regime required for the
    /// embedded-eigenvalue-free intervals.
    #[error("budget too large for the embedded-eigenvalue-free regime")]
    RegimeViolation,

    /// Q^2 within tolerance of a topology threshold; classification refused.
    #[error("budget is within tolerance of a topology threshold")]
    AtThreshold,

    /// A point handed to the optimality construction that does not lie on
    /// the boundary curve.
    #[error("lambda is not on the boundary curve to the required precision")]
    NotOnGamma,

    /// A point handed to the optimality construction outside the
    /// diagonal-dominance region.
    #[error("lambda is outside the diagonal-dominance region")]
    NotInD,

    /// A scalar field produced NaN/inf off the singularity mask.
    #[error("field produced a non-finite value")]
    NonFinite,

    /// Mismatched matrix/vector dimensions.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Any other invalid parameter (negative mass, degenerate grid, ...).
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
}

pub type Result<T> = std::result::Result<T, Error>;
