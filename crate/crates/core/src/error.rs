//! Error type shared by every module in the crate.
//!
//! Variants are grouped by how a caller should react: `InvalidInput`,
//! `DimensionMismatch`, and `Format` mean the request itself was malformed;
//! the remaining variants report that a numerically meaningful computation
//! could not be completed on the given data.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its documented range.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Two arguments that must share a dimension do not.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A geometric domain is empty or has zero volume.
    #[error("degenerate domain: {0}")]
    DegenerateDomain(String),

    /// The data is degenerate for the requested operation
    /// (for example, an atom candidate that is a polynomial on its ball).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// A quadrature rule has too few nodes inside the region of interest,
    /// or the nodes it has sit too degenerately to resolve the requested
    /// computation at this resolution.
    #[error("insufficient nodes: {0}")]
    InsufficientNodes(String),

    /// A linear-algebra factorization failed beyond the configured fallback.
    #[error("ill-conditioned system: {0}")]
    Conditioning(String),

    /// An iterative solver exhausted its iteration budget.
    #[error("solver did not converge: {0}")]
    Convergence(String),

    /// Text input (CSV, JSON) could not be parsed.
    #[error("format error: {0}")]
    Format(String),

    /// A randomized sampler produced only degenerate draws.
    #[error("sampling failure: {0}")]
    Sampling(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True when the failure is a usage problem rather than a numerical one.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_) | Error::DimensionMismatch(_) | Error::Format(_) | Error::Io(_)
        )
    }
}
