use thiserror::Error;

/// Errors surfaced by the library.
///
/// Regime and admissibility failures are part of the public contract: the
/// dispatcher refuses parameter regions it cannot characterize instead of
/// silently extrapolating.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid weight: {0}")]
    Weight(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("inconclusive divergence: {0}")]
    InconclusiveDivergence(String),

    #[error("admissibility failure: {0}")]
    Admissibility(String),

    #[error("non-degeneracy failure: {0}")]
    NonDegeneracy(String),

    #[error("regime error: {0}")]
    Regime(String),

    #[error("uncovered region: {0}")]
    UncoveredRegion(String),

    #[error("shape condition failed: {0}")]
    Shape(String),

    #[error("direct/reduced paths disagree: {0}")]
    Disagreement(String),

    #[error("conjugate exponent undefined for {0} (need exponent > 1)")]
    Conjugate(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
