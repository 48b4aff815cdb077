//! Error type shared by all modules.

use thiserror::Error;

/// Library-wide error enumeration.
///
/// The variants partition failures by what the caller can do about them:
/// fix the arguments (`InvalidParameters`, `UnsupportedOrder`, `Pole`),
/// raise a guard or truncation limit (`ResourceGuard`,
/// `TruncationInsufficient`), or loosen the numerical demands
/// (`NoConvergence`, `TailBound`).
#[derive(Debug, Error)]
pub enum Error {
    /// Arguments outside the documented domain of the operation.
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    /// A configurable resource limit (word length, table size) was hit.
    #[error("resource guard exceeded: {0}")]
    ResourceGuard(String),

    /// A series or iteration failed to meet its tolerance within budget.
    #[error("no convergence: {0}")]
    NoConvergence(String),

    /// The operation has no implementation for this order r.
    #[error("unsupported order r = {0} for this operation")]
    UnsupportedOrder(u32),

    /// A lower hypergeometric parameter is a pole (nonpositive integer).
    #[error("pole in denominator parameter b = {0}")]
    Pole(f64),

    /// The quadrature tail estimate exceeds the configured bound.
    #[error("quadrature tail bound violated: {0}")]
    TailBound(String),

    /// The Fock-space truncation cannot reach the required tail mass.
    #[error("Fock truncation insufficient: {0}")]
    TruncationInsufficient(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameters(msg.into())
    }
}
