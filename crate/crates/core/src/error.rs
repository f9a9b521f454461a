//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Input outside the supported domain of a special function or solver.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature stopped before reaching the requested tolerance.
    #[error("quadrature did not converge: achieved {achieved:.3e}, requested {requested:.3e}")]
    QuadratureNonConvergence { achieved: f64, requested: f64 },

    /// A dispersion point was handed to an operation that requires an
    /// on-shell mode, but its dispersion residual is too large.
    #[error("dispersion residual {residual:.3e} exceeds {limit:.3e}")]
    OffShell { residual: f64, limit: f64 },

    /// A normalization integral came out non-positive, which signals
    /// corrupted mode data rather than a recoverable condition.
    #[error("data integrity failure: {0}")]
    DataIntegrity(String),

    /// Fock-state occupation cap would be exceeded.
    #[error("occupation cap {cap} exceeded")]
    CapExceeded { cap: u32 },

    /// Two states do not share the same mode-bin universe.
    #[error("mode-bin universe mismatch")]
    UniverseMismatch,

    /// A wave-packet amplitude vector is not normalized.
    #[error("wave packet not normalized: sum |psi|^2 dbeta = {norm}")]
    Unnormalized { norm: f64 },

    /// Operation defined only for Gupta-Bleuler-satisfying states.
    #[error("operation rejects ghost states")]
    GhostState,
}

pub type Result<T> = std::result::Result<T, Error>;
