//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by generator construction, evolution and solvers.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A rate, width or energy failed validation.
    #[error("invalid parameter {name}: {reason}")]
    InvalidParam { name: &'static str, reason: String },

    /// The generator has no one-dimensional kernel, so the stationary
    /// state is not unique (or does not exist as a normalizable vector).
    #[error("no unique steady state: degenerate directions [{directions}]")]
    NoUniqueSteadyState { directions: String },

    /// The linear solve for the stationary state did not meet the
    /// residual requirement.
    #[error("steady-state solve failed: residual {residual:.3e} exceeds {limit:.3e}")]
    SolveFailed { residual: f64, limit: f64 },

    /// The adaptive integrator could not make progress.
    #[error("integration failure at t = {t}: {reason}")]
    IntegrationFailure { t: f64, reason: String },

    /// A decay-rate fit was requested on data that cannot support it.
    #[error("unreliable fit: {0}")]
    UnreliableFit(String),

    /// A state label or coherence pair does not exist in the state space.
    #[error("unknown state label {0:?} for this model")]
    UnknownLabel(String),

    /// An operation mixed objects living on different state spaces.
    #[error("state-space mismatch: expected {expected}, got {got}")]
    SpaceMismatch { expected: &'static str, got: &'static str },

    /// A current is undefined for the given widths.
    #[error("undefined current: {0}")]
    UndefinedCurrent(String),

    /// The emitter width vanishes where a closed form divides by it.
    #[error("blocked emitter: {0}")]
    BlockedEmitter(String),

    /// A time grid or fit window is malformed.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
