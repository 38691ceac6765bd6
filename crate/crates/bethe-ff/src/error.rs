//! Error types shared by every module.

use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Two arguments of a kernel with a simple pole are closer than the
    /// coincidence tolerance.
    #[error("kernel pole: {context} (separation {separation:.3e} <= tolerance {tolerance:.3e})")]
    Pole {
        context: String,
        separation: f64,
        tolerance: f64,
    },

    /// A denominator factor of a determinant representation vanishes
    /// (coincident points inside a Vandermonde or Cauchy product).
    #[error("coincident points: {0}")]
    Coincidence(String),

    /// A state passed where an on-shell (residual-certified) state is
    /// required has too large a Bethe-equation residual.
    #[error("state is off shell: residual {residual:.3e} exceeds {threshold:.3e}")]
    OffShell { residual: f64, threshold: f64 },

    /// An iterative solver did not reach its residual target.
    #[error("no convergence after {iterations} iterations (last residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    /// Two roots collided during iteration.
    #[error("root collision between indices {i} and {j} (separation {separation:.3e})")]
    RootCollision { i: usize, j: usize, separation: f64 },

    /// Division by a vanishing quantity (e.g. r(lambda) at a zero of d).
    #[error("division by zero: {0}")]
    DivisionByZero(String),

    /// Request exceeds the dense-representation resource guard.
    #[error("resource limit: {0}")]
    Resource(String),

    /// Site index outside 1..=M.
    #[error("site index {m} out of range 1..={sites}")]
    SiteRange { m: usize, sites: usize },

    /// An empirical convention check failed (should never happen for the
    /// adopted operator conventions).
    #[error("convention check failed: {0}")]
    Convention(String),

    /// Index out of range (e.g. elementary symmetric polynomial order).
    #[error("index out of range: {0}")]
    Index(String),

    /// A model or argument fails its structural invariants.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Library-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
