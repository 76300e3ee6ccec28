use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A degree sequence or parameter set violates one of the heterogeneity
    /// conditions. The message names the violated condition.
    #[error("invalid degree sequence: {0}")]
    InvalidSequence(String),

    /// Generic invalid argument (index out of range, bad exponent, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Sizes of two coupled objects disagree.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A state coordinate became NaN or infinite during iteration.
    #[error("non-finite state at node {node}, step {step}")]
    NonFiniteState { node: usize, step: u64 },

    /// Power iteration did not reach the requested tolerance.
    #[error("no convergence after {iters} iterations (residual {residual:.3e})")]
    NoConvergence { iters: usize, residual: f64 },

    /// An operation that needs data (a recorded series, an ensemble) got none.
    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
