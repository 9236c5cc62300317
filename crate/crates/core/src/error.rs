use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("parameter out of range: {0}")]
    Domain(String),

    /// A pole of the model, e.g. the sideband frequency sitting on the
    /// mechanical resonance.
    #[error("singular configuration: {0}")]
    Singular(String),

    /// The requested bound is infinite (no information about the signal).
    #[error("bound diverges: {0}")]
    Divergent(String),

    #[error("covariance condition number {condition:.3e} exceeds {limit:.0e}")]
    IllConditioned { condition: f64, limit: f64 },

    #[error("quadratures {0} and {1} do not commute and cannot be measured jointly")]
    NonCommuting(usize, usize),

    #[error("invalid Gaussian state: {0}")]
    InvalidState(String),
}
