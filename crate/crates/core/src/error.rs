use thiserror::Error;

/// Errors raised by the geometric layers.
///
/// Numerical checks never fail through this type; failing residuals are
/// reported as data. Only malformed input, missing configuration and
/// degenerate geometry become errors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("logarithm requested at the branch point -1")]
    Branch,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("non-finite value {value} at point {point}")]
    Evaluation { point: String, value: f64 },
}

impl Error {
    /// Whether the error stems from degenerate geometry rather than bad input.
    pub fn is_degeneracy(&self) -> bool {
        matches!(
            self,
            Error::Degenerate(_) | Error::Consistency(_) | Error::Evaluation { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
