use thiserror::Error;

/// Errors raised by the geometric kernels.
#[derive(Debug, Error)]
pub enum Error {
    /// Input violates a documented precondition.
    #[error("validation error: {0}")]
    Validation(String),

    /// Point set does not span a full-dimensional polytope.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// A cone contains a line, so its spherical section is not a proper cap-like set.
    #[error("cone is not pointed")]
    NonPointedCone,

    /// The projection moment integral diverges for these parameters.
    #[error("integral diverges: p + l = {0} must be positive")]
    DivergentIntegral(f64),

    #[error("internal numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn validation<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Validation(msg.into()))
}
