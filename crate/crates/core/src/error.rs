use num_complex::Complex64;

/// Errors raised by the library.
///
/// The variants map onto the command-line exit-code contract: input and
/// validation problems are exit code 2, mathematical failures surface as
/// reports rather than errors.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("eigensolver did not converge after {iterations} sweeps")]
    NoConvergence { iterations: usize },

    #[error("resolvent undefined: lambda = {lambda} is within {distance:e} of the spectrum")]
    Singular { lambda: Complex64, distance: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn validation<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Validation(msg.into()))
}
