use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The adaptive kernel quadrature could not reach the requested tolerance.
    #[error("quadrature did not converge: estimate {estimate:.6e}, change {change:.3e} > tol {tol:.1e}")]
    QuadratureNotConverged { estimate: f64, change: f64, tol: f64 },

    #[error("field is filled up to slice {filled:?} but slice {needed} is required")]
    NotFilled { needed: usize, filled: Option<usize> },

    #[error("slice {slice}: {source}")]
    AtSlice {
        slice: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("picard iteration did not converge after {iterations} iterations (last contraction ratio {ratio:.3e})")]
    PicardNotConverged { iterations: usize, ratio: f64 },

    #[error("{key}: {message}")]
    Config { key: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn at_slice(self, slice: usize) -> Self {
        match self {
            e @ Error::AtSlice { .. } => e,
            e => Error::AtSlice { slice, source: Box::new(e) },
        }
    }
}
