use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{field} must be positive (got {value})")]
    NonPositive { field: &'static str, value: f64 },

    #[error("lambda out of open interval (0, 1): got {0}")]
    LambdaOutOfRange(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o failure: {0}")]
    Io(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// The innermost error beneath any context layers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }

    /// True when the error stems from bad input rather than a numerical failure.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self.root(),
            Error::NonPositive { .. } | Error::LambdaOutOfRange(_) | Error::InvalidArgument(_)
        )
    }

    /// Wraps the error with a short description of what was being attempted.
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }
}
