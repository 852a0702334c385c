use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Caller passed arguments that violate an operation's contract.
    #[error("usage error: {0}")]
    Usage(String),
    /// A point was required to lie in the body but does not.
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate chord (length {length:.3e})")]
    DegenerateChord { length: f64 },
    #[error("degenerate data: {0}")]
    Degenerate(String),
    /// The transition density is singular on the diagonal `x = u`.
    #[error("singular evaluation: {0}")]
    Singular(String),
    #[error("step failed: {0}")]
    Step(String),
    /// Rejection sampling exceeded its iteration cap.
    #[error("sampler efficiency: {0}")]
    Efficiency(String),
    #[error("mass underflow: {0}")]
    Underflow(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("out of range: {0}")]
    Range(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
