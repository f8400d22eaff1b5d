use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("arity mismatch: expected {expected} arguments, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("order {order} exceeds the supported maximum {max}")]
    OrderExceedsCap { order: usize, max: usize },
    #[error("degenerate trace: {0}")]
    DegenerateTrace(String),
    #[error("elements belong to different contexts")]
    ContextMismatch,
    #[error("series is not D-valued: residual {residual:.3e} at indices {indices:?}")]
    NotDValued { indices: Vec<usize>, residual: f64 },
    #[error("malformed word: {0}")]
    MalformedWord(String),
    #[error("element is not self-adjoint (distance {0:.3e})")]
    NotSelfAdjoint(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
