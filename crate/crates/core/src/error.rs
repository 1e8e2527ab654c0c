use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Failure raised by an objective while evaluating a point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalError {
    /// A counting wrapper with a cap refused an evaluation past the cap.
    BudgetExceeded { cap: u64 },
    /// The simulator did not answer in time.
    Timeout(String),
    /// The simulator answered with something that is not a valid result.
    Protocol(String),
    /// The simulator process died or could not be started.
    Process(String),
    /// The point handed to the objective violates its contract.
    InvalidInput(String),
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::BudgetExceeded { cap } => write!(f, "evaluation budget of {cap} exceeded"),
            EvalError::Timeout(msg) => write!(f, "evaluation timed out: {msg}"),
            EvalError::Protocol(msg) => write!(f, "protocol error: {msg}"),
            EvalError::Process(msg) => write!(f, "process error: {msg}"),
            EvalError::InvalidInput(msg) => write!(f, "invalid objective input: {msg}"),
        }
    }
}

impl core::error::Error for EvalError {}

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A vector's length does not match the space dimension.
    DimensionMismatch { expected: usize, got: usize },
    /// A configuration value is out of range; the string names the field.
    InvalidConfig(String),
    /// An argument violates an operation's precondition.
    Contract(String),
    /// The feasible lattice has no points.
    EmptyGrid,
    /// The objective failed.
    Eval(EvalError),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, got } => {
                write!(
                    f,
                    "dimension mismatch: expected {expected} components, got {got}"
                )
            }
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::Contract(msg) => write!(f, "contract violation: {msg}"),
            Error::EmptyGrid => f.write_str("the feasible grid lattice is empty"),
            Error::Eval(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for Error {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        match self {
            Error::Eval(e) => Some(e),
            _ => None,
        }
    }
}

impl From<EvalError> for Error {
    fn from(e: EvalError) -> Self {
        Error::Eval(e)
    }
}
