use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A design variable or constant lies outside its admissible range.
    Domain { field: &'static str, value: f64, bound: String },
    /// A caller-supplied argument is unusable (zero sample count, empty trace, ...).
    Argument(String),
    /// A rule's region has no admissible point inside the design space.
    InfeasibleRule(String),
    /// No rule predicts the requested class.
    NotFound(String),
    /// Evaluating a design failed; carries the design's position in the batch.
    Evaluation { index: usize, message: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { field, value, bound } => {
                write!(f, "{field} = {value} violates bound {bound}")
            }
            Error::Argument(msg) => write!(f, "invalid argument: {msg}"),
            Error::InfeasibleRule(msg) => write!(f, "infeasible rule: {msg}"),
            Error::NotFound(msg) => write!(f, "not found: {msg}"),
            Error::Evaluation { index, message } => {
                write!(f, "evaluation of design {index} failed: {message}")
            }
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}
