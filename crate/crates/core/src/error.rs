use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("tuple probabilities sum to {sum}, which exceeds 1")]
    ProbSumExceedsOne { sum: f64 },
    #[error("probability {prob} for value {value} is not positive")]
    NonPositiveProb { value: u64, prob: f64 },
    #[error("value must be at least 1")]
    NonPositiveValue,
    #[error("value {value} appears more than once in one item")]
    DuplicateValue { value: u64 },
    #[error("item has no mass outside the empty outcome")]
    AllBotItem,
    #[error("value {value} is outside the domain [1, {n}]")]
    ValueOutOfDomain { value: u64, n: u64 },
    #[error("summary is empty")]
    EmptySummary,
    #[error("average is undefined: every item is empty with probability 1")]
    UndefinedAverage,
    #[error("domain size n is unknown; supply it explicitly")]
    DomainUnknown,
    #[error("induced stream is empty; epsilon is too small for these probabilities")]
    EmptyInducedStream,
    #[error("enumeration needs {outcomes} outcomes, budget is {budget}")]
    EnumerationTooLarge { outcomes: u128, budget: u64 },
    #[error("infeasible generator spec: {0}")]
    InfeasibleSpec(String),
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Wraps a validation error with the input line it came from.
    pub fn at_line(self, line: usize) -> Error {
        match self {
            e @ Error::Parse { .. } => e,
            e => Error::Parse {
                line,
                msg: e.to_string(),
            },
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
