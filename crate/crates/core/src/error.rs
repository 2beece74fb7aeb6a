use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("incompatible fields: modulus {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("division by zero in F_{0}")]
    DivisionByZero(u32),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("size overflow: {0}")]
    Overflow(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("word references x{var} but only {given} values were assigned")]
    MissingVariable { var: u32, given: usize },
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("malformed input: {0}")]
    Format(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
