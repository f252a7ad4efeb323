use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    BadPrime(u32),
    #[error("rank or prime mismatch: {0}")]
    Mismatch(String),
    #[error("singular matrix")]
    Singular,
    #[error("division by zero")]
    DivisionByZero,
    #[error("inexact division: nonzero remainder")]
    InexactDivision,
    #[error("leading term of zero")]
    ZeroInput,
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("degree {degree} exceeds the configured bound {bound}")]
    Overflow { degree: i64, bound: i64 },
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
