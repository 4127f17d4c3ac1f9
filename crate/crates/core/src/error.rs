use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NonOddPrime(u64),
    #[error("modulus {0:?} is reducible over GF(p)")]
    ReducibleModulus(Vec<u32>),
    #[error("invalid ring parameters: {0}")]
    InvalidParams(String),
    #[error("element index {index} out of range for a ring of size {size}")]
    IndexOutOfRange { index: u64, size: u32 },
    #[error("operands belong to different rings")]
    RingMismatch,
    #[error("element {0} is not a unit")]
    NotAUnit(u32),
    #[error("element {0} is not in the radical")]
    NotInRadical(u32),
    #[error("argument must be nonzero")]
    ZeroArgument,
    #[error("operation requires a field, ring has radical length {0}")]
    NotAField(u32),
    #[error("quotient length {k} must lie in 1..={n}")]
    InvalidK { k: u32, n: u32 },
    #[error("matrix is not invertible (determinant in the radical)")]
    NotInvertible,
    #[error("matrix is not unipotent")]
    NotUnipotent,
    #[error("isomorphism was built over a different ring")]
    IsoMismatch,
    #[error("input is a scalar matrix")]
    ScalarInput,
    #[error("enumeration needs {required} states but the budget is {budget}")]
    BudgetExceeded { required: u128, budget: u64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("malformed atlas: {0}")]
    Atlas(String),
    #[error(transparent)]
    Io(#[from] IoError),
}

/// `std::io::Error` wrapper so that `Error` can stay `Clone + PartialEq`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind:?}: {message}")]
pub struct IoError {
    pub kind: std::io::ErrorKind,
    pub message: String,
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(IoError {
            kind: e.kind(),
            message: e.to_string(),
        })
    }
}
