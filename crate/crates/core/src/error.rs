use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("invalid groupoid: {0}")]
    InvalidGroupoid(String),
    #[error("invalid action table: {0}")]
    InvalidAction(String),
    #[error("not a functor: {0}")]
    NotAFunctor(String),
    #[error("cochain is not closed at {witness}")]
    NotClosed { witness: String },
    #[error("twist mismatch: {0}")]
    TwistMismatch(String),
    #[error("degree {0} is not supported here")]
    Degree(usize),
    #[error("table of {required} entries exceeds the budget of {budget}")]
    Budget { required: u128, budget: u128 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown cocycle '{0}'")]
    UnknownCocycle(String),
    #[error("incompatible parameters: {0}")]
    Incompatible(String),
    #[error("{check} failed at {witness}")]
    Verification { check: String, witness: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn verification(check: impl Into<String>, witness: impl Into<String>) -> Error {
        Error::Verification {
            check: check.into(),
            witness: witness.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
