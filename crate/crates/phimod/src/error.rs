use thiserror::Error;

/// Errors surfaced by the library. The CLI maps these onto exit codes.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("bad input: {0}")]
    BadInput(String),
    #[error("context mismatch: {0}")]
    ContextMismatch(String),
    #[error("valuation of zero undefined")]
    ValuationOfZero,
    #[error("composition not normalized: {0:?}")]
    NotNormalized(Vec<u64>),
    #[error("relation only valid modulo p^(q^alpha): gamma={gamma}, alpha={alpha}")]
    RelationModulus { gamma: u32, alpha: u32 },
    #[error("equation does not determine series uniquely at this modulus")]
    NotUnique,
    #[error("lift failed at beta={beta}: {reason}")]
    LiftFailed { beta: u32, reason: String },
    #[error("inconsistent or underdetermined linear system")]
    Singular,
    #[error("non-Laurent solution (denominator is not a monomial)")]
    NonLaurent,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("{0}")]
    OutOfRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the CLI and mirrored by the FFI layer.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::LiftFailed { .. } | Error::Singular | Error::NonLaurent | Error::NotUnique => 2,
            _ => 3,
        }
    }
}
