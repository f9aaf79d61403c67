use thiserror::Error;

/// Errors raised by the code, gate and synthesis engines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("vectors of length zero are not supported")]
    EmptyLength,

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("subspace containment violated: {0}")]
    NotSubspace(String),

    #[error("empty difference: the two spaces coincide")]
    EmptyDifference,

    #[error("X- and Z-stabilizers do not commute (rows {x_row} and {z_row})")]
    CommutationViolation { x_row: usize, z_row: usize },

    #[error("code has no logical qubits")]
    NoLogicals,

    #[error("enumeration of 2^{required} vectors exceeds the budget of 2^{budget}")]
    BudgetExceeded { required: u32, budget: u32 },

    #[error("phase level {0} exceeds the supported tower")]
    LevelOverflow(u32),

    #[error("block of {0} qubits exceeds the block cap")]
    BlockCapExceeded(usize),

    #[error("lift policy {policy} does not apply: {reason}")]
    PolicyMismatch { policy: String, reason: String },

    #[error("quadratic-form gate on {0} qubits is too large for dense evaluation")]
    QfdTooLarge(usize),

    #[error("vector {0} already lies in the code C1")]
    AlreadyInC1(String),

    #[error("vector {0} is not in C1 \\ C2")]
    NotAnXLogical(String),

    #[error("vector {0} already lies in C2^perp")]
    AlreadyInC2Perp(String),

    #[error("gate does not preserve the code (norm {0})")]
    NotPreserved(String),

    #[error("logical diagonal entry at {beta} is not a root of unity: {value}")]
    NonUnimodularEntry { beta: String, value: String },

    #[error("connected component {0:?} has odd size")]
    OddComponent(Vec<usize>),

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
