use thiserror::Error;

/// Errors raised by the exact-arithmetic and group-construction layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("p = {0} is not an odd prime")]
    InvalidPrime(u64),

    #[error("extension degree must be at least 1")]
    InvalidDegree,

    #[error("field size {0} exceeds the supported bound {1}")]
    FieldTooLarge(u64, u64),

    #[error("division by zero")]
    DivisionByZero,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("enumeration budget exceeded: {size} elements > budget {budget}")]
    BudgetExceeded { size: u64, budget: u64 },

    #[error("ring is not enumerated; operation requires element enumeration")]
    NotEnumerated,

    #[error("{0} is not a unit")]
    NotAUnit(String),

    #[error("{0} is not an epsilon-symmetric element")]
    NotSymmetric(String),

    #[error("group closure exceeded max size {max_size} (frontier {frontier})")]
    ClosureBudget { max_size: usize, frontier: usize },

    #[error("element is not in the enumerated group")]
    NotInGroup,

    #[error("quadratic form is degenerate")]
    DegenerateForm,

    #[error("datum axiom failed: {0}")]
    DatumAxiom(String),

    #[error("datum requires {expected} ring, got {got}")]
    RingMismatch { expected: String, got: String },

    #[error("truncated-polynomial datum requires odd m, got {0}")]
    EvenJetLength(usize),

    #[error("product ring factors must share one base field")]
    MixedBaseFields,

    #[error("eigensolver failed to separate eigenspaces after {0} attempts")]
    EigenDegenerate(usize),

    #[error("invalid descriptor: {0}")]
    BadDescriptor(String),

    #[error("linear algebra backend error: {0}")]
    Linalg(String),
}

pub type Result<T> = std::result::Result<T, Error>;
