use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    // Field construction and arithmetic.
    #[error("characteristic {0} is not prime")]
    CompositeCharacteristic(u64),
    #[error("modulus polynomial {0:#x} is reducible over GF(2) or has the wrong degree")]
    ReduciblePolynomial(u64),
    #[error("extension fields are only supported in characteristic 2 (got p={p}, e={e})")]
    UnsupportedExtension { p: u64, e: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("field order bound {bound} exceeds the ceiling {ceiling}")]
    BoundTooLarge { bound: String, ceiling: u64 },
    #[error("value {value} is not a canonical element of a field of order {q}")]
    NotCanonical { value: u64, q: u64 },

    // Linear algebra.
    #[error("column index {index} out of range 1..={cols}")]
    IndexOutOfRange { index: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("work budget exceeded: {needed} > {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    // Parameters and structures.
    #[error("invalid code parameters: {0}")]
    InvalidParams(String),
    #[error("distance bound is not positive ({0})")]
    BoundNonPositive(i64),
    #[error("{0} is not divisible by {1}")]
    NotDivisible(usize, usize),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("too few groups: t={t} < ceil(k/r)={needed}")]
    TooFewGroups { t: usize, needed: usize },
    #[error("groups do not cover [1..{n}]; first missing coordinate {missing}")]
    CoverIncomplete { n: usize, missing: usize },
    #[error("structure does not match the code: {0}")]
    StructureMismatch(String),

    // Construction and verification.
    #[error("no valid extension vector for coordinate {lambda}: |Lambda|={lambda_count}, q={q}")]
    NoValidVector { lambda: usize, lambda_count: u64, q: u64 },
    #[error("field of order {q} is too small, need at least {needed}")]
    FieldTooSmall { q: u64, needed: u64 },
    #[error("columns of core {0:?} are linearly dependent")]
    InvariantBroken(Vec<usize>),
    #[error("no optimal code exists ({0})")]
    NotConstructible(String),
    #[error("existence of an optimal code is unknown ({0})")]
    UnknownCase(String),
    #[error("unknown construction method '{0}'")]
    UnknownMethod(String),
    #[error("generator matrix has rank {rank} < k={k}")]
    RankDeficient { rank: usize, k: usize },
    #[error("malformed input: {0}")]
    Malformed(String),
}
