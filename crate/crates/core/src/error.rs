use thiserror::Error;

/// Errors surfaced by the library.
///
/// Verification routines return structured reports rather than errors; an
/// `Error` always means the inputs violated a contract (bad field data,
/// mismatched spaces, out-of-range grades) or a search refused to start
/// because it would exceed its budget.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u32),

    #[error("modulus polynomial is reducible over GF({p})")]
    ReducibleModulus { p: u32 },

    #[error("invalid modulus: {0}")]
    InvalidModulus(String),

    #[error("field too large: q = {q} exceeds the supported limit {limit}")]
    FieldTooLarge { q: u64, limit: u64 },

    #[error("field mismatch between operands")]
    FieldMismatch,

    #[error("ambient dimension mismatch: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("grade mismatch between vertices")]
    GradeMismatch,

    #[error("graph parameter mismatch")]
    GraphMismatch,

    #[error("vertices are not adjacent")]
    NotAdjacent,

    #[error("subspaces are not incident")]
    NotIncident,

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("count overflows the supported integer range")]
    CountOverflow,

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("budget exceeded: needed {needed}, budget {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },

    #[error("map is not injective")]
    NotInjective,

    #[error("map is not a {m}-embedding: witness subspace with degenerate image at vertex {witness}")]
    NotMEmbedding { m: usize, witness: usize },

    #[error("point map does not send lines into lines: witness line index {witness}")]
    NotLinePreserving { witness: usize },

    #[error("point map is too degenerate to recover a semilinear map: {0}")]
    RecoveryDegenerate(String),

    #[error("no semilinear map induces the point map: violated at point {witness}")]
    RecoveryInconsistent { witness: usize },

    #[error("map is not an isometric embedding")]
    NotIsometric,

    #[error("map is not of the required type for this operation")]
    WrongEmbeddingType,

    #[error("decomposition failed at stage `{stage}`: input is not induced by a semilinear map")]
    DecompositionFailed { stage: &'static str },

    #[error("descent failed: star {star} has no common subspace of the required dimension")]
    DescendFailed { star: usize },

    #[error("duplicate points in input")]
    DuplicatePoints,

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
