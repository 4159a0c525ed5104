use thiserror::Error;

/// Errors shared by every module of the crate.
///
/// `Unknown` is the third value of the tri-valued contract: a backend (or any
/// oracle built on top of one) could not decide the question within its
/// certified radius. Combinators propagate it unchanged.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("undeclared generator `{0}`")]
    UndeclaredGenerator(String),
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("unknown: {0}")]
    Unknown(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("sign queried on the identity element")]
    IdentityElement,
    #[error("not a left-order: {0}")]
    NotAnOrder(String),
    #[error("convexity refuted: {lower} < {middle} < {upper} with {middle} outside the subgroup")]
    ConvexityRefuted {
        lower: String,
        middle: String,
        upper: String,
    },
    #[error("snapshot mismatch: {0}")]
    Mismatch(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
