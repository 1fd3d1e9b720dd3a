use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("a code needs t >= 1 rows and n >= 1 columns (got t = {t}, n = {n})")]
    EmptyCode { t: usize, n: usize },

    #[error("column index {index} out of range for a code with n = {n}")]
    ColumnOutOfRange { index: usize, n: usize },

    #[error("row {row} of column {column} out of range for t = {t}")]
    RowOutOfRange { column: usize, row: usize, t: usize },

    #[error("column {column} is not strictly ascending")]
    NotAscending { column: usize },

    #[error("column {column} has weight {found}, declared weight is {declared}")]
    WeightMismatch {
        column: usize,
        found: usize,
        declared: usize,
    },

    #[error("operation needs at least {needed} columns, code has {n}")]
    TooFewColumns { needed: usize, n: usize },

    #[error("code has non-uniform column weights")]
    NonUniformWeight,

    #[error("code carries no disjunctness certificate")]
    Uncertified,

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("no built-in irreducible modulus for GF({p}^{k}); supply one")]
    NoModulus { p: u32, k: u32 },

    #[error("invalid modulus: {0}")]
    InvalidModulus(String),

    #[error("invalid code parameters: {0}")]
    InvalidParams(String),

    #[error("enumerating {count} codewords exceeds the limit of {limit}")]
    EnumerationLimit { count: u128, limit: u128 },

    #[error("recipe {descriptor:?}: {msg}")]
    Recipe { descriptor: String, msg: String },

    #[error("ingredient {0} is not built internally; load it with import_code and register it")]
    UnavailableIngredient(String),

    #[error("declaration contradicts the code: {0}")]
    Declaration(String),

    #[error("search budget of {budget} nodes exceeded after {checked} of {total} targets")]
    BudgetExceeded {
        budget: u64,
        checked: usize,
        total: usize,
    },

    #[error("shortening step {step} would leave no columns")]
    ShortenExhausted { step: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
