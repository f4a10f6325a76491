use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix must have at least one row and one column")]
    EmptyMatrix,

    #[error("expected {expected} entries for a {rows}x{cols} matrix, got {got}")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        expected: usize,
        got: usize,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("entry at ({row}, {col}) overflows a 64-bit float")]
    FloatOverflow { row: usize, col: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("index set must be strictly increasing")]
    UnsortedIndexSet,

    #[error("switch and add operations need distinct indices, got {0} twice")]
    RepeatedIndex(usize),

    #[error("multiplication operations need a nonzero multiplier")]
    ZeroMultiplier,

    #[error(
        "{cols} columns exceed the enumeration limit of {limit}; pass --force-large to override"
    )]
    EnumerationGuard { cols: usize, limit: usize },

    #[error("order k = {k} must lie in 1..={n}")]
    OrderOutOfRange { k: usize, n: usize },

    #[error("order k = {k} must be below the spark ({spark}); the NSP constant is infinite")]
    OrderNotBelowSpark { k: usize, spark: usize },

    #[error("expected a null space of dimension 1, found {0}")]
    NullityNotOne(usize),

    #[error("null space is trivial; the null space inequality holds vacuously")]
    TrivialNullSpace,

    #[error("all-zero matrix: RIP constants are undefined (0/0)")]
    ZeroMatrix,

    #[error("matrix has a zero column at index {0}")]
    HasZeroColumn(usize),

    #[error("matrix has no zero column")]
    NoZeroColumn,

    #[error("columns are linearly independent; no dependence to exploit")]
    NoDependence,

    #[error("operation sequence contains a column addition")]
    ColumnAdditionPresent,

    #[error("operation sequence contains a column operation")]
    ColumnOperationPresent,

    #[error("need fewer rows than columns, got {rows}x{cols}")]
    NotWide { rows: usize, cols: usize },

    #[error("no operation kind in the allowed set fits a {rows}x{cols} matrix")]
    NoFeasibleOperation { rows: usize, cols: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("entry [{row}][{col}]: {message}")]
    BadEntry {
        row: usize,
        col: usize,
        message: String,
    },

    #[error("internal check failed: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
