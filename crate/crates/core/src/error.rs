use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid experiment class: {0}")]
    InvalidClass(String),

    #[error("invalid settings selection: {0}")]
    InvalidSelection(String),

    #[error("{what} {value} out of range [0, {limit})")]
    OutOfRange {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("setting pair ({alpha},{beta}) has zero total count; every declared pair needs data")]
    EmptyPair { alpha: usize, beta: usize },

    #[error("class mismatch: expected {expected}, found {found}")]
    ClassMismatch { expected: String, found: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("degenerate inequality: the zero functional does not define a half-space")]
    DegenerateInequality,

    #[error("strategy space of size {required} exceeds the enumeration cap of {cap} (raise it with --cap)")]
    EnumerationCap { required: String, cap: u64 },

    #[error(
        "facet enumeration working set reached {rays} rows (~{bytes} bytes) after {inserted} of {total} \
         points, over the memory cap of {cap} bytes"
    )]
    MemoryCap {
        rays: usize,
        bytes: u64,
        inserted: usize,
        total: usize,
        cap: u64,
    },

    #[error("unknown strategy index {0}")]
    UnknownStrategy(u64),

    #[error("invalid probability table: {0}")]
    InvalidTable(String),

    #[error("cannot parse {0:?} as an exact rational")]
    ParseRational(String),

    #[error("slack must be nonnegative, got {0}")]
    NegativeSlack(String),

    #[error("empty inequality list")]
    EmptyInequalities,

    #[error("internal error: {0}")]
    Internal(String),
}
