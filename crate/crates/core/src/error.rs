use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("XML parse error at line {line}, column {column}: {message}")]
    XmlParse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("trace {trace_index}: event missing required key '{key}'")]
    MissingEventKey { trace_index: usize, key: String },

    #[error("row {row}: unparseable timestamp '{value}'")]
    BadTimestamp { row: usize, value: String },

    #[error("missing mapped column '{0}' in CSV header")]
    MissingColumn(String),

    #[error("no traces in input")]
    NoTraces,

    #[error("duplicate case id '{0}'")]
    DuplicateCaseId(String),

    #[error("degenerate split: {0}")]
    DegenerateSplit(String),

    #[error("split attribute '{0}' absent from every trace")]
    AttributeAbsent(String),

    #[error("split predicates overlap: trace '{case_id}' matches both")]
    OverlappingPredicates { case_id: String },

    #[error("invalid split rule '{0}': expected e.g. \"ge:50,lt:50\" or \"eq:A,eq:B\"")]
    BadSplitRule(String),

    #[error("dimension too large: 2^{0} exceeds the 2^16 basis cap")]
    DimensionTooLarge(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty input series")]
    EmptySeries,

    #[error("degenerate training set: only class {0} present")]
    DegenerateTraining(u8),

    #[error("insufficient instances: class {class} has {count}, need at least {need}")]
    InsufficientInstances { class: u8, count: usize, need: usize },

    #[error("too few instances for {k} folds: class {class} has {count}")]
    TooFewForFolds { k: usize, class: u8, count: usize },

    #[error("need at least {need} values, got {got}")]
    InsufficientSamples { need: usize, got: usize },

    #[error("degrees of freedom must be positive, got {0}")]
    BadDof(f64),

    #[error("no candidate features to evaluate")]
    NoCandidates,

    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
