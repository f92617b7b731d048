use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not positive definite (pivot {pivot:.3e} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("design cross-product matrix is singular")]
    SingularDesign,

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("need at least {needed} rows, got {got}")]
    TooFewRows { needed: usize, got: usize },

    #[error("target `{column}` has {observed} observed rows, need at least {needed}")]
    TooFewObserved {
        column: String,
        observed: usize,
        needed: usize,
    },

    #[error("column `{0}` has no observed values")]
    EmptyColumn(String),

    #[error("predictor `{predictor}` of target `{target}` has missing values and is not imputed")]
    IncompletePredictor { target: String, predictor: String },

    #[error("unknown column `{0}`")]
    UnknownColumn(String),

    #[error("duplicate column `{0}`")]
    DuplicateColumn(String),

    #[error("cell ({row}, `{column}`) is missing")]
    MissingCell { row: usize, column: String },

    #[error("row count mismatch: {left} vs {right}")]
    RowCountMismatch { left: usize, right: usize },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("pooling needs at least 2 datasets (or nests), got {0}")]
    TooFewDatasets(usize),

    #[error("ragged estimate grid: {0}")]
    RaggedGrid(String),

    #[error("target missing-cell rate {target} is unreachable (maximum {max})")]
    UnreachableTarget { target: f64, max: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("replication {index}: {source}")]
    Replication {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{failures} of {replications} replications failed in scenario {scenario} ({kind}, {strategy})")]
    TooManyFailures {
        scenario: u8,
        kind: String,
        strategy: String,
        failures: usize,
        replications: usize,
    },

    #[error("csv: {0}")]
    Csv(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
