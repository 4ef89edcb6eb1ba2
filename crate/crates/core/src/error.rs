use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,
    #[error("non-finite value at position {0}")]
    NonFinite(usize),
    #[error("series too short: need at least {needed} observations, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("series has zero variance")]
    ConstantSeries,
    #[error("series contains missing values")]
    MissingValues,
    #[error("all values are missing")]
    AllMissing,
    #[error("value {0} lies outside the quantile support")]
    OutOfSupport(f64),
    #[error("quantile graph has no row with outgoing transitions")]
    DegenerateGraph,
    #[error("invalid quantile graph: {0}")]
    InvalidGraph(String),
    #[error("invalid model specification: {0}")]
    InvalidSpec(String),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("need at least {needed} rows, got {got}")]
    TooFewRows { needed: usize, got: usize },
    #[error("covariance matrix is degenerate")]
    DegenerateCovariance,
    #[error("silhouette needs at least two clusters")]
    SingleCluster,
    #[error("cluster report is empty")]
    EmptyReport,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("malformed input: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
