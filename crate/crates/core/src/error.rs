use thiserror::Error;

/// Errors raised anywhere in the toolkit.
///
/// The `Display` strings of the numeric variants are stable identifiers
/// (`empty-sample`, `singular-design`, ...) that callers may match on.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty-sample")]
    EmptySample,

    #[error("bad-probability: {0}")]
    BadProbability(f64),

    #[error("singular-design")]
    SingularDesign,

    #[error("insufficient-data: need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("degenerate-spread")]
    DegenerateSpread,

    #[error("singular-summary-covariance")]
    SingularSummaryCovariance,

    #[error("singular-variance")]
    SingularVariance,

    #[error("nonpositive-dof: k_eta = {k_eta}, k_theta = {k_theta}")]
    NonpositiveDof { k_eta: usize, k_theta: usize },

    #[error("no regression adjustment present on the accepted set")]
    NoAdjustment,

    #[error("cannot draw {requested} resamples without replacement from {available} rows")]
    TooManyResamples { requested: usize, available: usize },

    #[error("simulation failed for slot {slot} after {retries} retries: {reason}")]
    SimulationFailed {
        slot: usize,
        retries: usize,
        reason: String,
    },

    #[error("replication {replication}: {source}")]
    Replication {
        replication: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("bad reference-table cache: {0}")]
    BadCache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
