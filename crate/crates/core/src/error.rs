use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("cannot parse distribution spec `{spec}`: {reason}")]
    ParseDistribution { spec: String, reason: String },

    #[error("vertex {0:?} lies outside the region")]
    VertexOutsideRegion(Vec<i64>),

    #[error("edge at {base:?} along axis {axis} lies outside the region")]
    EdgeOutsideRegion { base: Vec<i64>, axis: usize },

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("replica index {index} out of range 1..={count}")]
    ReplicaOutOfRange { index: usize, count: usize },

    #[error("region has {edges} edges, exhaustive enumeration is limited to {limit}")]
    RegionTooLarge { edges: usize, limit: usize },

    #[error("enumeration guard violated: m = {m}, {atoms} atoms")]
    EnumerationGuard { m: usize, atoms: usize },

    #[error("operation requires an atomic distribution")]
    NotAtomic,

    #[error("deleting the edge disconnects the endpoints inside the region")]
    Disconnected,

    #[error("time {0} is outside [0, 1]")]
    InvalidTime(f64),

    #[error("time grid is empty")]
    EmptyTimeGrid,

    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),

    #[error("every sample was censored")]
    AllCensored,

    #[error("censored fraction {fraction:.4} exceeds the 1% budget ({censored} of {total} samples)")]
    CensoringBudget {
        fraction: f64,
        censored: usize,
        total: usize,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
