use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate span: all input columns are numerically zero")]
    DegenerateSpan,
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("lemma hypothesis violated: inner product {0} must lie in (0, 1)")]
    LemmaHypothesis(f64),
    #[error("AoD undefined for a zero residual")]
    AodUndefined,
    #[error("query column {0} is zero")]
    ZeroQuery(usize),
    #[error("empty cluster")]
    EmptyCluster,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("missing ground truth: {0}")]
    MissingGroundTruth(&'static str),
    #[error("noiseless condition evaluated on noisy data")]
    NoisyData,
    #[error("residual snapshots were not retained")]
    MissingResiduals,
    #[error("infeasible synthetic spec: {0}")]
    InfeasibleSpec(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("data format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
