use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoxError {
    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("simple model unidentifiable: no events observed")]
    Unidentifiable,

    #[error("kappa unbounded risk: synthetic covariates are rank deficient (rank {rank} < {p})")]
    RankDeficient { rank: usize, p: usize },

    #[error("matrix is singular or not positive definite")]
    Singular,

    #[error("solver failed to converge after {iterations} iterations (gradient norm {gradient_norm:e})")]
    NoConvergence {
        iterations: usize,
        gradient_norm: f64,
    },

    #[error("cross-validation fold {fold} has no events, or leaves none in its training part")]
    EmptyFold { fold: usize },

    #[error("bracket failure: {0}")]
    Bracket(String),

    #[error("parse error at row {row}, column `{column}`: {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CoxError>;
