use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("vertex {0} is isolated; the normalized Laplacian needs nonzero degrees")]
    IsolatedVertex(usize),

    #[error("negative edge weight {weight} at ({row}, {col})")]
    NegativeWeight { row: usize, col: usize, weight: f64 },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("cutoff {cutoff} must lie strictly inside (0, {lambda_max})")]
    CutoffOutOfRange { cutoff: f64, lambda_max: f64 },

    #[error("dense oracle refused: N = {n} exceeds the cap of {cap}")]
    OracleCap { n: usize, cap: usize },

    #[error(
        "filtered signal block is rank deficient (sigma_k = {smallest:e}, sigma_max = {largest:e}); \
         a Gaussian sketch hits this with probability zero, so the filter or cutoff is degenerate"
    )]
    RankDeficient { smallest: f64, largest: f64 },

    #[error("basis is not orthonormal (max deviation {deviation:e})")]
    NotOrthonormal { deviation: f64 },

    #[error("dense decomposition failed: {0}")]
    Decomposition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
