use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("label mismatch: {0}")]
    Label(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("dimension {dim} exceeds cap {cap}")]
    Cap { dim: usize, cap: usize },
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error("eigendecomposition failed")]
    Eigen,
    #[error("invalid stabilizer data: {0}")]
    Stabilizer(String),
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("not a Markov chain: conditional mutual information {cmi} bits exceeds {tol}")]
    NotMarkov { cmi: f64, tol: f64 },
    #[error("algebra decomposition did not converge: {0}")]
    Convergence(String),
    #[error("extension search stuck at face ({q}, {r}): {reason}")]
    Stuck { q: i64, r: i64, reason: String },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
