use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid order 2a = {0}: need 0 < 2a < 2")]
    Order(f64),
    #[error("symbol is not elliptic: |L| = {value:.3e} at a sphere point")]
    NotElliptic { value: f64 },
    #[error("symbol not evaluable at xi = 0 (regularize first)")]
    Origin,
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("preset {preset} unsupported in dimension {dim}")]
    Dimension { preset: &'static str, dim: usize },
    #[error("bad parameter: {0}")]
    Param(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("{what} = {value:.3e} exceeds tolerance {tol:.1e}")]
    Resolution { what: &'static str, value: f64, tol: f64 },
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
