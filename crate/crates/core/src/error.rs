use thiserror::Error;

/// Errors raised by the geometric routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} = {value} is outside its domain ({domain})")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
    #[error("isometry classification is ambiguous (trace gap {gap:e})")]
    AmbiguousClassification { gap: f64 },
    #[error("unknown label: {0}")]
    UnknownLabel(String),
    #[error("invalid crossing sequence at step {index}: {kind}")]
    InvalidSequence { index: usize, kind: String },
    #[error("({p}, {q}) is not a coprime pair with q >= 1")]
    NotCoprime { p: i64, q: i64 },
    #[error("lattice line passes through a vertex at x = {x}, row {row}")]
    VertexHit { x: f64, row: i64 },
    #[error("midpoint construction failed: {0}")]
    ConstructionFailed(String),
    #[error("sequence is not realized by a closed geodesic: {0}")]
    NotRealizable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
