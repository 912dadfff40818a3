use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the boxgraph library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed file {path}: {reason}")]
    MalformedFile { path: PathBuf, reason: String },

    #[error("point/label length mismatch: {points} points vs {labels} labels")]
    LengthMismatch { points: usize, labels: usize },

    #[error("cannot build a vertex from an empty cluster")]
    EmptyCluster,

    #[error("fractional variation requires nonnegative inputs, got ({a}, {b})")]
    NegativeDelta { a: f64, b: f64 },

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("registration failed: {inliers} inliers, {required} required")]
    RegistrationFailure { inliers: usize, required: usize },

    #[error("bad magic bytes in graph data")]
    BadMagic,

    #[error("unsupported graph format version {0}")]
    UnsupportedVersion(u16),

    #[error("graph payload length mismatch: expected {expected} bytes, got {got}")]
    Truncated { expected: usize, got: usize },

    #[error("not enough negative candidates: need {required}, have {available}")]
    InsufficientNegatives { required: usize, available: usize },

    #[error("evaluation set contains no positive pairs")]
    NoPositives,

    #[error("degenerate synthetic scene: {0}")]
    DegenerateScene(String),

    #[error("scan id {0:?} cannot be resolved against the pose list")]
    UnresolvableScanId(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn malformed(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::MalformedFile {
            path: path.into(),
            reason: reason.into(),
        }
    }
}
