use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("PGM parse error at byte {offset}: {message}")]
    Pgm { offset: usize, message: String },

    #[error("invalid multiband header: {0}")]
    Header(String),

    #[error("size mismatch: expected {expected} bytes, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("eigen-solver did not converge within {0} sweeps")]
    NoConvergence(usize),

    #[error("pixel ({x}, {y}) is outside the {width}x{height} image")]
    OutOfBounds {
        x: usize,
        y: usize,
        width: usize,
        height: usize,
    },

    #[error("node {node} is out of range for a tree of {count} nodes")]
    InvalidNode { node: usize, count: usize },

    #[error("tree does not match image: {0}")]
    TreeMismatch(String),

    #[error("no labeled samples")]
    NoSamples,

    #[error("training needs at least two classes, found {0}")]
    SingleClass(usize),

    #[error("feature dimension mismatch: expected {expected}, found {found}")]
    FeatureDimension { expected: usize, found: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid model file: {0}")]
    ModelFormat(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Coarse classification used for process exit codes: 2 for bad input,
    /// 3 for data that is well-formed but unusable, 4 for internal faults.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. }
            | Error::Pgm { .. }
            | Error::Header(_)
            | Error::SizeMismatch { .. }
            | Error::InvalidArgument(_)
            | Error::ModelFormat(_) => 2,
            Error::DimensionMismatch { .. }
            | Error::NoConvergence(_)
            | Error::OutOfBounds { .. }
            | Error::InvalidNode { .. }
            | Error::TreeMismatch(_)
            | Error::NoSamples
            | Error::SingleClass(_)
            | Error::FeatureDimension { .. }
            | Error::LengthMismatch { .. } => 3,
            Error::Internal(_) => 4,
        }
    }
}
