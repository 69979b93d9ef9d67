use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Image geometry as `(height, width, channels)`.
pub type Dims = (usize, usize, usize);

#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),
    #[error("corrupt header: {0}")]
    CorruptHeader(String),
    #[error("i/o failure on {}: {source}", path.display())]
    IoFailure {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("no counterpart for {0:?} in the paired directory")]
    MissingCounterpart(String),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("position {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid fold spec: k={k}, fold={fold}, n={n}")]
    InvalidFoldSpec { k: usize, fold: usize, n: usize },

    #[error("geometry mismatch: expected {expected:?}, got {actual:?}")]
    GeometryMismatch { expected: Dims, actual: Dims },
    #[error("regularization must be positive and finite, got {0}")]
    InvalidRegularization(f64),
    #[error("singular system at position {0}")]
    SingularSystem(usize),
    #[error("dimension {0} exceeds the dense-solve limit of {max}", max = crate::linear::FULL_RR_MAX_DIM)]
    DimensionTooLarge(usize),
    #[error("kernel bandwidth must be positive and finite, got {0}")]
    InvalidBandwidth(f64),
    #[error("kernel solve failed at position {0}: matrix is not positive definite")]
    SolveFailure(usize),

    #[error("montage rows have unequal lengths")]
    RaggedGrid,
    #[error("empty parameter grid")]
    EmptyGrid,

    #[error("bad magic bytes")]
    BadMagic,
    #[error("unsupported model version {0}")]
    UnsupportedVersion(u8),
    #[error("unknown model kind {0:#04x}")]
    UnknownKind(u8),
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    TruncatedPayload { expected: usize, found: usize },
    #[error("{0} trailing bytes after model payload")]
    TrailingBytes(usize),
    #[error("model geometry {0:?} does not fit the file header")]
    GeometryTooLarge(Dims),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        let path = path.into();
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::FileNotFound(path)
        } else {
            Error::IoFailure { path, source }
        }
    }
}
