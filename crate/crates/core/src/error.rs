use std::path::PathBuf;

use thiserror::Error;

/// Everything that can go wrong in the library.
#[derive(Debug, Error)]
pub enum TexfxError {
    #[error("file not found: {}", path.display())]
    FileNotFound { path: PathBuf },

    #[error("cannot decode {}: {message}", path.display())]
    Decode { path: PathBuf, message: String },

    #[error("unsupported image format in {}: {detail}", path.display())]
    UnsupportedFormat { path: PathBuf, detail: String },

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot encode {}: {message}", path.display())]
    Encode { path: PathBuf, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("channel mismatch: {left} vs {right}")]
    ChannelMismatch { left: usize, right: usize },

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("degenerate text mask: the binarized image is entirely {0}")]
    DegenerateMask(&'static str),

    #[error("empty point set")]
    EmptySet,

    #[error("empty histogram")]
    EmptyHistogram,

    #[error("partition {0} has no valid patch centers")]
    EmptyPartition(usize),

    #[error("distance mode requires a distance field")]
    MissingDistanceField,
}

/// Broad failure class, used to pick process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Io,
    Degenerate,
}

impl TexfxError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            TexfxError::FileNotFound { .. }
            | TexfxError::Decode { .. }
            | TexfxError::UnsupportedFormat { .. }
            | TexfxError::Io { .. }
            | TexfxError::Encode { .. } => ErrorKind::Io,
            TexfxError::InvalidArgument(_)
            | TexfxError::ChannelMismatch { .. }
            | TexfxError::MissingDistanceField => ErrorKind::Usage,
            TexfxError::SizeMismatch(_)
            | TexfxError::DegenerateMask(_)
            | TexfxError::EmptySet
            | TexfxError::EmptyHistogram
            | TexfxError::EmptyPartition(_) => ErrorKind::Degenerate,
        }
    }
}

pub type Result<T, E = TexfxError> = std::result::Result<T, E>;
