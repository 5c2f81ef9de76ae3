use std::io;
use std::path::PathBuf;

/// Everything that can go wrong outside the pure codec.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}: cannot decode image: {source}", path.display())]
    Decode {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
    #[error("{}: cannot encode image: {source}", path.display())]
    Encode {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
    #[error("{}: unsupported pixel format {format} (only 8-bit gray/RGB, alpha optional)", path.display())]
    UnsupportedFormat { path: PathBuf, format: String },
    #[error("{}: {source}", path.display())]
    Codec {
        path: PathBuf,
        #[source]
        source: rbmq_core::Error,
    },
    #[error(transparent)]
    Core(#[from] rbmq_core::Error),
    #[error("jpeg quality {0} is outside 1..=100")]
    InvalidQuality(u8),
    #[error("{}: cannot infer output format, expected .png, .jpg, .jpeg or .rbmq", .0.display())]
    UnknownFormat(PathBuf),
    #[error("{0}")]
    Usage(String),
    #[error("input root {} is not a directory", .0.display())]
    MissingInputRoot(PathBuf),
    #[error("report: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn codec(path: impl Into<PathBuf>, source: rbmq_core::Error) -> Self {
        Error::Codec {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
