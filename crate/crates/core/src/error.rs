use std::path::PathBuf;

use thiserror::Error;

use crate::segmentation::SegmentationError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("expected {expected} channel(s), image has {actual}")]
    ChannelCount { expected: usize, actual: usize },

    #[error("invalid image dimensions: {0}")]
    Dimensions(String),

    #[error("iris boundaries invalid for image: {0}")]
    Boundaries(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("not enough non-black pixels for white balance: need {needed}, found {found}")]
    InsufficientPixels { needed: usize, found: usize },

    #[error("image contains no colored pixels")]
    NoColoredPixels,

    #[error("every sample of the strip is missing")]
    NothingToInpaint,

    #[error("iris code dimensions differ: {a_rows}x{a_cols} vs {b_rows}x{b_cols}")]
    CodeMismatch { a_rows: usize, a_cols: usize, b_rows: usize, b_cols: usize },

    #[error("malformed iris code: {0}")]
    MalformedCode(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error(transparent)]
    Segmentation(#[from] SegmentationError),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("{0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
