//! Error type shared across the crate.

use std::path::PathBuf;

/// Errors produced by conversions, codecs, and the pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// RGB primaries are collinear or otherwise unusable.
    #[error("degenerate primaries")]
    DegeneratePrimaries,

    /// A lightness value was queried outside the display range [0, 100].
    #[error("lightness out of display range: {0}")]
    LightnessOutOfRange(f64),

    /// An image had no luminance anywhere (all-zero Y plane).
    #[error("black image")]
    BlackImage,

    /// A statistic was requested over an empty set.
    #[error("empty input")]
    EmptyInput,

    /// Two images that must share dimensions do not.
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),

    /// The file is not one of the supported image formats.
    #[error("unsupported format")]
    UnsupportedFormat,

    /// The file claims a supported format but is malformed or truncated.
    #[error("corrupt image: {0}")]
    CorruptImage(String),

    /// Invalid configuration value.
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("png encode/decode: {0}")]
    Png(String),

    /// An error from a pipeline stage, tagged with the stage name.
    #[error("stage {stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Wrap this error with the name of the pipeline stage it came from.
    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage { stage, source: Box::new(self) }
    }

    /// True for errors caused by user-supplied input (bad files, bad
    /// configuration) as opposed to internal failures. The CLI maps these
    /// to exit code 1; everything else to 2.
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::UnsupportedFormat
            | Error::CorruptImage(_)
            | Error::Config(_)
            | Error::BlackImage
            | Error::DegeneratePrimaries
            | Error::Io { .. } => true,
            Error::Stage { source, .. } => source.is_input_error(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
