use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported sample rate {0} Hz (only 16000 Hz mono audio is accepted)")]
    SampleRate(u32),

    #[error("unsupported wav file: {0}")]
    UnsupportedWav(String),

    #[error("non-finite sample at index {0}")]
    NonFiniteSample(usize),

    #[error("clip too short: {len} samples, at least {needed} required")]
    TooShort { len: usize, needed: usize },

    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    Dimension {
        context: String,
        expected: usize,
        got: usize,
    },

    #[error("bad magic: expected {expected:?}, found {found:?}")]
    BadMagic { expected: [u8; 4], found: [u8; 4] },

    #[error("unsupported format version {found} (expected {expected})")]
    Version { expected: u32, found: u32 },

    #[error("truncated file: {0}")]
    Truncated(String),

    #[error("shape mismatch for tensor `{name}`: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        name: String,
        expected: Vec<usize>,
        found: Vec<usize>,
    },

    #[error("architecture mismatch: expected {expected}, found {found}")]
    ArchMismatch { expected: String, found: String },

    #[error("non-finite value produced in layer `{0}`")]
    NonFinite(String),

    #[error("training diverged at epoch {epoch}, step {step}")]
    Diverged { epoch: usize, step: usize },

    #[error("no stable filter found after {0} draws")]
    UnstableFilter(usize),

    #[error("no voiced reference frames to evaluate")]
    NoVoicedFrames,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("missing pair file for {0}")]
    MissingPair(PathBuf),

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the command-line tool.
    ///
    /// 2 input error, 3 config or shape error, 4 numeric failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::SampleRate(_)
            | Error::UnsupportedWav(_)
            | Error::NonFiniteSample(_)
            | Error::TooShort { .. }
            | Error::Truncated(_)
            | Error::BadMagic { .. }
            | Error::Version { .. }
            | Error::Parse { .. }
            | Error::MissingPair(_)
            | Error::NoVoicedFrames
            | Error::Io(_) => 2,
            Error::Dimension { .. }
            | Error::ShapeMismatch { .. }
            | Error::ArchMismatch { .. }
            | Error::InvalidArgument(_)
            | Error::Json(_) => 3,
            Error::NonFinite(_) | Error::Diverged { .. } | Error::UnstableFilter(_) => 4,
            Error::File { source, .. } => source.exit_code(),
        }
    }

    pub(crate) fn in_file(self, path: impl Into<PathBuf>) -> Error {
        Error::File {
            path: path.into(),
            source: Box::new(self),
        }
    }

    pub(crate) fn dim(context: impl Into<String>, expected: usize, got: usize) -> Error {
        Error::Dimension {
            context: context.into(),
            expected,
            got,
        }
    }
}
