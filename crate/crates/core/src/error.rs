//! Crate-wide error type and exit-code mapping.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// How an error maps onto the CLI exit-code contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// Bad invocation (exit 1).
    Usage,
    /// Unreadable or malformed input data (exit 2).
    Input,
    /// The computation itself could not produce a usable result (exit 3).
    Processing,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("format error in {path}: {reason}")]
    Format { path: PathBuf, reason: String },
    #[error("operation requires a stereo track")]
    NotStereo,
    #[error("operation requires a mono track")]
    NotMono,
    #[error("sample rates differ: {a} Hz vs {b} Hz")]
    RateMismatch { a: u32, b: u32 },
    #[error("lengths differ: {a} vs {b}")]
    LengthMismatch { a: usize, b: usize },
    #[error("input is empty")]
    EmptyInput,
    #[error("envelope is empty")]
    EmptyEnvelope,
    #[error("metric corpus is empty")]
    EmptyCorpus,
    #[error("max lag {max_lag} samples is not smaller than the shorter track ({len} samples)")]
    LagTooLarge { max_lag: usize, len: usize },
    #[error("offset {offset} exceeds track length {len}")]
    OffsetTooLarge { offset: i64, len: usize },
    #[error("bad parameter: {0}")]
    BadParam(String),
    #[error("spectrogram framing parameters do not match")]
    FramingMismatch,
    #[error("file is empty")]
    EmptyFile,
    #[error("no aligned dialogue pairs to anchor timestamps")]
    NoAnchors,
    #[error("clip {clip_id} cannot fit in a movie of {movie_duration} s")]
    ClipLongerThanMovie { clip_id: String, movie_duration: f64 },
    #[error("bad drop pattern {pattern:?}: {reason}")]
    BadPattern { pattern: String, reason: String },
    #[error("movie {0:?} has no split assignment")]
    UnassignedMovie(String),
    #[error("movie {0:?} is assigned to more than one split")]
    ConflictingAssignment(String),
    #[error("CIDEr needs at least 2 clips for document frequencies")]
    TooFewClips,
    #[error("feature dimensionality differs: {a} vs {b}")]
    DimMismatch { a: usize, b: usize },
    #[error("feature vector {0:?} is all zero and cannot be L1-normalized")]
    ZeroVector(String),
    #[error("feature vector {0:?} contains a negative or non-finite value")]
    BadFeature(String),
    #[error("submission is missing ids: {}", .0.join(", "))]
    MissingIds(Vec<String>),
    #[error("submission has ids not in the reference split: {}", .0.join(", "))]
    ExtraIds(Vec<String>),
    #[error("duplicate ids: {}", .0.join(", "))]
    DuplicateIds(Vec<String>),
    #[error("malformed JSON: {0}")]
    MalformedJson(String),
    #[error("bad config: {0}")]
    BadConfig(String),
    #[error("low-confidence offset estimate (secondary ratio {ratio:.3} < {threshold})")]
    LowConfidence { ratio: f64, threshold: f64 },
    #[error("strict mode: {0}")]
    StrictWarnings(String),
    #[error("{0}")]
    Usage(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn category(&self) -> ErrorCategory {
        use Error::*;
        match self {
            Usage(_) => ErrorCategory::Usage,
            NoAnchors | LowConfidence { .. } | FramingMismatch | StrictWarnings(_) => {
                ErrorCategory::Processing
            }
            _ => ErrorCategory::Input,
        }
    }

    /// Exit code under the CLI contract: 1 usage, 2 input/format, 3 processing.
    pub fn exit_code(&self) -> i32 {
        match self.category() {
            ErrorCategory::Usage => 1,
            ErrorCategory::Input => 2,
            ErrorCategory::Processing => 3,
        }
    }
}
