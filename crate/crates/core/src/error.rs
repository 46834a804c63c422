use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the preprocessing and classification pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: malformed header, expected `{expected}`, found `{found}`")]
    MalformedHeader {
        path: PathBuf,
        expected: String,
        found: String,
    },
    #[error("{path}: file has no data rows")]
    EmptyFile { path: PathBuf },
    #[error("timestamps not strictly increasing at row {row} ({prev} ms then {current} ms)")]
    UnsortedTimestamps { row: usize, prev: f64, current: f64 },
    #[error("sample period at row {row} is {period_ms} ms, outside ±20% of nominal {nominal_ms} ms")]
    TimestampJitter {
        row: usize,
        period_ms: f64,
        nominal_ms: f64,
    },
    #[error("sample rate must be positive and finite, got {0}")]
    InvalidSampleRate(f64),
    #[error("unknown behavior name `{0}`")]
    UnknownBehaviorName(String),
    #[error("label intervals overlap: [{first_start}, {first_end}) and [{second_start}, {second_end})")]
    OverlappingIntervals {
        first_start: f64,
        first_end: f64,
        second_start: f64,
        second_end: f64,
    },
    #[error("label interval [{start}, {end}) is empty or reversed")]
    InvalidInterval { start: f64, end: f64 },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("series too short: need at least {needed} samples, got {got}")]
    SeriesTooShort { needed: usize, got: usize },
    #[error("every value in the series is missing")]
    AllMissing,
    #[error("median window must be odd and at least 3, got {0}")]
    EvenWindow(usize),
    #[error("cutoff {cutoff_hz} Hz must lie strictly between 0 and Nyquist ({nyquist_hz} Hz)")]
    CutoffOutOfRange { cutoff_hz: f64, nyquist_hz: f64 },
    #[error("Savitzky-Golay window {window} must be odd and at least polyorder + 2 (polyorder {polyorder})")]
    InvalidWindowOrder { window: usize, polyorder: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("bad filter spec token `{token}`: {reason}")]
    BadFilterSpec { token: String, reason: String },

    #[error("recording of {got} samples is shorter than one window of {needed}")]
    RecordingShorterThanWindow { needed: usize, got: usize },
    #[error("window of {got} samples is too short for feature extraction (need {needed})")]
    WindowTooShort { needed: usize, got: usize },
    #[error("requested {target} features but only {available} are available")]
    TooFewFeatures { target: usize, available: usize },
    #[error("training data contains a single class")]
    SingleClass,
    #[error("shape mismatch: expected {expected} columns, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("non-finite feature value at row {row}, column {col}")]
    NonFiniteFeature { row: usize, col: usize },
    #[error("operation not supported: {0}")]
    Unsupported(String),
    #[error("matrix has no rows")]
    EmptyMatrix,
    #[error("class `{class}` has {count} rows, need at least {needed}")]
    ClassTooSmall {
        class: String,
        count: usize,
        needed: usize,
    },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv {
            path: path.into(),
            source,
        }
    }
}
