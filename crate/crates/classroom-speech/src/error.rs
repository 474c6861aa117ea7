use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("wav error: {0}")]
    Wav(#[from] hound::Error),

    #[error("{context}: input is not valid UTF-8")]
    Utf8 { context: String },

    #[error("json parse error at byte {offset}: {message}")]
    Json { offset: usize, message: String },

    #[error("line {line}: expected {expected} columns, found {found}")]
    ColumnCount {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("line {line}: cannot parse {field} value {value:?} as a number")]
    NumberField {
        line: usize,
        field: &'static str,
        value: String,
    },

    #[error("expected header {expected:?}, found {found:?}")]
    Header { expected: String, found: String },

    #[error("{place}: end {end} must be greater than start {start} at 0.1 s resolution")]
    InvalidInterval { place: String, start: f64, end: f64 },

    #[error("segments with end <= start at indices {indices:?}")]
    InvalidSegments { indices: Vec<usize> },

    #[error("recording id mismatch: {left:?} vs {right:?}")]
    RecordingMismatch { left: String, right: String },

    #[error("{what} is empty")]
    Empty { what: String },

    #[error("empty selection for filter {filter:?}")]
    EmptySelection { filter: String },

    #[error("timeline is missing the {missing} stream")]
    MissingStream { missing: String },

    #[error("need at least {need} {what}, got {got}")]
    TooFew {
        need: usize,
        what: String,
        got: usize,
    },

    #[error("zero variance in {which}")]
    ZeroVariance { which: String },

    #[error("length mismatch: {left} vs {right} values")]
    LengthMismatch { left: usize, right: usize },

    #[error("incomplete feature matrix; missing cells: {}", cells.join(", "))]
    IncompleteMatrix { cells: Vec<String> },

    #[error("sample rate {rate} Hz is below the 16000 Hz output rate")]
    UnsupportedRate { rate: u32 },

    #[error("unsupported wav format: {detail}")]
    UnsupportedWav { detail: String },

    #[error("epoch length must be positive")]
    BadEpochLength,

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("{0}")]
    Invalid(String),
}
