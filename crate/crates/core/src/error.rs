use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("piece `{label}` has {len} note(s); at least {min} are required")]
    TooFewNotes { label: String, len: usize, min: usize },

    #[error("piece `{label}`: frequency at index {index} is {value}, must be a positive finite number")]
    NonPositiveFrequency { label: String, index: usize, value: f64 },

    #[error("cannot shift an empty list")]
    EmptyLevel,

    #[error("level {level} of piece `{label}` is empty; the piece needs at least 3 notes to be scored")]
    EmptyScoringLevel { label: String, level: &'static str },

    #[error("asked for {k} clusters but only {n} value(s) are available")]
    TooFewValues { n: usize, k: usize },

    #[error("surmise is only defined for s >= 0 (got {0})")]
    NegativeSpacing(f64),

    #[error("unsupported ensemble index beta = {0}; expected 1, 2 or 4")]
    UnsupportedBeta(u8),

    #[error("realized frequency at index {index} would be {value}")]
    RealizationOutOfRange { index: usize, value: f64 },

    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),

    #[error("MIDI note {0} is outside 0..=127")]
    MidiOutOfRange(i64),

    #[error("piece `{label}`: no octave shift puts its geometric mean ({mean:.3} Hz) inside [{low}, {high}] Hz")]
    RegisterUnreachable { label: String, mean: f64, low: f64, high: f64 },

    #[error("parse error at line {line}, field {field}: {message}")]
    Parse { line: usize, field: usize, message: String },
}
