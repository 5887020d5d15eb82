use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// One invariant violation of a measurement run. Each failure mode is a
/// distinct case so callers can match on what exactly went wrong.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RunViolation {
    #[error("too short: {len} samples, need at least 2")]
    TooShort { len: usize },
    #[error("channel {channel} has {len} samples, expected {expected}")]
    LengthMismatch {
        channel: &'static str,
        len: usize,
        expected: usize,
    },
    #[error("time not strictly increasing at index {index}")]
    NonIncreasingTime { index: usize },
    #[error("non-uniform sampling at index {index}: step {step} vs {expected}")]
    NonUniformStep {
        index: usize,
        step: f64,
        expected: f64,
    },
    #[error("channel {channel} has a non-finite sample at index {index}")]
    NonFinite { channel: &'static str, index: usize },
    #[error("sample_rate must be positive, got {0}")]
    BadSampleRate(f64),
    #[error("sample_rate {declared} inconsistent with measured time step (implies {measured})")]
    SampleRateMismatch { declared: f64, measured: f64 },
    #[error("phi_ddot channel present without phi_dot")]
    DanglingAccel,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed file content; `line` counts from 1 and includes comments.
    #[error("{origin}:{line}: {msg}")]
    Parse {
        origin: String,
        line: usize,
        msg: String,
    },

    #[error("run: {0}")]
    Run(#[from] RunViolation),

    #[error("ratings: {0}")]
    Ratings(String),

    #[error("config: {0}")]
    Config(String),

    #[error("spectra: {0}")]
    Spectra(String),

    #[error("charvals: {0}")]
    CharVals(String),

    #[error("stats: {0}")]
    Stats(String),

    #[error("regression: {0}")]
    Regression(String),

    #[error("predictor: {0}")]
    Prediction(String),

    #[error("predictor: unresolved binding for range [{lo}, {hi}]: {detail}")]
    UnresolvedBinding { lo: f64, hi: f64, detail: String },

    #[error("synth: {0}")]
    Synth(String),
}

impl Error {
    pub fn parse(origin: impl Into<String>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            origin: origin.into(),
            line,
            msg: msg.into(),
        }
    }
}
