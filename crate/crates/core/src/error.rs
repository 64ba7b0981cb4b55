use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid length: {0}")]
    Length(String),

    #[error("{what} exceeds cap: {value} > {cap}")]
    Cap {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("parse error in field `{field}`: {message}")]
    Parse { field: &'static str, message: String },

    #[error("mass sum mismatch: expected {expected}, found {found}")]
    MassSumMismatch { expected: u64, found: u128 },

    #[error("negative probability at index {index}: {value}")]
    NegativeProbability { index: usize, value: f64 },

    #[error("probabilities sum to {0}, not 1 (tolerance 1e-6)")]
    NotNormalized(f64),

    #[error("dimension mismatch: n = {0} vs n = {1}")]
    DimensionMismatch(usize, usize),

    #[error("non-monotone CDF: cylinder mass {0} is negative")]
    NonMonotoneCdf(f64),

    #[error("unsupported prefix `{0}`: cylinder mass is zero")]
    UnsupportedPrefix(String),

    #[error("unencodable: zero mass at `{0}`")]
    ZeroMass(String),

    #[error("invalid codeword: {0}")]
    InvalidCodeword(String),

    #[error("cannot smooth n = {n} exactly at log2_denom {log2_denom}; re-quantize with log2_denom in [{min}, {max}]")]
    SmoothPrecision {
        n: usize,
        log2_denom: u32,
        min: u32,
        max: u32,
    },

    #[error("function value {value} outside declared range [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("f_mu(x) = {0}: zero mass; smooth the distribution first")]
    FMuZeroMass(String),

    #[error("max-entropy bound violated: log2(1/mu(x)) = {value} > M = {bound}")]
    MaxEntropyViolated { value: f64, bound: f64 },

    #[error("training diverged at step {step}: loss rose for {window} consecutive steps")]
    Diverged {
        step: usize,
        window: usize,
        trace: Vec<f64>,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
