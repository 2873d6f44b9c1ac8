use thiserror::Error;

/// Error taxonomy shared by every operation. The CLI maps these onto its
/// exit codes: contract-class failures → 2, config → 3, resource/format → 4.
#[derive(Debug, Error)]
pub enum Error {
    #[error("range error: {0}")]
    Range(String),

    #[error("contract error: {0}")]
    Contract(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("resource error: {0}")]
    Resource(String),

    #[error("format error at byte {offset}: {msg}")]
    Format { offset: u64, msg: String },

    #[error("search failure: {0}")]
    Search(String),

    #[error("gap error: minimal achieved gap {achieved} outside [{min}, {cap}]")]
    Gap { achieved: u64, min: u64, cap: u64 },

    #[error("chain error at rung {rung} (y = {y}): {msg}")]
    Chain { rung: usize, y: f64, msg: String },

    #[error("nontermination: iteration cap {cap} exceeded; trajectory tail: {tail:?}")]
    NonTermination { cap: u64, tail: Vec<String> },

    #[error("budget error: product has {k} factor pairs but beta2 = {beta2}")]
    Budget { k: usize, beta2: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// Reserved for states the underlying mathematics rules out. Reaching
    /// one is a bug, not a bad input.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
