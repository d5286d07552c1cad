use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("block length {0} is not a power of two >= 2")]
    BlockLength(usize),
    #[error("K + C = {info} exceeds block length {len}")]
    TooManyInfoBits { info: usize, len: usize },
    #[error("invalid information set: {0}")]
    InfoSet(String),
    #[error("expected {expected} bits, got {got}")]
    Length { expected: usize, got: usize },
    #[error("frozen position {0} carries a nonzero bit")]
    NonzeroFrozen(usize),
    #[error("message layout ({identifier}+{payload}+{crc} bits) does not match code K={k}, C={c}")]
    Layout {
        identifier: usize,
        payload: usize,
        crc: usize,
        k: usize,
        c: usize,
    },
    #[error("CRC check needs at least 17 bits, got {0}")]
    CrcTooShort(usize),
    #[error("invalid channel parameters: {0}")]
    Channel(String),
    #[error("at least two decoding iterations are required (the metric compares consecutive iterations); needed {needed}, got {have}")]
    TooFewIterations { needed: usize, have: usize },
    #[error("cannot rank metrics from different methods or efforts")]
    MixedMetrics,
    #[error("invalid retained-candidate count B={b} for M={m}")]
    RetainedCount { b: usize, m: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("target BLER {target} is not bracketed on [{lo}, {hi}] dB (BLER {bler_lo} .. {bler_hi})")]
    NotBracketed {
        target: f64,
        lo: f64,
        hi: f64,
        bler_lo: f64,
        bler_hi: f64,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
