use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("bit stream exhausted: needed {needed} more bits, {available} available")]
    StreamExhausted { needed: u64, available: u64 },

    #[error("rank {rank} out of range for an alphabet of {size} symbols")]
    RankOutOfRange { rank: u64, size: u64 },

    #[error("c = {c} outside [{min}, {max}] for sigma = {sigma}, N = {n}")]
    COutOfRange {
        sigma: u8,
        c: u64,
        n: u64,
        min: u64,
        max: u64,
    },

    #[error("source is not 4-uniform (largest/smallest weight ratio {ratio})")]
    NotFourUniform { ratio: f64 },

    #[error("invalid weighted source: {0}")]
    InvalidSource(&'static str),

    #[error("parameter q = {0} outside the open interval (0, 1)")]
    QOutOfRange(f64),

    #[error("series did not converge at q = {0}")]
    NoConvergence(f64),

    #[error("average-length difference has the same sign at both ends of [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("Huffman construction needs at least one weight")]
    EmptySource,

    #[error("truncated source needs {symbols} symbols, above the cap of {cap}")]
    SourceTooLarge { symbols: u64, cap: u64 },

    #[error("run of ones does not correspond to any signature")]
    MalformedRun,

    #[error("invalid code parameter: {0}")]
    InvalidParameter(String),

    #[error("codeword allocation overflowed at signature {0}")]
    AllocationOverflow(u64),
}

pub type Result<T> = std::result::Result<T, Error>;
