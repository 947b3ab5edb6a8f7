use thiserror::Error;

#[derive(Debug, Error)]
pub enum StbcError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("weight matrices are linearly dependent: rank {rank} < {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("encoder is not real-linear (superposition residual {0:e})")]
    NonLinear(f64),

    #[error("symbol index {index} out of range for K = {k}")]
    IndexOutOfRange { index: usize, k: usize },

    #[error("invalid grouping scheme: {0}")]
    InvalidGrouping(String),

    #[error("unsupported rotation dimension {0}; supported: 1, 2, 3, 4, 5, 6, 8")]
    UnsupportedRotation(usize),

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("rotation is not certified: {0}")]
    Uncertified(String),

    #[error("search space of {size} candidates exceeds the cap of {cap}")]
    SearchSpaceTooLarge { size: u128, cap: u128 },

    #[error("unsupported constellation size M = {0}; expected 4, 16 or 64")]
    UnsupportedConstellation(usize),

    #[error("invalid bit stream: {0}")]
    Bits(String),

    #[error("not enough usable points for a slope fit: {0}")]
    InsufficientPoints(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, StbcError>;
