use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value {value} at point {point:?}")]
    NonFinite { point: Vec<f64>, value: String },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("zero denominator: {0}")]
    ZeroDenominator(String),

    #[error("box mollifier of width 1/{k} is thinner than one cell (h = {spacing}); increase N")]
    UnresolvedMollifier { k: u32, spacing: f64 },

    #[error("dyadic range [{j_min}, {j_max}] is not representable on this grid: {reason}")]
    DyadicRange { j_min: i32, j_max: i32, reason: String },

    #[error("empty time grid")]
    EmptyTimeGrid,
}
