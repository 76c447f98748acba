use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite entry at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize },
    #[error("matrix has an empty dimension")]
    EmptyDimension,
    #[error("row {row} has {found} entries, expected {expected}")]
    RaggedRows { row: usize, expected: usize, found: usize },
    #[error("weight {index} is negative ({value})")]
    NegativeWeight { index: usize, value: f64 },
    #[error("weights sum to {sum}, not 1")]
    SumNotOne { sum: f64 },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(&'static str),
    #[error("simplex exceeded {0} pivots")]
    CycleLimitExceeded(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(&'static str),
    #[error("t = {0} is outside (0, 1)")]
    TOutOfRange(f64),
    #[error("s = {0} is outside (0, 1)")]
    SOutOfRange(f64),
    #[error("coefficient enumeration would generate {0} candidates, over the cap")]
    DepthTooLarge(usize),
    #[error("no pairwise t-convexlike witness for rows ({0}, {1})")]
    NotTConvexlike(usize, usize),
    #[error("shape mismatch: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    ShapeMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("index {index} out of range for {len} rows")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("cycle must be nonempty")]
    EmptyCycle,
    #[error("K must be nonnegative and finite, got {0}")]
    NegativeK(f64),
    #[error("shape {rows}x{cols} exceeds the cap {cap}x{cap}")]
    ShapeCap { rows: usize, cols: usize, cap: usize },
    #[error("window [{start}, {end}] invalid for {len} functions")]
    BadWindow { start: usize, end: usize, len: usize },
    #[error("targets must be positive and strictly decreasing")]
    BadTargets,
}
