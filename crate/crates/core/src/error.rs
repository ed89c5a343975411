use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoreError {
    #[error("invalid frequency grid: {0}")]
    InvalidGrid(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("r-squared undefined: reference has zero variance")]
    UndefinedRSquared,
    #[error("invalid design axis `{axis}`: {reason}")]
    InvalidAxis { axis: String, reason: String },
    #[error("design point outside space on axis `{axis}`: {value}")]
    OutOfSpace { axis: String, value: f64 },
    #[error("design index {index} out of range (space size {size})")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("duplicate training record at design point {point:?}, frequency {frequency} Hz")]
    DuplicateRecord { point: Vec<f64>, frequency: f64 },
}
