use rfsurrogate_core::CoreError;
use rfsurrogate_vecfit::VecfitError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("{kind} oracle needs a design axis named `{axis}`")]
    MissingAxis { kind: &'static str, axis: &'static str },
    #[error("axis `{axis}` gives non-physical {quantity} = {value:e}")]
    NonPhysical {
        axis: &'static str,
        quantity: &'static str,
        value: f64,
    },
    #[error("frequency {frequency} Hz is outside the band [{min}, {max}] Hz")]
    OutOfBand { frequency: f64, min: f64, max: f64 },
    #[error("invalid band: {0}")]
    InvalidBand(String),
    #[error("rational oracle has no model attached")]
    MissingModel,
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Vecfit(#[from] VecfitError),
}
