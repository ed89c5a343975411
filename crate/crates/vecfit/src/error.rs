use rfsurrogate_core::CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VecfitError {
    #[error("need at least {need} frequency samples for order {order}, got {have}")]
    NotEnoughSamples { order: usize, need: usize, have: usize },
    #[error("samples contain non-finite values")]
    NonFinite,
    #[error("least-squares system is rank deficient (condition estimate {condition:.3e})")]
    IllConditioned { condition: f64 },
    #[error("pole {pole} lies on the evaluation point s = {s}")]
    Singular { pole: num_complex::Complex64, s: num_complex::Complex64 },
    #[error("invalid rational model: {0}")]
    InvalidModel(String),
    #[error("invalid fit configuration: {0}")]
    InvalidConfig(String),
    #[error("fit of order {order} failed: {source}")]
    MemberFit {
        order: usize,
        #[source]
        source: Box<VecfitError>,
    },
    #[error("oracle failed at {frequency} Hz after {} samples: {message}", selected.len())]
    Oracle {
        frequency: f64,
        message: String,
        /// Band indices simulated before the failure.
        selected: Vec<usize>,
    },
    #[error("model parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Core(#[from] CoreError),
}
