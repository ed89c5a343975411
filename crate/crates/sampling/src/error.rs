#[derive(Debug, thiserror::Error)]
pub enum SamplingError {
    #[error("invalid sampling request: {0}")]
    Invalid(String),
    #[error("batch of {batch} exceeds the {pool} unexplored candidates")]
    PoolTooSmall { batch: usize, pool: usize },
    #[error(transparent)]
    Bnn(#[from] rfsurrogate_bnn::BnnError),
    #[error(transparent)]
    Core(#[from] rfsurrogate_core::CoreError),
}

pub type Result<T> = std::result::Result<T, SamplingError>;
