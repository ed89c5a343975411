#[derive(Debug, thiserror::Error)]
pub enum LoopError {
    #[error("invalid loop configuration: {0}")]
    Config(String),
    #[error("dataset has no training records")]
    EmptyDataset,
    #[error(transparent)]
    Oracle(#[from] rfsurrogate_oracle::OracleError),
    #[error(transparent)]
    Bnn(#[from] rfsurrogate_bnn::BnnError),
    #[error(transparent)]
    Sampling(#[from] rfsurrogate_sampling::SamplingError),
    #[error(transparent)]
    Core(#[from] rfsurrogate_core::CoreError),
}

pub type Result<T> = std::result::Result<T, LoopError>;
