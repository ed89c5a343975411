use rfsurrogate_core::CoreError;

#[derive(Debug, thiserror::Error)]
pub enum BnnError {
    #[error("invalid network configuration: {0}")]
    Config(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("non-finite {what} in {layer}")]
    NonFinite { layer: String, what: String },
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

pub type Result<T> = std::result::Result<T, BnnError>;
