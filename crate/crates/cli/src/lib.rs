//! Command-line surface: configuration, Touchstone codec and the experiment
//! runners behind each subcommand.

pub mod commands;
pub mod config;
pub mod touchstone;

pub use commands::{cmd_afs, cmd_baseline, cmd_fit, cmd_loop, cmd_report, AfsRow, Common};
pub use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Touchstone(#[from] touchstone::TouchstoneError),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl CliError {
    /// 1 for configuration and input problems, 2 for failures during a run.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Touchstone(_) => 1,
            CliError::Numerical(_) | CliError::Io { .. } => 2,
        }
    }
}

impl From<rfsurrogate_online::LoopError> for CliError {
    fn from(e: rfsurrogate_online::LoopError) -> Self {
        match e {
            rfsurrogate_online::LoopError::Config(m) => CliError::Config(m),
            e => CliError::Numerical(e.to_string()),
        }
    }
}

macro_rules! numerical {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Numerical(e.to_string())
            }
        }
    )*};
}

numerical!(
    rfsurrogate_vecfit::VecfitError,
    rfsurrogate_bnn::BnnError,
    rfsurrogate_sampling::SamplingError,
    rfsurrogate_oracle::OracleError,
    rfsurrogate_core::CoreError
);
