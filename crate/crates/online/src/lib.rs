//! Online learning loop: train the surrogate, score unexplored geometries
//! by predictive uncertainty, simulate the chosen geometries at
//! uncertainty-selected frequencies, repeat, then train on everything.

mod config;
mod error;
mod run;
mod state;

pub use config::{FrequencyPolicy, LoopConfig};
pub use error::{LoopError, Result};
pub use run::{
    build_net, conventional_seconds, conventional_state, evaluate, finalize, initialize, iterate, run, run_baseline, Baseline, Report,
};
pub use state::{history_csv, selections_csv, HistoryEntry, LoopState, Selection};
