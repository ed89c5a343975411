//! Shared domain types for parametric S-parameter surrogate modeling.
//!
//! Everything here is immutable after construction: frequency grids, complex
//! and dB responses, design-space lattices, labeled datasets, the dB-domain
//! metric suite, and the labeled random streams every stochastic component
//! draws from.

pub mod dataset;
pub mod design;
mod error;
pub mod fmt;
pub mod grid;
pub mod metrics;
pub mod response;
pub mod rng;
pub mod sum;

pub use dataset::{Dataset, Record, Split};
pub use design::{Axis, DesignPoint, DesignSpace, Unit};
pub use error::CoreError;
pub use grid::FrequencyGrid;
pub use metrics::{frobenius_deviation, metrics, MetricReport};
pub use response::{db_to_mag, mag_to_db, CMatrix, ComplexResponse, DbResponse, MAG_FLOOR};
pub use rng::{rng_stream, RngStream};

pub use num_complex::Complex64;

pub type Result<T, E = CoreError> = std::result::Result<T, E>;
