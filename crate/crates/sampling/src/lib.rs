//! Uncertainty-driven selection of geometries and frequencies.
//!
//! Geometries are drawn from a mixture of uniform and uncertainty-weighted
//! probabilities; frequencies are chosen so that each selected index covers
//! an equal share of the integrated uncertainty.

mod afs;
mod error;
mod export;
mod field;
mod mixture;

pub use afs::{cumtrapz, uaw_afs, FrequencyDraw};
pub use error::{Result, SamplingError};
pub use export::field_csv;
pub use field::{aggregate_geometry, spread, uncertainty_field, UncertaintyField};
pub use mixture::{mixture_probabilities, sample_geometry, GeometryDraw, MixtureConfig};
