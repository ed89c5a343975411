//! Rational macromodels `h(s) = d + s·e + Σ r_n / (s − p_n)` of multiport
//! frequency responses.
//!
//! [`fit`] implements vector fitting with relaxed pole relocation in real
//! arithmetic, so poles and residues always come out real or in exact
//! conjugate pairs. [`ensemble_uncertainty`] and [`classic_afs`] provide the
//! multi-order ensemble baseline for adaptive frequency sampling.

mod afs;
mod ensemble;
mod error;
mod fit;
mod linalg;
mod model;

pub use afs::{classic_afs, seed_count, AfsOutcome};
pub use ensemble::{ensemble_uncertainty, EnsembleUncertainty};
pub use error::VecfitError;
pub use fit::{fit, initial_poles, FitConfig, FitOutcome, InitialPoles};
pub use model::RationalModel;

pub type Result<T, E = VecfitError> = std::result::Result<T, E>;
