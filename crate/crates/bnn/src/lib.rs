//! Bayesian neural network surrogate trained by Bayes-by-backprop.
//!
//! A tanh backbone of Bayesian linear layers feeds either a dense head
//! (frequency as an input feature) or a transposed-convolution head that
//! emits a whole spectrum per geometry.

pub mod checkpoint;
pub mod data;
mod error;
pub mod kl;
mod layer;
pub mod net;
mod param;
mod predict;
pub mod scale;
mod train;

pub use error::{BnnError, Result};
pub use layer::{Activation, BayesLinearLayer, BayesTConv1DLayer};
pub use net::{conv_plan, BayesNet, Grads, Head, Mode, NetConfig, Noise, Optimizer};
pub use param::{sigmoid, softplus, softplus_inv, VariationalParam};
pub use predict::Ensemble;
pub use scale::{InputScaler, OutputScaler};
pub use train::{FitHistory, LossBreakdown, TrainData};
