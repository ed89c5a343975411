use rfsurrogate_bnn::NetConfig;
use serde::{Deserialize, Serialize};

use crate::{LoopError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrequencyPolicy {
    /// Uncertainty-aware selection per geometry.
    Uaw,
    /// Evenly spaced indices, identical for every geometry.
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LoopConfig {
    pub initial_geometries: usize,
    pub initial_frequencies: usize,
    pub batch_geometries: usize,
    pub batch_frequencies: usize,
    /// Held-out geometries simulated on the dense grid.
    pub validation_geometries: usize,
    pub max_iterations: usize,
    /// Stop once the validation RMSE (dB) falls below this value.
    pub rmse_threshold: Option<f64>,
    /// Weight of the uniform component in geometry sampling.
    pub lambda: f64,
    pub frequency_policy: FrequencyPolicy,
    /// Ensemble size for uncertainty and validation predictions.
    pub ensemble: usize,
    /// Largest number of unexplored candidates scored per iteration.
    pub candidate_cap: usize,
    pub net: NetConfig,
    /// Epochs of each warm-started online fit; defaults to a fifth of `net.epochs`.
    pub online_epochs: Option<usize>,
    pub final_epochs: usize,
    /// Continue from the loop's network instead of a fresh one.
    pub final_warm_start: bool,
    pub seed: u64,
}

impl Default for LoopConfig {
    fn default() -> Self {
        Self {
            initial_geometries: 20,
            initial_frequencies: 10,
            batch_geometries: 20,
            batch_frequencies: 20,
            validation_geometries: 20,
            max_iterations: 10,
            rmse_threshold: None,
            lambda: 0.3,
            frequency_policy: FrequencyPolicy::Uaw,
            ensemble: 32,
            candidate_cap: 2000,
            net: NetConfig::default(),
            online_epochs: None,
            final_epochs: 200,
            final_warm_start: false,
            seed: 0,
        }
    }
}

impl LoopConfig {
    pub fn online_epochs(&self) -> usize {
        self.online_epochs.unwrap_or(self.net.epochs / 5)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(LoopError::Config(m.to_string()));
        if self.max_iterations == 0 {
            return bad("max_iterations must be at least 1");
        }
        if self.initial_geometries == 0 || self.initial_frequencies == 0 {
            return bad("the initial dataset must not be empty");
        }
        if self.batch_geometries > 0 && self.batch_frequencies == 0 {
            return bad("batch_frequencies must be positive");
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return bad("lambda must lie in [0, 1]");
        }
        if self.ensemble < 2 {
            return bad("ensemble must be at least 2");
        }
        if self.candidate_cap == 0 {
            return bad("candidate_cap must be positive");
        }
        if let Some(t) = self.rmse_threshold {
            if !(t >= 0.0) {
                return bad("rmse_threshold must be non-negative");
            }
        }
        self.net.validate()?;
        Ok(())
    }

    /// Training cells simulated by a full run that never stops early.
    pub fn budget_cells(&self) -> usize {
        self.initial_geometries * self.initial_frequencies + self.max_iterations * self.batch_geometries * self.batch_frequencies
    }
}
