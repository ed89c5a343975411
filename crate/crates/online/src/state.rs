use std::collections::BTreeSet;
use std::fmt::Write as _;

use rfsurrogate_bnn::BayesNet;
use rfsurrogate_core::fmt::f17;
use rfsurrogate_core::{Dataset, DesignSpace, MetricReport};

/// Frequencies simulated for one selected geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub point_index: usize,
    pub freq_indices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistoryEntry {
    pub iteration: usize,
    /// Validation metrics of the network trained in this iteration.
    pub validation: MetricReport,
    /// Synthetic simulation seconds spent on training data so far, after this iteration.
    pub cumulative_sim_seconds: f64,
    /// Labeled training cells after this iteration.
    pub n_records: usize,
    pub selected: Vec<Selection>,
    /// The geometry draw had no uncertainty mass to follow.
    pub uniform_fallback: bool,
}

#[derive(Debug, Clone)]
pub struct LoopState {
    /// Completed iterations.
    pub iteration: usize,
    /// Training and validation records.
    pub dataset: Dataset,
    /// Lattice indices simulated for training.
    pub explored: BTreeSet<usize>,
    /// Lattice indices reserved for validation.
    pub validation: Vec<usize>,
    pub net: BayesNet,
    pub history: Vec<HistoryEntry>,
    /// Record positions added by the latest iteration (the initial set at first).
    pub recent: Vec<usize>,
    /// Training cells simulated so far.
    pub sim_cells: usize,
    pub cost_per_point: f64,
    /// No unexplored candidates remain.
    pub exhausted: bool,
    /// The validation RMSE fell below the configured threshold.
    pub converged: bool,
}

impl LoopState {
    pub fn sim_seconds(&self) -> f64 {
        self.sim_cells as f64 * self.cost_per_point
    }

    pub fn is_done(&self, max_iterations: usize) -> bool {
        self.exhausted || self.converged || self.iteration >= max_iterations
    }
}

/// `iteration,val_rmse,val_r2,cumulative_sim_seconds,n_records`, 17 digits.
pub fn history_csv(history: &[HistoryEntry]) -> String {
    let mut out = String::from("iteration,val_rmse,val_r2,cumulative_sim_seconds,n_records\n");
    for h in history {
        let r2 = h.validation.r_squared.unwrap_or(f64::NAN);
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            h.iteration,
            f17(h.validation.rmse),
            f17(r2),
            f17(h.cumulative_sim_seconds),
            h.n_records
        );
    }
    out
}

/// `iteration,point_index,<axes>,frequency_index,frequency_hz` for every selected cell.
pub fn selections_csv(history: &[HistoryEntry], space: &DesignSpace, grid: &[f64]) -> String {
    let mut out = String::from("iteration,point_index");
    for a in space.axes() {
        out.push(',');
        out.push_str(&a.name);
    }
    out.push_str(",frequency_index,frequency_hz\n");
    for h in history {
        for s in &h.selected {
            let coords: String = space
                .point(s.point_index)
                .map(|p| p.values.iter().map(|v| format!(",{}", f17(*v))).collect())
                .unwrap_or_default();
            for &k in &s.freq_indices {
                let _ = writeln!(out, "{},{}{coords},{k},{}", h.iteration, s.point_index, f17(grid[k]));
            }
        }
    }
    out
}
