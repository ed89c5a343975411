use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::{BnnError, Result};

/// Per-feature affine map of `[lo, hi]` onto `[−1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputScaler {
    #[serde(with = "crate::checkpoint::f17_vec")]
    pub lo: Vec<f64>,
    #[serde(with = "crate::checkpoint::f17_vec")]
    pub hi: Vec<f64>,
}

impl InputScaler {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.iter().zip(&hi).any(|(a, b)| !(a <= b) || !a.is_finite() || !b.is_finite()) {
            return Err(BnnError::Config("input bounds must be finite with lo ≤ hi".into()));
        }
        Ok(Self { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn apply(&self, j: usize, v: f64) -> f64 {
        let span = self.hi[j] - self.lo[j];
        if span > 0.0 {
            2.0 * (v - self.lo[j]) / span - 1.0
        } else {
            0.0
        }
    }

    pub fn transform(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.dim() {
            return Err(BnnError::Shape(format!("input has {} features, scaler expects {}", x.ncols(), self.dim())));
        }
        Ok(Array2::from_shape_fn(x.dim(), |(i, j)| self.apply(j, x[(i, j)])))
    }
}

/// Per-channel z-score. Column `u` of an output row belongs to channel `u % channels`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputScaler {
    #[serde(with = "crate::checkpoint::f17_vec")]
    pub mean: Vec<f64>,
    #[serde(with = "crate::checkpoint::f17_vec")]
    pub std: Vec<f64>,
}

impl OutputScaler {
    pub fn identity(channels: usize) -> Self {
        Self {
            mean: vec![0.0; channels],
            std: vec![1.0; channels],
        }
    }

    /// Statistics over the observed entries of `y`.
    pub fn fit(y: &Array2<f64>, mask: Option<&Array2<bool>>, channels: usize) -> Result<Self> {
        let mut n = vec![0usize; channels];
        let mut sum = vec![0.0; channels];
        for ((i, u), &v) in y.indexed_iter() {
            if mask.is_none_or(|m| m[(i, u)]) {
                n[u % channels] += 1;
                sum[u % channels] += v;
            }
        }
        if n.contains(&0) {
            return Err(BnnError::Config("every output channel needs at least one observation".into()));
        }
        let mean: Vec<f64> = sum.iter().zip(&n).map(|(s, &k)| s / k as f64).collect();
        let mut ss = vec![0.0; channels];
        for ((i, u), &v) in y.indexed_iter() {
            if mask.is_none_or(|m| m[(i, u)]) {
                ss[u % channels] += (v - mean[u % channels]).powi(2);
            }
        }
        let std = ss
            .iter()
            .zip(&n)
            .map(|(s, &k)| {
                let sd = (s / k as f64).sqrt();
                if sd > 1e-12 { sd } else { 1.0 }
            })
            .collect();
        Ok(Self { mean, std })
    }

    pub fn transform(&self, y: &Array2<f64>) -> Array2<f64> {
        let c = self.mean.len();
        Array2::from_shape_fn(y.dim(), |(i, u)| (y[(i, u)] - self.mean[u % c]) / self.std[u % c])
    }

    pub fn inverse_inplace(&self, y: &mut Array2<f64>, channels: usize) {
        debug_assert_eq!(channels, self.mean.len());
        for ((_, u), v) in y.indexed_iter_mut() {
            *v = *v * self.std[u % channels] + self.mean[u % channels];
        }
    }
}
