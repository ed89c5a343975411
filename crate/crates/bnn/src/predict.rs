use ndarray::Array2;
use rayon::prelude::*;
use rfsurrogate_core::RngStream;

use crate::net::Noise;
use crate::{BayesNet, BnnError, Result};

/// Posterior predictive draws in physical units.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub samples: Vec<Array2<f64>>,
    pub mean: Array2<f64>,
}

impl BayesNet {
    /// Weight draw of ensemble member `m`; depends only on `(stream, m)`.
    pub fn member_noise(&self, stream: &RngStream, m: usize) -> Noise {
        self.sample_noise(&mut stream.indexed(m as u64))
    }

    /// `m` posterior samples evaluated at raw inputs `x`, members in parallel.
    pub fn ensemble_predict(&self, x: &Array2<f64>, m: usize, stream: &RngStream) -> Result<Ensemble> {
        if m < 2 {
            return Err(BnnError::Config("ensemble size must be at least 2".into()));
        }
        let samples = (0..m)
            .into_par_iter()
            .map(|i| self.predict_sample(x, Some(&self.member_noise(stream, i))))
            .collect::<Result<Vec<_>>>()?;
        let mut mean = Array2::zeros(samples[0].dim());
        for s in &samples {
            mean += s;
        }
        mean /= m as f64;
        Ok(Ensemble { samples, mean })
    }
}
