use ndarray::Array2;
use rayon::prelude::*;
use rfsurrogate_bnn::BayesNet;
use rfsurrogate_core::{DesignPoint, FrequencyGrid, RngStream};

use crate::{Result, SamplingError};

/// Candidates evaluated together; fixed so results never depend on the thread count.
const CHUNK: usize = 8;

/// Predictive spread `U(s, x)` in dB, `[candidates × grid]`.
#[derive(Debug, Clone, PartialEq)]
pub struct UncertaintyField {
    /// Caller-chosen label of each candidate (lattice index by convention).
    pub ids: Vec<usize>,
    pub candidates: Vec<DesignPoint>,
    pub grid: FrequencyGrid,
    pub values: Array2<f64>,
}

impl UncertaintyField {
    pub fn new(ids: Vec<usize>, candidates: Vec<DesignPoint>, grid: FrequencyGrid, values: Array2<f64>) -> Result<Self> {
        if ids.len() != candidates.len() || values.dim() != (candidates.len(), grid.len()) {
            return Err(SamplingError::Invalid("field dimensions do not match candidates × grid".into()));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(SamplingError::Invalid("uncertainty must be finite and non-negative".into()));
        }
        Ok(Self {
            ids,
            candidates,
            grid,
            values,
        })
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let g = self.grid.len();
        &self.values.as_slice().expect("standard layout")[i * g..(i + 1) * g]
    }
}

/// Population spread of `members` around their mean, Frobenius-reduced
/// over `channels` consecutive values. Deviations are taken relative to the
/// first member so identical members give exactly zero.
pub fn spread(members: &[&[f64]], channels: usize) -> Vec<f64> {
    let m = members.len() as f64;
    let n = members[0].len();
    let base = members[0];
    let shift: Vec<f64> = (0..n).map(|j| members.iter().map(|s| s[j] - base[j]).sum::<f64>() / m).collect();
    (0..n / channels)
        .map(|cell| {
            let ss: f64 = members
                .iter()
                .map(|s| {
                    (cell * channels..(cell + 1) * channels)
                        .map(|j| (s[j] - base[j] - shift[j]).powi(2))
                        .sum::<f64>()
                })
                .sum();
            (ss / m).sqrt()
        })
        .collect()
}

/// `U(s, x)` from `m` posterior draws of `net` at every candidate and grid frequency.
pub fn uncertainty_field(
    net: &BayesNet,
    ids: Vec<usize>,
    candidates: &[DesignPoint],
    grid: &FrequencyGrid,
    m: usize,
    stream: &RngStream,
) -> Result<UncertaintyField> {
    if m < 2 {
        return Err(SamplingError::Invalid("ensemble size must be at least 2".into()));
    }
    let g = grid.len();
    let nc = net.channels;
    let noises: Vec<_> = (0..m).map(|i| net.member_noise(stream, i)).collect();
    let rows = candidates
        .par_chunks(CHUNK)
        .map(|chunk| -> Result<Vec<f64>> {
            let x = net.query_inputs(chunk, grid)?;
            let draws = noises
                .iter()
                .map(|n| net.predict_sample(&x, Some(n)).map(|y| y.into_raw_vec_and_offset().0))
                .collect::<rfsurrogate_bnn::Result<Vec<_>>>()?;
            let refs: Vec<&[f64]> = draws.iter().map(Vec::as_slice).collect();
            Ok(spread(&refs, nc))
        })
        .collect::<Result<Vec<_>>>()?;
    let values = Array2::from_shape_vec((candidates.len(), g), rows.concat())
        .map_err(|e| SamplingError::Invalid(e.to_string()))?;
    UncertaintyField::new(ids, candidates.to_vec(), grid.clone(), values)
}

/// `U(x) = Σ_s U(s, x)`.
pub fn aggregate_geometry(field: &UncertaintyField) -> Vec<f64> {
    (0..field.candidates.len())
        .map(|i| rfsurrogate_core::sum::neumaier(field.row(i).iter().copied()))
        .collect()
}
