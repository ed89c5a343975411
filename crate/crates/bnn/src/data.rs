//! Conversion between labeled datasets and network rows.
//!
//! Both modes share one output layout: a geometry's spectrum occupies
//! `grid_len · channels` consecutive values, frequency-major.

use ndarray::Array2;
use rfsurrogate_core::{Dataset, DesignPoint, DesignSpace, FrequencyGrid, Split};

use crate::net::Mode;
use crate::scale::InputScaler;
use crate::{BayesNet, BnnError, Result, TrainData};

/// Geometry bounds, plus the band edges in point mode.
pub fn input_scaler(space: &DesignSpace, grid: &FrequencyGrid, mode: Mode) -> Result<InputScaler> {
    let mut lo: Vec<f64> = space.axes().iter().map(|a| a.min).collect();
    let mut hi: Vec<f64> = space.axes().iter().map(|a| a.max).collect();
    if mode == Mode::Point {
        lo.push(grid.min());
        hi.push(grid.max());
    }
    InputScaler::new(lo, hi)
}

fn channels_of(ds: &Dataset, split: Split) -> Result<usize> {
    let mut it = ds.split(split);
    let first = it.next().ok_or_else(|| BnnError::Shape("no records in the requested split".into()))?;
    let ch = first.response.channels();
    if ds.split(split).any(|r| r.response.channels() != ch) {
        return Err(BnnError::Shape("records disagree on output channels".into()));
    }
    Ok(ch.len())
}

/// One row per labeled (geometry, frequency) cell.
pub fn point_rows(ds: &Dataset, split: Split) -> Result<TrainData> {
    let nc = channels_of(ds, split)?;
    let grid = ds.grid().points();
    let recs: Vec<_> = ds.split(split).collect();
    let dims = recs[0].point.values.len();
    let n: usize = recs.iter().map(|r| r.cells()).sum();
    let mut x = Array2::zeros((n, dims + 1));
    let mut y = Array2::zeros((n, nc));
    let mut row = 0;
    for r in recs {
        for (k, &fi) in r.freq_indices.iter().enumerate() {
            for (j, &v) in r.point.values.iter().enumerate() {
                x[(row, j)] = v;
            }
            x[(row, dims)] = grid[fi];
            for c in 0..nc {
                y[(row, c)] = r.response.value(k, c);
            }
            row += 1;
        }
    }
    TrainData::new(x, y, None)
}

/// One row per geometry covering the whole parent grid; unsimulated
/// frequencies are masked out.
pub fn vector_rows(ds: &Dataset, split: Split) -> Result<TrainData> {
    let nc = channels_of(ds, split)?;
    let g = ds.grid().len();
    let recs: Vec<_> = ds.split(split).collect();
    let dims = recs[0].point.values.len();
    let mut x = Array2::zeros((recs.len(), dims));
    let mut y = Array2::zeros((recs.len(), g * nc));
    let mut mask = Array2::from_elem((recs.len(), g * nc), false);
    for (i, r) in recs.iter().enumerate() {
        for (j, &v) in r.point.values.iter().enumerate() {
            x[(i, j)] = v;
        }
        for (k, &fi) in r.freq_indices.iter().enumerate() {
            for c in 0..nc {
                y[(i, fi * nc + c)] = r.response.value(k, c);
                mask[(i, fi * nc + c)] = true;
            }
        }
    }
    TrainData::new(x, y, Some(mask))
}

pub fn rows_for(mode: Mode, ds: &Dataset, split: Split) -> Result<TrainData> {
    match mode {
        Mode::Point => point_rows(ds, split),
        Mode::Vector => vector_rows(ds, split),
    }
}

impl BayesNet {
    /// Raw network inputs that cover every frequency of `grid` for each point.
    pub fn query_inputs(&self, points: &[DesignPoint], grid: &FrequencyGrid) -> Result<Array2<f64>> {
        let dims = match self.config.mode {
            Mode::Point => self.input_dim - 1,
            Mode::Vector => self.input_dim,
        };
        if points.iter().any(|p| p.values.len() != dims) {
            return Err(BnnError::Shape(format!("design points must have {dims} coordinates")));
        }
        Ok(match self.config.mode {
            Mode::Point => {
                let g = grid.len();
                Array2::from_shape_fn((points.len() * g, dims + 1), |(r, j)| {
                    if j < dims { points[r / g].values[j] } else { grid.points()[r % g] }
                })
            }
            Mode::Vector => {
                if grid.len() != self.out_len {
                    return Err(BnnError::Shape(format!(
                        "vector head predicts {} frequencies, grid has {}",
                        self.out_len,
                        grid.len()
                    )));
                }
                Array2::from_shape_fn((points.len(), dims), |(r, j)| points[r].values[j])
            }
        })
    }

    /// Network outputs for [`Self::query_inputs`] regrouped as
    /// `[points × (grid_len · channels)]`.
    pub fn to_spectra(&self, y: Array2<f64>, n_points: usize) -> Result<Array2<f64>> {
        let cols = y.len() / n_points.max(1);
        let y = if y.is_standard_layout() { y } else { y.as_standard_layout().to_owned() };
        y.into_shape_with_order((n_points, cols))
            .map_err(|e| BnnError::Shape(e.to_string()))
    }
}
