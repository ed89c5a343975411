use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{CoreError, FrequencyGrid, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Magnitudes are clamped to this floor before conversion to dB.
pub const MAG_FLOOR: f64 = 1e-12;

pub fn mag_to_db(mag: f64) -> f64 {
    20.0 * mag.max(MAG_FLOOR).log10()
}

pub fn db_to_mag(db: f64) -> f64 {
    10f64.powf(db / 20.0)
}

/// Multiport complex S-matrix sampled on a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexResponse {
    grid: FrequencyGrid,
    ports: usize,
    data: Vec<CMatrix>,
}

impl ComplexResponse {
    pub fn new(grid: FrequencyGrid, data: Vec<CMatrix>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(CoreError::Shape(format!(
                "{} matrices for {} grid points",
                data.len(),
                grid.len()
            )));
        }
        let ports = data[0].nrows();
        if ports == 0 {
            return Err(CoreError::Shape("zero-port response".into()));
        }
        for (k, m) in data.iter().enumerate() {
            if m.nrows() != ports || m.ncols() != ports {
                return Err(CoreError::Shape(format!(
                    "matrix {k} is {}x{}, expected {ports}x{ports}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        Ok(Self { grid, ports, data })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn ports(&self) -> usize {
        self.ports
    }

    pub fn data(&self) -> &[CMatrix] {
        &self.data
    }

    pub fn at(&self, k: usize) -> &CMatrix {
        &self.data[k]
    }

    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let grid = self.grid.select(indices)?;
        let data = indices.iter().map(|&i| self.data[i].clone()).collect();
        Self::new(grid, data)
    }

    /// Largest |S_ij - S_ji| over the whole sweep.
    pub fn reciprocity_error(&self) -> f64 {
        let mut worst = 0.0_f64;
        for m in &self.data {
            for i in 0..self.ports {
                for j in (i + 1)..self.ports {
                    worst = worst.max((m[(i, j)] - m[(j, i)]).norm());
                }
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|m| m.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }

    /// |S| in dB over every port pair, row-major `(i, j)`.
    pub fn to_db(&self) -> DbResponse {
        let channels = all_channels(self.ports);
        let mut values = Vec::with_capacity(self.grid.len() * channels.len());
        for m in &self.data {
            for &(i, j) in &channels {
                values.push(mag_to_db(m[(i, j)].norm()));
            }
        }
        DbResponse {
            grid: self.grid.clone(),
            channels,
            values,
        }
    }
}

/// Every `(i, j)` port pair of a `ports`-port network, row-major.
pub fn all_channels(ports: usize) -> Vec<(usize, usize)> {
    (0..ports)
        .flat_map(|i| (0..ports).map(move |j| (i, j)))
        .collect()
}

/// Per-port-pair |S| in dB on a frequency grid.
///
/// `values` is row-major: grid point major, channel minor.
#[derive(Debug, Clone, PartialEq)]
pub struct DbResponse {
    grid: FrequencyGrid,
    channels: Vec<(usize, usize)>,
    values: Vec<f64>,
}

impl DbResponse {
    pub fn new(grid: FrequencyGrid, channels: Vec<(usize, usize)>, values: Vec<f64>) -> Result<Self> {
        if channels.is_empty() {
            return Err(CoreError::Shape("no channels".into()));
        }
        if values.len() != grid.len() * channels.len() {
            return Err(CoreError::Shape(format!(
                "{} values for {} points x {} channels",
                values.len(),
                grid.len(),
                channels.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(CoreError::Shape(format!("non-finite dB value {v}")));
        }
        Ok(Self {
            grid,
            channels,
            values,
        })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn channels(&self) -> &[(usize, usize)] {
        &self.channels
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn value(&self, k: usize, c: usize) -> f64 {
        self.values[k * self.channels.len() + c]
    }

    pub fn row(&self, k: usize) -> &[f64] {
        let nc = self.channels.len();
        &self.values[k * nc..(k + 1) * nc]
    }

    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let grid = self.grid.select(indices)?;
        let mut values = Vec::with_capacity(indices.len() * self.channels.len());
        for &k in indices {
            values.extend_from_slice(self.row(k));
        }
        Self::new(grid, self.channels.clone(), values)
    }

    pub fn same_shape(&self, other: &DbResponse) -> bool {
        self.grid == other.grid && self.channels == other.channels
    }
}

/// Conventional `S{i+1}{j+1}` label for a zero-based port pair.
pub fn channel_label((i, j): (usize, usize)) -> String {
    format!("S{}{}", i + 1, j + 1)
}
