use serde::{Deserialize, Serialize};

use crate::{CoreError, Result};

/// Ordered real frequency axis in Hz.
///
/// Points are strictly increasing, finite and positive. Equality is exact
/// element-wise equality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct FrequencyGrid {
    points: Vec<f64>,
}

impl FrequencyGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(CoreError::InvalidGrid("grid has no points".into()));
        }
        for (i, &f) in points.iter().enumerate() {
            if !f.is_finite() || f <= 0.0 {
                return Err(CoreError::InvalidGrid(format!(
                    "point {i} is not a positive finite frequency: {f}"
                )));
            }
            if i > 0 && f <= points[i - 1] {
                return Err(CoreError::InvalidGrid(format!(
                    "points not strictly increasing at index {i}"
                )));
            }
        }
        Ok(Self { points })
    }

    /// `count` evenly spaced points from `min` to `max` inclusive.
    pub fn linspace(min: f64, max: f64, count: usize) -> Result<Self> {
        match count {
            0 => Err(CoreError::InvalidGrid("grid has no points".into())),
            1 => Self::new(vec![min]),
            _ => {
                let step = (max - min) / (count - 1) as f64;
                let mut pts: Vec<f64> = (0..count).map(|i| min + step * i as f64).collect();
                pts[count - 1] = max;
                Self::new(pts)
            }
        }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.points[0]
    }

    pub fn max(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// Sub-grid at the given indices, which must be strictly increasing.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut pts = Vec::with_capacity(indices.len());
        for &i in indices {
            let f = *self.points.get(i).ok_or_else(|| {
                CoreError::InvalidGrid(format!("index {i} outside grid of {}", self.len()))
            })?;
            pts.push(f);
        }
        Self::new(pts)
    }

    /// Evenly spread indices: `count` positions including both ends.
    pub fn uniform_indices(&self, count: usize) -> Vec<usize> {
        let n = self.len();
        let count = count.min(n);
        match count {
            0 => vec![],
            1 => vec![0],
            _ => (0..count)
                .map(|i| ((i as f64) * (n - 1) as f64 / (count - 1) as f64).round() as usize)
                .collect(),
        }
    }

    /// Position of `f` in the grid when it is exactly a grid point.
    pub fn index_of(&self, f: f64) -> Option<usize> {
        self.points.binary_search_by(|p| p.total_cmp(&f)).ok()
    }
}

impl TryFrom<Vec<f64>> for FrequencyGrid {
    type Error = CoreError;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<FrequencyGrid> for Vec<f64> {
    fn from(g: FrequencyGrid) -> Self {
        g.points
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(FrequencyGrid::new(vec![]).is_err());
        assert!(FrequencyGrid::new(vec![1.0, 1.0]).is_err());
        assert!(FrequencyGrid::new(vec![2.0, 1.0]).is_err());
        assert!(FrequencyGrid::new(vec![0.0, 1.0]).is_err());
        assert!(FrequencyGrid::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn linspace_hits_both_ends() {
        let g = FrequencyGrid::linspace(1e9, 8e9, 401).unwrap();
        assert_eq!(g.len(), 401);
        assert_eq!(g.min(), 1e9);
        assert_eq!(g.max(), 8e9);
    }

    #[test]
    fn uniform_indices_span_grid() {
        let g = FrequencyGrid::linspace(1.0, 100.0, 401).unwrap();
        let idx = g.uniform_indices(20);
        assert_eq!(idx.len(), 20);
        assert_eq!(idx[0], 0);
        assert_eq!(idx[19], 400);
        assert!(idx.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn equality_is_exact() {
        let a = FrequencyGrid::new(vec![1.0, 2.0]).unwrap();
        let b = FrequencyGrid::new(vec![1.0, 2.0 + 1e-15]).unwrap();
        assert_ne!(a, b);
        assert_eq!(a, a.clone());
    }
}
