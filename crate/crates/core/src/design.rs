use serde::{Deserialize, Serialize};

use crate::{CoreError, Result};

/// Length unit of a geometric axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Unit {
    #[serde(rename = "m")]
    Meter,
    #[serde(rename = "mm")]
    Millimeter,
    #[serde(rename = "um")]
    Micrometer,
    #[serde(rename = "1")]
    Dimensionless,
}

impl Unit {
    /// Multiplier converting a value in this unit to SI base units.
    pub fn to_si(self) -> f64 {
        match self {
            Unit::Meter | Unit::Dimensionless => 1.0,
            Unit::Millimeter => 1e-3,
            Unit::Micrometer => 1e-6,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Unit::Meter => "m",
            Unit::Millimeter => "mm",
            Unit::Micrometer => "um",
            Unit::Dimensionless => "1",
        }
    }
}

const LATTICE_TOL: f64 = 1e-9;

/// One geometric parameter sampled on `min, min + step, ..., max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: String,
    pub unit: Unit,
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Axis {
    pub fn new(name: impl Into<String>, unit: Unit, min: f64, max: f64, step: f64) -> Result<Self> {
        let axis = Self {
            name: name.into(),
            unit,
            min,
            max,
            step,
        };
        axis.validate()?;
        Ok(axis)
    }

    fn invalid(&self, reason: impl Into<String>) -> CoreError {
        CoreError::InvalidAxis {
            axis: self.name.clone(),
            reason: reason.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.step.is_finite()) {
            return Err(self.invalid("non-finite bound"));
        }
        if self.max < self.min {
            return Err(self.invalid("max below min"));
        }
        if self.step <= 0.0 {
            return Err(self.invalid("step must be positive"));
        }
        let ratio = (self.max - self.min) / self.step;
        if (ratio - ratio.round()).abs() > LATTICE_TOL {
            return Err(self.invalid(format!("(max - min)/step = {ratio} is not integral")));
        }
        Ok(())
    }

    pub fn count(&self) -> usize {
        ((self.max - self.min) / self.step).round() as usize + 1
    }

    pub fn value(&self, k: usize) -> f64 {
        if k + 1 == self.count() {
            self.max
        } else {
            self.min + self.step * k as f64
        }
    }

    /// Lattice position of `v`, if it lies on the lattice.
    pub fn position(&self, v: f64) -> Option<usize> {
        let t = (v - self.min) / self.step;
        let k = t.round();
        if (t - k).abs() > LATTICE_TOL * t.abs().max(1.0) || k < 0.0 || k as usize >= self.count() {
            None
        } else {
            Some(k as usize)
        }
    }

    /// Affine map of `[min, max]` onto `[-1, 1]`. Degenerate axes map to 0.
    pub fn normalize(&self, v: f64) -> f64 {
        let span = self.max - self.min;
        if span == 0.0 {
            0.0
        } else {
            2.0 * (v - self.min) / span - 1.0
        }
    }
}

/// A concrete geometry: one value per axis, in axis units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignPoint {
    pub values: Vec<f64>,
}

impl DesignPoint {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }
}

/// Cartesian lattice of geometric axes, enumerated row-major (last axis fastest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Axis>", into = "Vec<Axis>")]
pub struct DesignSpace {
    axes: Vec<Axis>,
}

impl DesignSpace {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        for a in &axes {
            a.validate()?;
        }
        Ok(Self { axes })
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn dims(&self) -> usize {
        self.axes.len()
    }

    pub fn axis(&self, name: &str) -> Option<(usize, &Axis)> {
        self.axes.iter().enumerate().find(|(_, a)| a.name == name)
    }

    /// Number of lattice points, `N_d`.
    pub fn size(&self) -> usize {
        self.axes.iter().map(Axis::count).product()
    }

    pub fn point(&self, index: usize) -> Result<DesignPoint> {
        let size = self.size();
        if index >= size {
            return Err(CoreError::IndexOutOfRange { index, size });
        }
        let mut rem = index;
        let mut values = vec![0.0; self.axes.len()];
        for (d, axis) in self.axes.iter().enumerate().rev() {
            let n = axis.count();
            values[d] = axis.value(rem % n);
            rem /= n;
        }
        Ok(DesignPoint { values })
    }

    /// Inverse of [`DesignSpace::point`].
    pub fn index_of(&self, p: &DesignPoint) -> Result<usize> {
        self.check_dims(p)?;
        let mut index = 0usize;
        for (axis, &v) in self.axes.iter().zip(&p.values) {
            let k = axis.position(v).ok_or_else(|| CoreError::OutOfSpace {
                axis: axis.name.clone(),
                value: v,
            })?;
            index = index * axis.count() + k;
        }
        Ok(index)
    }

    /// Checks each value is within its axis bounds (lattice membership is not required).
    pub fn check_bounds(&self, p: &DesignPoint) -> Result<()> {
        self.check_dims(p)?;
        for (axis, &v) in self.axes.iter().zip(&p.values) {
            let slack = LATTICE_TOL * axis.step.max(axis.max.abs());
            if !(v >= axis.min - slack && v <= axis.max + slack) {
                return Err(CoreError::OutOfSpace {
                    axis: axis.name.clone(),
                    value: v,
                });
            }
        }
        Ok(())
    }

    fn check_dims(&self, p: &DesignPoint) -> Result<()> {
        if p.values.len() != self.axes.len() {
            return Err(CoreError::Shape(format!(
                "design point has {} values, space has {} axes",
                p.values.len(),
                self.axes.len()
            )));
        }
        Ok(())
    }

    /// Per-axis affine map onto `[-1, 1]`.
    pub fn normalize(&self, p: &DesignPoint) -> Vec<f64> {
        self.axes
            .iter()
            .zip(&p.values)
            .map(|(a, &v)| a.normalize(v))
            .collect()
    }
}

impl TryFrom<Vec<Axis>> for DesignSpace {
    type Error = CoreError;
    fn try_from(axes: Vec<Axis>) -> Result<Self> {
        Self::new(axes)
    }
}

impl From<DesignSpace> for Vec<Axis> {
    fn from(s: DesignSpace) -> Self {
        s.axes
    }
}
