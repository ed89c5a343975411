//! Analytic S-parameter generators standing in for a full-wave solver.
//!
//! Three parametric 2-ports (coupled-line bandpass filter, on-chip spiral
//! inductor, grounded coplanar transmission line) plus a kind that evaluates
//! a stored [`RationalModel`]. Each simulated frequency point is charged a
//! fixed synthetic cost so sampling strategies can be compared by budget.

mod error;
pub mod network;
pub mod structures;

use std::fmt;

use num_complex::Complex64;
use rfsurrogate_core::{
    Axis, CMatrix, ComplexResponse, DbResponse, DesignPoint, DesignSpace, FrequencyGrid, Unit,
};
use rfsurrogate_vecfit::RationalModel;
use serde::{Deserialize, Serialize};

pub use error::OracleError;
use structures::{BclfGeometry, MtlGeometry, SiGeometry};

pub type Result<T, E = OracleError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleKind {
    Mtl,
    Bclf,
    Si,
    Rational,
}

impl OracleKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Mtl => "mtl",
            Self::Bclf => "bclf",
            Self::Si => "si",
            Self::Rational => "rational",
        }
    }
}

impl fmt::Display for OracleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Frequency band and dense-grid resolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Band {
    /// Hz.
    pub min: f64,
    /// Hz.
    pub max: f64,
    pub count: usize,
}

impl Band {
    pub fn grid(&self) -> Result<FrequencyGrid> {
        if !(self.min > 0.0 && self.max >= self.min && self.max.is_finite()) || self.count == 0 {
            return Err(OracleError::InvalidBand(format!(
                "[{}, {}] Hz with {} points",
                self.min, self.max, self.count
            )));
        }
        if self.count > 1 && self.max == self.min {
            return Err(OracleError::InvalidBand("empty band with several points".into()));
        }
        if self.count == 1 {
            return Ok(FrequencyGrid::new(vec![self.min])?);
        }
        Ok(FrequencyGrid::linspace(self.min, self.max, self.count)?)
    }

    pub fn contains(&self, f: f64) -> bool {
        let slack = 1e-9 * self.max;
        f >= self.min - slack && f <= self.max + slack
    }
}

/// Material and process constants. Lengths in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    pub eps_r: f64,
    pub height: f64,
    pub loss_tangent: f64,
    /// S/m.
    pub conductivity: f64,
    /// Ignored by the transmission line, whose thickness is a design axis.
    pub metal_thickness: f64,
    /// Spiral turns.
    pub turns: u32,
    pub oxide_eps_r: f64,
    /// Oxide between spiral and substrate.
    pub oxide_thickness: f64,
    /// Oxide between spiral and underpass.
    pub underpass_thickness: f64,
    /// Substrate capacitance per area, F/m².
    pub substrate_capacitance: f64,
    /// Substrate conductance per area, S/m².
    pub substrate_conductance: f64,
}

impl Constants {
    pub fn for_kind(kind: OracleKind) -> Self {
        let pcb = Self {
            eps_r: 3.66,
            height: 0.508e-3,
            loss_tangent: 0.0037,
            conductivity: 5.8e7,
            metal_thickness: 35e-6,
            turns: 3,
            oxide_eps_r: 3.9,
            oxide_thickness: 3e-6,
            underpass_thickness: 0.5e-6,
            substrate_capacitance: 4e-6,
            substrate_conductance: 1e5,
        };
        match kind {
            OracleKind::Bclf | OracleKind::Rational => pcb,
            OracleKind::Mtl => Self {
                height: 0.8e-3,
                ..pcb
            },
            OracleKind::Si => Self {
                conductivity: 3e7,
                metal_thickness: 2e-6,
                ..pcb
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleSpec {
    pub kind: OracleKind,
    pub space: DesignSpace,
    pub band: Band,
    pub constants: Constants,
    /// Synthetic seconds charged per simulated frequency point.
    pub cost_per_point: f64,
    #[serde(skip)]
    pub model: Option<RationalModel>,
}

fn axis(name: &str, unit: Unit, min: f64, max: f64, step: f64) -> Axis {
    Axis::new(name, unit, min, max, step).expect("preset axes are valid")
}

impl OracleSpec {
    /// Default lattice, band and constants for a physical kind. Costs make a
    /// 401-point sweep take 21.5, 34.0 and 16.8 minutes for the filter,
    /// inductor and line respectively.
    pub fn preset(kind: OracleKind) -> Self {
        use Unit::{Micrometer as Um, Millimeter as Mm};
        let (axes, band, sweep_minutes) = match kind {
            OracleKind::Bclf => (
                vec![
                    axis("L", Mm, 7.7, 7.9, 0.1),
                    axis("L1", Mm, 8.0, 8.2, 0.1),
                    axis("L2", Mm, 7.8, 8.0, 0.1),
                    axis("W", Mm, 0.9, 1.1, 0.1),
                    axis("W1", Mm, 0.7, 0.9, 0.1),
                    axis("W2", Mm, 0.9, 1.1, 0.1),
                    axis("S1", Mm, 0.13, 0.16, 0.03),
                    axis("S2", Mm, 0.55, 0.6, 0.05),
                ],
                (1e9, 8e9),
                21.5,
            ),
            OracleKind::Si => (
                vec![
                    axis("Din", Um, 55.0, 60.0, 1.0),
                    axis("S", Um, 1.5, 2.0, 0.1),
                    axis("W", Um, 15.0, 20.0, 0.5),
                ],
                (0.1e9, 20e9),
                34.0,
            ),
            OracleKind::Mtl => (
                vec![
                    axis("S", Mm, 1.5, 2.0, 0.1),
                    axis("L", Mm, 25.0, 30.0, 1.0),
                    axis("T", Um, 25.0, 30.0, 1.0),
                    axis("W", Mm, 2.5, 3.0, 0.1),
                ],
                (0.1e9, 10e9),
                16.8,
            ),
            OracleKind::Rational => (vec![], (1e8, 1e10), 401.0 / 60.0),
        };
        Self {
            kind,
            space: DesignSpace::new(axes).expect("preset space is valid"),
            band: Band {
                min: band.0,
                max: band.1,
                count: 401,
            },
            constants: Constants::for_kind(kind),
            cost_per_point: sweep_minutes * 60.0 / 401.0,
            model: None,
        }
    }

    /// Oracle returning `model` regardless of the (empty) design point.
    pub fn rational(model: RationalModel, band: Band) -> Self {
        Self {
            band,
            model: Some(model),
            ..Self::preset(OracleKind::Rational)
        }
    }

    pub fn dense_grid(&self) -> Result<FrequencyGrid> {
        self.band.grid()
    }

    /// Full S-matrix at one frequency.
    pub fn simulate_at(&self, x: &DesignPoint, f: f64) -> Result<CMatrix> {
        self.simulator(x)?.at(f)
    }

    pub fn simulate(&self, x: &DesignPoint, frequencies: &FrequencyGrid) -> Result<ComplexResponse> {
        let sim = self.simulator(x)?;
        for &f in frequencies.points() {
            if !self.band.contains(f) {
                return Err(OracleError::OutOfBand {
                    frequency: f,
                    min: self.band.min,
                    max: self.band.max,
                });
            }
        }
        let data = frequencies.points().iter().map(|&f| sim.at(f)).collect::<Result<Vec<_>>>()?;
        Ok(ComplexResponse::new(frequencies.clone(), data)?)
    }

    /// Dense-grid response in dB.
    pub fn dense_reference(&self, x: &DesignPoint) -> Result<DbResponse> {
        Ok(self.simulate(x, &self.dense_grid()?)?.to_db())
    }

    /// Synthetic seconds for a list of `(design point, frequency count)` simulations.
    pub fn cost_ledger<'a>(&self, events: impl IntoIterator<Item = (&'a DesignPoint, usize)>) -> f64 {
        cost_ledger(self.cost_per_point, events.into_iter().map(|(_, n)| n))
    }

    /// Resolves the design point into a per-frequency evaluator.
    pub fn simulator(&self, x: &DesignPoint) -> Result<Simulator<'_>> {
        self.space.check_bounds(x)?;
        let get = |name: &'static str| -> Result<f64> {
            let (i, a) = self.space.axis(name).ok_or(OracleError::MissingAxis {
                kind: self.kind.name(),
                axis: name,
            })?;
            Ok(x.values[i] * a.unit.to_si())
        };
        let positive = |name: &'static str| -> Result<f64> {
            let v = get(name)?;
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(OracleError::NonPhysical {
                    axis: name,
                    quantity: "length",
                    value: v,
                })
            }
        };
        let k = &self.constants;
        let geometry = match self.kind {
            OracleKind::Bclf => Geometry::Bclf(BclfGeometry {
                l: positive("L")?,
                l1: positive("L1")?,
                l2: positive("L2")?,
                w: positive("W")?,
                w1: positive("W1")?,
                w2: positive("W2")?,
                s1: positive("S1")?,
                s2: positive("S2")?,
            }),
            OracleKind::Si => {
                let g = SiGeometry {
                    din: positive("Din")?,
                    s: positive("S")?,
                    w: positive("W")?,
                };
                let e = structures::si_elements(&g, self.band.max, k);
                for (quantity, v) in [
                    ("inductance", e.ls),
                    ("series resistance", e.rs),
                    ("feed-through capacitance", e.cs),
                    ("oxide capacitance", e.cox),
                ] {
                    if !(v > 0.0 && v.is_finite()) {
                        return Err(OracleError::NonPhysical {
                            axis: "W",
                            quantity,
                            value: v,
                        });
                    }
                }
                Geometry::Si(g)
            }
            OracleKind::Mtl => {
                let l = get("L")?;
                if !(l >= 0.0 && l.is_finite()) {
                    return Err(OracleError::NonPhysical {
                        axis: "L",
                        quantity: "length",
                        value: l,
                    });
                }
                let g = MtlGeometry {
                    s: positive("S")?,
                    l,
                    t: positive("T")?,
                    w: positive("W")?,
                };
                let (z, eeff) = structures::grounded_cpw(g.w, g.s, g.t, k);
                if !(z > 0.0 && z.is_finite()) {
                    return Err(OracleError::NonPhysical {
                        axis: "W",
                        quantity: "characteristic impedance",
                        value: z,
                    });
                }
                if !(eeff >= 1.0) {
                    return Err(OracleError::NonPhysical {
                        axis: "S",
                        quantity: "effective permittivity",
                        value: eeff,
                    });
                }
                Geometry::Mtl(g)
            }
            OracleKind::Rational => Geometry::Rational(self.model.as_ref().ok_or(OracleError::MissingModel)?),
        };
        Ok(Simulator {
            geometry,
            constants: *k,
        })
    }
}

enum Geometry<'a> {
    Bclf(BclfGeometry),
    Si(SiGeometry),
    Mtl(MtlGeometry),
    Rational(&'a RationalModel),
}

/// A design point bound to its oracle.
pub struct Simulator<'a> {
    geometry: Geometry<'a>,
    constants: Constants,
}

impl Simulator<'_> {
    pub fn at(&self, f: f64) -> Result<CMatrix> {
        let k = &self.constants;
        Ok(match &self.geometry {
            Geometry::Bclf(g) => structures::bclf(g, f, k),
            Geometry::Si(g) => structures::si(g, f, k),
            Geometry::Mtl(g) => structures::mtl(g, f, k),
            Geometry::Rational(m) => m.eval_at(Complex64::new(0.0, 2.0 * std::f64::consts::PI * f))?,
        })
    }
}

/// Total synthetic seconds for simulations of the given frequency counts.
pub fn cost_ledger(cost_per_point: f64, counts: impl IntoIterator<Item = usize>) -> f64 {
    counts.into_iter().map(|n| n as f64 * cost_per_point).sum()
}
