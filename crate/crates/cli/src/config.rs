//! TOML run configuration shared by every subcommand.

use std::path::{Path, PathBuf};

use rfsurrogate_core::Complex64;
use rfsurrogate_core::CMatrix;
use rfsurrogate_online::LoopConfig;
use rfsurrogate_oracle::{Band, OracleKind, OracleSpec};
use rfsurrogate_vecfit::RationalModel;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleSection {
    pub kind: OracleKind,
    /// Replaces the preset band.
    pub band: Option<Band>,
    /// Synthetic seconds per simulated frequency point.
    pub cost_per_point: Option<f64>,
    /// Rational model text file; the built-in model is used when absent.
    pub model: Option<PathBuf>,
}

impl Default for OracleSection {
    fn default() -> Self {
        Self {
            kind: OracleKind::Si,
            band: None,
            cost_per_point: None,
            model: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitSection {
    /// Touchstone file to fit; the oracle response is used when absent.
    pub input: Option<PathBuf>,
    /// Lattice index of the oracle geometry.
    pub geometry: usize,
    /// Evenly spaced samples taken from the dense grid.
    pub samples: usize,
    pub order: usize,
    pub iterations: usize,
}

impl Default for FitSection {
    fn default() -> Self {
        Self {
            input: None,
            geometry: 0,
            samples: 401,
            order: 16,
            iterations: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AfsSection {
    pub structures: Vec<OracleKind>,
    /// Frequency samples per method.
    pub budget: usize,
    /// Fit order; defaults to the largest the budget supports.
    pub order: Option<usize>,
    pub iterations: usize,
    pub seeds: usize,
    /// Geometries the pilot network is trained on.
    pub pilot_geometries: usize,
    pub pilot_frequencies: usize,
    pub pilot_epochs: usize,
    pub pilot_widths: Vec<usize>,
    pub pilot_learning_rate: f64,
    pub ensemble: usize,
}

impl Default for AfsSection {
    fn default() -> Self {
        Self {
            structures: vec![OracleKind::Bclf, OracleKind::Mtl],
            budget: 20,
            order: None,
            iterations: 20,
            seeds: 10,
            pilot_geometries: 8,
            pilot_frequencies: 41,
            pilot_epochs: 300,
            pilot_widths: vec![32, 32],
            pilot_learning_rate: 1e-3,
            ensemble: 16,
        }
    }
}

impl AfsSection {
    pub fn order(&self) -> usize {
        self.order.unwrap_or(self.budget.saturating_sub(2) / 2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BaselineSection {
    /// Any of `conventional`, `random-uniform`, `random-uaw`, `uaw`.
    pub settings: Vec<String>,
}

impl Default for BaselineSection {
    fn default() -> Self {
        Self {
            settings: ["conventional", "random-uniform", "random-uaw", "uaw"].map(String::from).to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReportSection {
    /// Run directories holding `summary.csv`; defaults to the subdirectories of `out`.
    pub inputs: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub out: PathBuf,
    pub oracle: OracleSection,
    #[serde(rename = "loop")]
    pub online: LoopConfig,
    pub fit: FitSection,
    pub afs: AfsSection,
    pub baseline: BaselineSection,
    pub report: ReportSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            out: PathBuf::from("out"),
            oracle: OracleSection::default(),
            online: LoopConfig::default(),
            fit: FitSection::default(),
            afs: AfsSection::default(),
            baseline: BaselineSection::default(),
            report: ReportSection::default(),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.online.validate().map_err(|e| CliError::Config(e.to_string()))?;
        let a = &self.afs;
        if a.budget < 4 || a.seeds == 0 || a.pilot_geometries == 0 || a.pilot_frequencies == 0 || a.ensemble < 2 {
            return Err(CliError::Config("afs budget, seeds, pilot sizes or ensemble too small".into()));
        }
        if a.order() == 0 || 2 * a.order() + 2 > a.budget {
            return Err(CliError::Config(format!("afs order {} does not fit a budget of {}", a.order(), a.budget)));
        }
        if self.fit.order == 0 || self.fit.iterations == 0 || self.fit.samples < 2 * self.fit.order + 2 {
            return Err(CliError::Config("fit needs order ≥ 1 and at least 2·order + 2 samples".into()));
        }
        for s in &self.baseline.settings {
            if setting(s).is_none() {
                return Err(CliError::Config(format!("unknown baseline setting {s:?}")));
            }
        }
        Ok(())
    }

    /// Oracle for `kind` with this configuration's overrides applied.
    pub fn oracle_for(&self, kind: OracleKind) -> Result<OracleSpec, CliError> {
        let mut spec = if kind == OracleKind::Rational {
            let model = match &self.oracle.model {
                Some(p) => {
                    let text =
                        std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
                    RationalModel::from_text(&text).map_err(|e| CliError::Config(e.to_string()))?
                }
                None => builtin_model(),
            };
            OracleSpec::rational(model, OracleSpec::preset(kind).band)
        } else {
            OracleSpec::preset(kind)
        };
        if let Some(b) = self.oracle.band {
            spec.band = b;
        }
        if let Some(c) = self.oracle.cost_per_point {
            spec.cost_per_point = c;
        }
        spec.dense_grid().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(spec)
    }

    pub fn oracle(&self) -> Result<OracleSpec, CliError> {
        self.oracle_for(self.oracle.kind)
    }
}

/// Setting name to the baseline it runs; `None` in the inner option is the full loop.
pub fn setting(name: &str) -> Option<Option<rfsurrogate_online::Baseline>> {
    use rfsurrogate_online::Baseline::*;
    match name {
        "uaw" => Some(None),
        "conventional" => Some(Some(Conventional)),
        "random-uniform" => Some(Some(RandomUniform)),
        "random-uaw" => Some(Some(RandomUaw)),
        _ => None,
    }
}

/// Reciprocal 2-port with three resonances at 2, 4.5 and 7.5 GHz.
pub fn builtin_model() -> RationalModel {
    let tau = 2.0 * std::f64::consts::PI;
    let mut poles = Vec::new();
    let mut residues = Vec::new();
    for (f, q, r11, r21) in [(2e9, 0.02, 0.3, 0.8), (4.5e9, 0.01, -0.5, 0.6), (7.5e9, 0.03, 0.4, -0.7)] {
        let w = tau * f;
        let p = Complex64::new(-q * w, w);
        let scale = q * w;
        let r = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(r11 * scale, 0.1 * r11 * scale),
                Complex64::new(r21 * scale, -0.2 * r21 * scale),
                Complex64::new(r21 * scale, -0.2 * r21 * scale),
                Complex64::new(-r11 * scale, 0.1 * r11 * scale),
            ],
        );
        poles.push(p);
        poles.push(p.conj());
        residues.push(r.clone());
        residues.push(r.map(|z| z.conj()));
    }
    let d = nalgebra::DMatrix::from_row_slice(2, 2, &[0.1, 0.0, 0.0, 0.1]);
    let e = nalgebra::DMatrix::zeros(2, 2);
    RationalModel::new(poles, residues, d, e, false).expect("built-in model is valid")
}
