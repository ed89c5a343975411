use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rfsurrogate_core::fmt::{f17, parse_f64};
use rfsurrogate_core::{CMatrix, ComplexResponse, FrequencyGrid};

use crate::{Result, VecfitError};

const SINGULAR_DISTANCE: f64 = 1e-30;

/// Pole-residue model with real offset `d` and optional real linear term `e`.
///
/// Complex poles are stored as adjacent `(p, conj(p))` pairs with `Im p > 0`
/// first; their residue matrices are exact conjugates. Real poles have real
/// residues.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalModel {
    poles: Vec<Complex64>,
    residues: Vec<CMatrix>,
    d: DMatrix<f64>,
    e: DMatrix<f64>,
    include_linear: bool,
}

impl RationalModel {
    pub fn new(
        poles: Vec<Complex64>,
        residues: Vec<CMatrix>,
        d: DMatrix<f64>,
        e: DMatrix<f64>,
        include_linear: bool,
    ) -> Result<Self> {
        let p = d.nrows();
        if p == 0 || d.ncols() != p || e.shape() != (p, p) {
            return Err(VecfitError::InvalidModel("d and e must be square and equal".into()));
        }
        if residues.len() != poles.len() {
            return Err(VecfitError::InvalidModel(format!(
                "{} residues for {} poles",
                residues.len(),
                poles.len()
            )));
        }
        if residues.iter().any(|r| r.shape() != (p, p)) {
            return Err(VecfitError::InvalidModel("residue shape differs from d".into()));
        }
        if !include_linear && e.iter().any(|&v| v != 0.0) {
            return Err(VecfitError::InvalidModel("linear term set but disabled".into()));
        }
        let mut n = 0;
        while n < poles.len() {
            let pole = poles[n];
            if !(pole.re.is_finite() && pole.im.is_finite()) {
                return Err(VecfitError::InvalidModel(format!("non-finite pole {pole}")));
            }
            if pole.im == 0.0 {
                if residues[n].iter().any(|z| z.im != 0.0) {
                    return Err(VecfitError::InvalidModel(format!("real pole {n} has complex residue")));
                }
                n += 1;
            } else {
                let ok = pole.im > 0.0
                    && poles.get(n + 1) == Some(&pole.conj())
                    && residues[n].map(|z| z.conj()) == residues[n + 1];
                if !ok {
                    return Err(VecfitError::InvalidModel(format!(
                        "pole {n} ({pole}) is not followed by its exact conjugate"
                    )));
                }
                n += 2;
            }
        }
        Ok(Self {
            poles,
            residues,
            d,
            e,
            include_linear,
        })
    }

    pub fn order(&self) -> usize {
        self.poles.len()
    }

    pub fn ports(&self) -> usize {
        self.d.nrows()
    }

    pub fn poles(&self) -> &[Complex64] {
        &self.poles
    }

    pub fn residues(&self) -> &[CMatrix] {
        &self.residues
    }

    pub fn offset(&self) -> &DMatrix<f64> {
        &self.d
    }

    pub fn linear(&self) -> &DMatrix<f64> {
        &self.e
    }

    pub fn include_linear(&self) -> bool {
        self.include_linear
    }

    pub fn is_stable(&self) -> bool {
        self.poles.iter().all(|p| p.re < 0.0)
    }

    /// `h(s)` at an arbitrary complex `s`.
    pub fn eval_at(&self, s: Complex64) -> Result<CMatrix> {
        let mut h = self.d.map(|v| Complex64::new(v, 0.0));
        if self.include_linear {
            h += self.e.map(|v| s * v);
        }
        for (p, r) in self.poles.iter().zip(&self.residues) {
            let den = s - p;
            if den.norm() < SINGULAR_DISTANCE {
                return Err(VecfitError::Singular { pole: *p, s });
            }
            h += r.map(|z| z / den);
        }
        Ok(h)
    }

    /// Pointwise evaluation at `s = j·2π·f`.
    pub fn evaluate(&self, grid: &FrequencyGrid) -> Result<ComplexResponse> {
        let data = grid
            .points()
            .iter()
            .map(|&f| self.eval_at(Complex64::new(0.0, 2.0 * PI * f)))
            .collect::<Result<Vec<_>>>()?;
        Ok(ComplexResponse::new(grid.clone(), data)?)
    }

    /// Plain-text document; every number carries 17 significant digits.
    pub fn to_text(&self) -> String {
        let p = self.ports();
        let mut out = String::new();
        let _ = writeln!(out, "rational-model 1");
        let _ = writeln!(out, "order {}", self.order());
        let _ = writeln!(out, "ports {p}");
        let _ = writeln!(out, "include_linear {}", self.include_linear);
        for pole in &self.poles {
            let _ = writeln!(out, "pole {} {}", f17(pole.re), f17(pole.im));
        }
        for (n, r) in self.residues.iter().enumerate() {
            let _ = write!(out, "residue {n}");
            for i in 0..p {
                for j in 0..p {
                    let z = r[(i, j)];
                    let _ = write!(out, " {} {}", f17(z.re), f17(z.im));
                }
            }
            out.push('\n');
        }
        for (tag, m) in [("d", &self.d), ("e", &self.e)] {
            let _ = write!(out, "{tag}");
            for i in 0..p {
                for j in 0..p {
                    let _ = write!(out, " {}", f17(m[(i, j)]));
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let perr = |line: usize, message: &str| VecfitError::Parse {
            line,
            message: message.to_string(),
        };
        let mut next = |key: &str| -> Result<(usize, Vec<String>)> {
            let (no, l) = lines.next().ok_or_else(|| perr(0, &format!("missing `{key}` line")))?;
            let mut toks = l.split_whitespace();
            if toks.next() != Some(key) {
                return Err(perr(no, &format!("expected `{key}`")));
            }
            Ok((no, toks.map(str::to_string).collect()))
        };
        let nums = |no: usize, toks: &[String], want: usize| -> Result<Vec<f64>> {
            if toks.len() != want {
                return Err(perr(no, &format!("expected {want} values, found {}", toks.len())));
            }
            toks.iter()
                .map(|t| parse_f64(t).ok_or_else(|| perr(no, &format!("bad number `{t}`"))))
                .collect()
        };
        let (no, v) = next("rational-model")?;
        if v != ["1"] {
            return Err(perr(no, "unsupported version"));
        }
        let (no, v) = next("order")?;
        let order: usize = v.first().and_then(|t| t.parse().ok()).ok_or_else(|| perr(no, "bad order"))?;
        let (no, v) = next("ports")?;
        let p: usize = v.first().and_then(|t| t.parse().ok()).ok_or_else(|| perr(no, "bad ports"))?;
        let (no, v) = next("include_linear")?;
        let include_linear = match v.first().map(String::as_str) {
            Some("true") => true,
            Some("false") => false,
            _ => return Err(perr(no, "bad include_linear")),
        };
        let mut poles = Vec::with_capacity(order);
        for _ in 0..order {
            let (no, v) = next("pole")?;
            let x = nums(no, &v, 2)?;
            poles.push(Complex64::new(x[0], x[1]));
        }
        let mut residues = Vec::with_capacity(order);
        for n in 0..order {
            let (no, v) = next("residue")?;
            if v.first().and_then(|t| t.parse::<usize>().ok()) != Some(n) {
                return Err(perr(no, "residue index out of sequence"));
            }
            let x = nums(no, &v[1..], 2 * p * p)?;
            residues.push(CMatrix::from_fn(p, p, |i, j| {
                let k = 2 * (i * p + j);
                Complex64::new(x[k], x[k + 1])
            }));
        }
        let (no, v) = next("d")?;
        let dv = nums(no, &v, p * p)?;
        let (no, v) = next("e")?;
        let ev = nums(no, &v, p * p)?;
        Self::new(
            poles,
            residues,
            DMatrix::from_row_slice(p, p, &dv),
            DMatrix::from_row_slice(p, p, &ev),
            include_linear,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(v: f64) -> CMatrix {
        CMatrix::from_element(1, 1, Complex64::new(v, 0.0))
    }

    #[test]
    fn no_poles_identity_offset() {
        let m = RationalModel::new(vec![], vec![], DMatrix::identity(2, 2), DMatrix::zeros(2, 2), false).unwrap();
        let grid = FrequencyGrid::linspace(1e6, 1e9, 5).unwrap();
        let r = m.evaluate(&grid).unwrap();
        for h in r.data() {
            assert_eq!(*h, CMatrix::identity(2, 2));
        }
    }

    #[test]
    fn single_real_pole_at_dc() {
        let m = RationalModel::new(
            vec![Complex64::new(-1.0, 0.0)],
            vec![scalar(1.0)],
            DMatrix::zeros(1, 1),
            DMatrix::zeros(1, 1),
            false,
        )
        .unwrap();
        // r / (s - p) = 1 / (0 + 1)
        let h = m.eval_at(Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(h[(0, 0)], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn conjugate_symmetry() {
        let p = Complex64::new(-2e8, 3e9);
        let r = CMatrix::from_element(1, 1, Complex64::new(1e8, -4e7));
        let m = RationalModel::new(
            vec![p, p.conj()],
            vec![r.clone(), r.map(|z| z.conj())],
            DMatrix::from_element(1, 1, 0.3),
            DMatrix::zeros(1, 1),
            false,
        )
        .unwrap();
        for f in [1e7, 4.5e8, 2.9e9, 7e9] {
            let s = Complex64::new(0.0, 2.0 * PI * f);
            let a = m.eval_at(s).unwrap()[(0, 0)];
            let b = m.eval_at(s.conj()).unwrap()[(0, 0)];
            // direct evaluation of the two pole terms
            let direct = 0.3 + r[(0, 0)] / (s - p) + r[(0, 0)].conj() / (s - p.conj());
            assert!((a - direct).norm() < 1e-15 * direct.norm().max(1.0));
            assert!((b - a.conj()).norm() < 1e-15 * a.norm().max(1.0));
        }
    }

    #[test]
    fn rejects_unpaired_conjugates() {
        let p = Complex64::new(-1.0, 2.0);
        let bad = RationalModel::new(
            vec![p, Complex64::new(-1.0, -2.1)],
            vec![scalar(1.0), scalar(1.0)],
            DMatrix::zeros(1, 1),
            DMatrix::zeros(1, 1),
            false,
        );
        assert!(bad.is_err());
    }

    #[test]
    fn singular_evaluation() {
        let m = RationalModel::new(
            vec![Complex64::new(0.0, 0.0)],
            vec![scalar(1.0)],
            DMatrix::zeros(1, 1),
            DMatrix::zeros(1, 1),
            false,
        )
        .unwrap();
        assert!(matches!(
            m.eval_at(Complex64::new(0.0, 0.0)),
            Err(VecfitError::Singular { .. })
        ));
    }

    #[test]
    fn text_round_trip_is_exact() {
        let p = Complex64::new(-1.234_567_890_123_456_7e8, 3.141_592_653_589_793e9);
        let r = CMatrix::from_fn(2, 2, |i, j| Complex64::new(0.1 * (i + 1) as f64 / 3.0, -(j as f64) / 7.0));
        let m = RationalModel::new(
            vec![Complex64::new(-5e9, 0.0), p, p.conj()],
            vec![r.map(|z| Complex64::new(z.re, 0.0)), r.clone(), r.map(|z| z.conj())],
            DMatrix::from_fn(2, 2, |i, j| (i as f64 - j as f64) / 3.0),
            DMatrix::from_fn(2, 2, |i, j| 1e-12 * (i + j) as f64),
            true,
        )
        .unwrap();
        let text = m.to_text();
        assert_eq!(RationalModel::from_text(&text).unwrap(), m);
        assert!(RationalModel::from_text(&text.replace("order 3", "order 4")).is_err());
    }
}
