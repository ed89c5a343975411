//! dB-domain error metrics.
//!
//! MAE, MSE and RMSE are symmetric under swapping reference and estimate.
//! R² and PSNR are not: both are normalized by statistics of the reference
//! (its variance about its own mean, and its peak magnitude).

use std::fmt::Write as _;

use crate::{fmt, sum::neumaier, CMatrix, CoreError, DbResponse, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricReport {
    pub mae: f64,
    pub mse: f64,
    pub rmse: f64,
    /// `None` when the reference is constant.
    pub r_squared: Option<f64>,
    /// `f64::INFINITY` when the estimate is exact.
    pub psnr: f64,
}

impl MetricReport {
    pub fn r_squared(&self) -> Result<f64> {
        self.r_squared.ok_or(CoreError::UndefinedRSquared)
    }

    /// Rows in CSV order; an undefined R² is reported as NaN.
    pub fn rows(&self) -> [(&'static str, f64); 5] {
        [
            ("mae", self.mae),
            ("mse", self.mse),
            ("rmse", self.rmse),
            ("r_squared", self.r_squared.unwrap_or(f64::NAN)),
            ("psnr", self.psnr),
        ]
    }

    /// `metric,value` CSV with 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric,value\n");
        for (name, v) in self.rows() {
            let _ = writeln!(out, "{name},{}", fmt::sig(v, 12));
        }
        out
    }
}

/// Metrics over every (grid point, channel) cell.
pub fn metrics(reference: &DbResponse, estimate: &DbResponse) -> Result<MetricReport> {
    if !reference.same_shape(estimate) {
        return Err(CoreError::Shape(
            "reference and estimate differ in grid or channels".into(),
        ));
    }
    metrics_slices(reference.values(), estimate.values())
}

/// Same reductions on raw, equally shaped value slices.
pub fn metrics_slices(reference: &[f64], estimate: &[f64]) -> Result<MetricReport> {
    if reference.len() != estimate.len() || reference.is_empty() {
        return Err(CoreError::Shape(format!(
            "{} reference cells vs {} estimate cells",
            reference.len(),
            estimate.len()
        )));
    }
    let n = reference.len() as f64;
    let diffs = || reference.iter().zip(estimate).map(|(r, e)| e - r);
    let mae = neumaier(diffs().map(f64::abs)) / n;
    let ss_res = neumaier(diffs().map(|d| d * d));
    let mse = ss_res / n;
    let rmse = mse.sqrt();
    let mean = neumaier(reference.iter().copied()) / n;
    let ss_tot = neumaier(reference.iter().map(|r| (r - mean) * (r - mean)));
    let r_squared = (ss_tot > 0.0).then(|| 1.0 - ss_res / ss_tot);
    let peak = reference.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
    let psnr = if rmse == 0.0 {
        f64::INFINITY
    } else {
        20.0 * (peak / rmse).log10()
    };
    Ok(MetricReport {
        mae,
        mse,
        rmse,
        r_squared,
        psnr,
    })
}

/// `sqrt(sum_ij |a_ij - b_ij|^2)`.
pub fn frobenius_deviation(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(CoreError::Shape(format!(
            "{:?} vs {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(neumaier(a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm_sqr())).sqrt())
}
