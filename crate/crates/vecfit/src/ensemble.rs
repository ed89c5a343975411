use rfsurrogate_core::{frobenius_deviation, sum::neumaier, ComplexResponse, FrequencyGrid};

use crate::{fit, FitConfig, FitOutcome, Result, VecfitError};

#[derive(Debug, Clone)]
pub struct EnsembleUncertainty {
    /// Largest pairwise Frobenius deviation at each frequency of the evaluation grid.
    pub per_frequency: Vec<f64>,
    /// Largest pairwise RMS deviation over the whole evaluation grid.
    pub band_rmsd: f64,
    /// One fit per requested order, in request order.
    pub members: Vec<(usize, FitOutcome)>,
}

/// Fits one model per order with `base` as the template configuration and
/// measures their disagreement on `dense`.
pub fn ensemble_uncertainty(
    samples: &ComplexResponse,
    orders: &[usize],
    dense: &FrequencyGrid,
    base: &FitConfig,
) -> Result<EnsembleUncertainty> {
    if orders.len() < 2 {
        return Err(VecfitError::InvalidConfig("an ensemble needs at least two orders".into()));
    }
    let mut members = Vec::with_capacity(orders.len());
    let mut evals = Vec::with_capacity(orders.len());
    for &order in orders {
        let config = FitConfig {
            order,
            ..base.clone()
        };
        let wrap = |e: VecfitError| VecfitError::MemberFit {
            order,
            source: Box::new(e),
        };
        let outcome = fit(samples, &config).map_err(wrap)?;
        evals.push(outcome.model.evaluate(dense).map_err(wrap)?);
        members.push((order, outcome));
    }

    let mut per_frequency = vec![0.0_f64; dense.len()];
    let mut band_rmsd: f64 = 0.0;
    for m in 0..evals.len() {
        for n in m + 1..evals.len() {
            let mut sq = Vec::with_capacity(dense.len());
            for (k, u) in per_frequency.iter_mut().enumerate() {
                let dev = frobenius_deviation(evals[m].at(k), evals[n].at(k))?;
                *u = u.max(dev);
                sq.push(dev * dev);
            }
            band_rmsd = band_rmsd.max((neumaier(sq) / dense.len() as f64).sqrt());
        }
    }
    Ok(EnsembleUncertainty {
        per_frequency,
        band_rmsd,
        members,
    })
}
