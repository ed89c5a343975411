use rfsurrogate_core::{CMatrix, ComplexResponse, FrequencyGrid};

use crate::{ensemble_uncertainty, fit, FitConfig, RationalModel, Result, VecfitError};

#[derive(Debug, Clone)]
pub struct AfsOutcome {
    /// Band indices in the order they were simulated (seed first).
    pub selected: Vec<usize>,
    /// Samples at the selected frequencies, sorted by frequency.
    pub samples: ComplexResponse,
    /// Final model of the order with the lowest sample RMS.
    pub model: RationalModel,
    pub order: usize,
    pub rms: f64,
    /// Number of refinement steps after the seed.
    pub refinements: usize,
    /// Total calls to [`fit`].
    pub fit_calls: usize,
}

/// Seed size for an ensemble of `orders`.
pub fn seed_count(orders: &[usize]) -> usize {
    2 * orders.iter().copied().max().unwrap_or(0) + 2
}

/// Ensemble-driven adaptive frequency sampling.
///
/// Starts from `2·max(orders) + 2` evenly spread band points, then repeatedly
/// fits every order, evaluates the ensemble spread on `band` and simulates the
/// unselected frequency with the largest spread (lowest frequency on ties),
/// until `budget` samples exist. The final ensemble is refitted once more and
/// the member with the lowest sample RMS is returned.
pub fn classic_afs<O>(
    mut oracle: O,
    band: &FrequencyGrid,
    budget: usize,
    orders: &[usize],
    base: &FitConfig,
) -> Result<AfsOutcome>
where
    O: FnMut(f64) -> std::result::Result<CMatrix, String>,
{
    if orders.is_empty() {
        return Err(VecfitError::InvalidConfig("no orders given".into()));
    }
    let seed = seed_count(orders);
    if budget < seed {
        return Err(VecfitError::InvalidConfig(format!("budget {budget} is below the seed count {seed}")));
    }
    if budget > band.len() {
        return Err(VecfitError::InvalidConfig(format!(
            "budget {budget} exceeds the {} band points",
            band.len()
        )));
    }

    let mut selected: Vec<usize> = Vec::with_capacity(budget);
    let mut values: Vec<Option<CMatrix>> = vec![None; band.len()];
    let mut simulate = |k: usize, selected: &mut Vec<usize>, values: &mut Vec<Option<CMatrix>>| {
        let f = band.points()[k];
        let h = oracle(f).map_err(|message| VecfitError::Oracle {
            frequency: f,
            message,
            selected: selected.clone(),
        })?;
        values[k] = Some(h);
        selected.push(k);
        Ok::<_, VecfitError>(())
    };
    for k in band.uniform_indices(seed) {
        simulate(k, &mut selected, &mut values)?;
    }

    let collect = |values: &[Option<CMatrix>]| -> Result<ComplexResponse> {
        let idx: Vec<usize> = (0..band.len()).filter(|&k| values[k].is_some()).collect();
        let data = idx.iter().map(|&k| values[k].clone().expect("present")).collect();
        Ok(ComplexResponse::new(band.select(&idx)?, data)?)
    };

    let mut fit_calls = 0;
    let mut refinements = 0;
    while selected.len() < budget {
        let samples = collect(&values)?;
        let u = ensemble_uncertainty(&samples, orders, band, base)?;
        fit_calls += orders.len();
        let mut pick: Option<(usize, f64)> = None;
        for (k, &v) in u.per_frequency.iter().enumerate() {
            if values[k].is_none() && pick.is_none_or(|(_, best)| v > best) {
                pick = Some((k, v));
            }
        }
        let (k, _) = pick.expect("budget is bounded by the band size");
        simulate(k, &mut selected, &mut values)?;
        refinements += 1;
    }

    let samples = collect(&values)?;
    let mut best: Option<(usize, crate::FitOutcome)> = None;
    for &order in orders {
        let config = FitConfig {
            order,
            ..base.clone()
        };
        let outcome = fit(&samples, &config).map_err(|e| VecfitError::MemberFit {
            order,
            source: Box::new(e),
        })?;
        fit_calls += 1;
        let better = match &best {
            None => true,
            Some((o, b)) => outcome.rms < b.rms || (outcome.rms == b.rms && order < *o),
        };
        if better {
            best = Some((order, outcome));
        }
    }
    let (order, outcome) = best.expect("orders is non-empty");
    Ok(AfsOutcome {
        selected,
        samples,
        model: outcome.model,
        order,
        rms: outcome.rms,
        refinements,
        fit_calls,
    })
}
