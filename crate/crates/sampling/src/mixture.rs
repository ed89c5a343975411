use rand::Rng;

use crate::{Result, SamplingError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureConfig {
    /// Weight of the uniform component.
    pub lambda: f64,
    pub batch: usize,
}

impl Default for MixtureConfig {
    fn default() -> Self {
        Self { lambda: 0.3, batch: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeometryDraw {
    /// Positions into the aggregated vector, in draw order.
    pub indices: Vec<usize>,
    /// The uncertainty term had no mass and was replaced by a uniform one.
    pub uniform_fallback: bool,
}

/// Draw probabilities over `pool` for the mixture
/// `λ/|pool| + (1 − λ)·U_i / Σ_pool U`. The flag reports a massless
/// uncertainty term (treated as uniform).
pub fn mixture_probabilities(agg: &[f64], pool: &[usize], lambda: f64) -> (Vec<f64>, bool) {
    let n = pool.len() as f64;
    let total: f64 = pool.iter().map(|&i| agg[i]).sum();
    if !(total > 0.0) {
        return (vec![1.0 / n; pool.len()], true);
    }
    let p = pool
        .iter()
        .map(|&i| lambda / n + (1.0 - lambda) * agg[i] / total)
        .collect();
    (p, false)
}

/// Sequential draws without replacement from the mixture over `unexplored`,
/// renormalized after each pick.
pub fn sample_geometry(agg: &[f64], unexplored: &[usize], config: &MixtureConfig, rng: &mut impl Rng) -> Result<GeometryDraw> {
    if !(0.0..=1.0).contains(&config.lambda) {
        return Err(SamplingError::Invalid(format!("lambda {} outside [0, 1]", config.lambda)));
    }
    if config.batch > unexplored.len() {
        return Err(SamplingError::PoolTooSmall {
            batch: config.batch,
            pool: unexplored.len(),
        });
    }
    if let Some(&i) = unexplored.iter().find(|&&i| i >= agg.len() || !(agg[i] >= 0.0) || !agg[i].is_finite()) {
        return Err(SamplingError::Invalid(format!("candidate {i} has no valid aggregated uncertainty")));
    }
    let mut pool = unexplored.to_vec();
    let mut indices = Vec::with_capacity(config.batch);
    let mut fallback = false;
    for _ in 0..config.batch {
        let (p, flat) = mixture_probabilities(agg, &pool, config.lambda);
        fallback |= flat;
        let total: f64 = p.iter().sum();
        let mut target = rng.random::<f64>() * total;
        let mut pick = pool.len() - 1;
        for (k, &pk) in p.iter().enumerate() {
            if target < pk {
                pick = k;
                break;
            }
            target -= pk;
        }
        // rounding must never select a zero-probability entry
        if p[pick] == 0.0 {
            pick = (0..pick).rev().chain(pick + 1..p.len()).find(|&k| p[k] > 0.0).expect("positive mass");
        }
        indices.push(pool.remove(pick));
    }
    Ok(GeometryDraw {
        indices,
        uniform_fallback: fallback,
    })
}
