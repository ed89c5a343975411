use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// `log(1 + e^x)` without overflow, floored at the smallest normal float so
/// that `σ` stays strictly positive.
pub fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x
    } else if x < -30.0 {
        x.exp().max(f64::MIN_POSITIVE)
    } else {
        x.exp().ln_1p()
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Inverse of [`softplus`].
pub fn softplus_inv(y: f64) -> f64 {
    if y > 30.0 {
        y
    } else {
        y.exp_m1().ln()
    }
}

/// Factorized Gaussian over a flat tensor: `w = mu + softplus(rho)·ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationalParam {
    pub shape: Vec<usize>,
    #[serde(with = "crate::checkpoint::f17_vec")]
    pub mu: Vec<f64>,
    #[serde(with = "crate::checkpoint::f17_vec")]
    pub rho: Vec<f64>,
}

impl VariationalParam {
    pub fn new(shape: Vec<usize>, mu: Vec<f64>, rho: Vec<f64>) -> Self {
        let n: usize = shape.iter().product();
        assert_eq!(mu.len(), n, "mu length does not match shape");
        assert_eq!(rho.len(), n, "rho length does not match shape");
        Self { shape, mu, rho }
    }

    /// Means drawn from `N(0, std²)`, all `rho` equal.
    pub fn random(shape: Vec<usize>, std: f64, rho: f64, rng: &mut impl Rng) -> Self {
        let n = shape.iter().product();
        let mu = (0..n).map(|_| std * rng.sample::<f64, _>(StandardNormal)).collect();
        Self::new(shape, mu, vec![rho; n])
    }

    pub fn constant(shape: Vec<usize>, mu: f64, rho: f64) -> Self {
        let n = shape.iter().product();
        Self::new(shape, vec![mu; n], vec![rho; n])
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    pub fn sigma(&self) -> impl Iterator<Item = f64> + '_ {
        self.rho.iter().map(|&r| softplus(r))
    }

    /// Realized values for noise `eps`; `None` gives the means.
    pub fn realize(&self, eps: Option<&[f64]>) -> Vec<f64> {
        match eps {
            None => self.mu.clone(),
            Some(e) => {
                assert_eq!(e.len(), self.len(), "noise length does not match parameter");
                self.mu
                    .iter()
                    .zip(&self.rho)
                    .zip(e)
                    .map(|((m, r), e)| m + softplus(*r) * e)
                    .collect()
            }
        }
    }
}
