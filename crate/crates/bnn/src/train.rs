use ndarray::Array2;
use rand::seq::SliceRandom;
use rfsurrogate_core::sum::neumaier;
use rfsurrogate_core::RngStream;

use crate::kl::{kl_gaussian, kl_gaussian_grad};
use crate::net::{Grads, Noise, Optimizer};
use crate::param::{sigmoid, softplus};
use crate::scale::OutputScaler;
use crate::{BayesNet, BnnError, Result};

/// Rows of raw inputs and targets; `mask` marks observed target entries.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainData {
    pub x: Array2<f64>,
    pub y: Array2<f64>,
    pub mask: Option<Array2<bool>>,
}

impl TrainData {
    pub fn new(x: Array2<f64>, y: Array2<f64>, mask: Option<Array2<bool>>) -> Result<Self> {
        if x.nrows() != y.nrows() {
            return Err(BnnError::Shape(format!("{} input rows, {} target rows", x.nrows(), y.nrows())));
        }
        if let Some(m) = &mask {
            if m.dim() != y.dim() {
                return Err(BnnError::Shape("mask shape differs from the targets".into()));
            }
        }
        Ok(Self { x, y, mask })
    }

    pub fn len(&self) -> usize {
        self.x.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.x.nrows() == 0
    }

    pub fn rows(&self, idx: &[usize]) -> Self {
        let pick = |a: &Array2<f64>| Array2::from_shape_fn((idx.len(), a.ncols()), |(i, j)| a[(idx[i], j)]);
        Self {
            x: pick(&self.x),
            y: pick(&self.y),
            mask: self
                .mask
                .as_ref()
                .map(|m| Array2::from_shape_fn((idx.len(), m.ncols()), |(i, j)| m[(idx[i], j)])),
        }
    }

    pub fn observed(&self) -> usize {
        self.mask.as_ref().map_or(self.y.len(), |m| m.iter().filter(|&&b| b).count())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossBreakdown {
    /// `nll + kl_weight · kl`.
    pub total: f64,
    /// Negative log-likelihood averaged over the MC samples.
    pub nll: f64,
    /// KL summed over all parameters (unweighted).
    pub kl: f64,
    pub kl_weight: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FitHistory {
    /// Total loss of every step.
    pub steps: Vec<f64>,
    /// Mean step loss of every epoch.
    pub epochs: Vec<f64>,
}

#[derive(Debug, Clone)]
pub(crate) struct AdamState {
    t: i32,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl BayesNet {
    fn scaled_targets(&self, batch: &TrainData) -> Array2<f64> {
        match &self.output_scaler {
            Some(s) => s.transform(&batch.y),
            None => batch.y.clone(),
        }
    }

    fn check_batch(&self, batch: &TrainData) -> Result<()> {
        if batch.is_empty() {
            return Err(BnnError::Shape("empty batch".into()));
        }
        if batch.y.ncols() != self.output_dim() {
            return Err(BnnError::Shape(format!(
                "targets have {} columns, network outputs {}",
                batch.y.ncols(),
                self.output_dim()
            )));
        }
        Ok(())
    }

    pub fn kl(&self) -> f64 {
        if self.config.deterministic {
            return 0.0;
        }
        let (mp, sp) = (self.config.prior_mu, self.config.prior_sigma);
        let params = self.params();
        neumaier(params.iter().flat_map(|p| p.mu.iter().zip(p.sigma()).map(move |(&m, s)| kl_gaussian(m, s, mp, sp))))
    }

    /// Negative ELBO for the given weight draws (one per MC sample).
    pub fn elbo_loss(&self, batch: &TrainData, noises: &[Noise], kl_weight: f64) -> Result<LossBreakdown> {
        Ok(self.loss_impl(batch, noises, kl_weight, false)?.0)
    }

    /// [`Self::elbo_loss`] and its gradients with respect to every `mu` and `rho`.
    pub fn loss_and_grad(&self, batch: &TrainData, noises: &[Noise], kl_weight: f64) -> Result<(LossBreakdown, Grads, Grads)> {
        let (loss, g) = self.loss_impl(batch, noises, kl_weight, true)?;
        let (gm, gr) = g.expect("gradients requested");
        Ok((loss, gm, gr))
    }

    #[allow(clippy::type_complexity)]
    fn loss_impl(
        &self,
        batch: &TrainData,
        noises: &[Noise],
        kl_weight: f64,
        want_grad: bool,
    ) -> Result<(LossBreakdown, Option<(Grads, Grads)>)> {
        self.check_batch(batch)?;
        if noises.is_empty() {
            return Err(BnnError::Shape("at least one weight draw is required".into()));
        }
        let x = self.input_scaler.transform(&batch.x)?;
        let t = self.scaled_targets(batch);
        let sn = self.config.noise_sigma;
        let var = sn * sn;
        let log_norm = 0.5 * (2.0 * std::f64::consts::PI * var).ln();
        let inv_s = 1.0 / noises.len() as f64;
        let params = self.params();
        let mut gmu: Grads = params.iter().map(|p| vec![0.0; p.len()]).collect();
        let mut grho: Grads = gmu.clone();
        let mut nll = 0.0;
        for noise in noises {
            let trace = self.trace(&x, Some(noise))?;
            let y = trace.acts.last().expect("output");
            let mut g = Array2::zeros(y.dim());
            let mut sum = 0.0;
            for ((i, u), &yv) in y.indexed_iter() {
                if batch.mask.as_ref().is_none_or(|m| m[(i, u)]) {
                    let r = yv - t[(i, u)];
                    sum += log_norm + r * r / (2.0 * var);
                    g[(i, u)] = inv_s * r / var;
                }
            }
            nll += inv_s * sum;
            if want_grad {
                let gw = self.backward(&trace, g);
                for (k, p) in params.iter().enumerate() {
                    for j in 0..p.len() {
                        gmu[k][j] += gw[k][j];
                        if !self.config.deterministic {
                            grho[k][j] += gw[k][j] * noise.0[k][j] * sigmoid(p.rho[j]);
                        }
                    }
                }
            }
        }
        let kl = self.kl();
        if want_grad && !self.config.deterministic {
            let (mp, sp) = (self.config.prior_mu, self.config.prior_sigma);
            for (k, p) in params.iter().enumerate() {
                for j in 0..p.len() {
                    let (dm, ds) = kl_gaussian_grad(p.mu[j], softplus(p.rho[j]), mp, sp);
                    gmu[k][j] += kl_weight * dm;
                    grho[k][j] += kl_weight * ds * sigmoid(p.rho[j]);
                }
            }
        }
        let loss = LossBreakdown {
            total: nll + kl_weight * kl,
            nll,
            kl,
            kl_weight,
        };
        if !loss.total.is_finite() {
            return Err(BnnError::NonFinite {
                layer: "loss".into(),
                what: "loss".into(),
            });
        }
        if want_grad {
            for (k, (a, b)) in gmu.iter().zip(&grho).enumerate() {
                if a.iter().chain(b).any(|v| !v.is_finite()) {
                    return Err(BnnError::NonFinite {
                        layer: self.param_name(k),
                        what: "gradient".into(),
                    });
                }
            }
        }
        Ok((loss, want_grad.then_some((gmu, grho))))
    }

    fn apply_update(&mut self, gmu: &Grads, grho: &Grads) {
        let lr = self.config.learning_rate;
        let deterministic = self.config.deterministic;
        match self.config.optimizer {
            Optimizer::Sgd => {
                for (k, p) in self.params_mut().into_iter().enumerate() {
                    p.mu.iter_mut().zip(&gmu[k]).for_each(|(m, g)| *m -= lr * g);
                    if !deterministic {
                        p.rho.iter_mut().zip(&grho[k]).for_each(|(r, g)| *r -= lr * g);
                    }
                }
            }
            Optimizer::Adam { beta1, beta2, eps } => {
                let mut state = self.opt_state.take().unwrap_or_else(|| {
                    let z: Vec<Vec<f64>> = gmu.iter().chain(grho).map(|g| vec![0.0; g.len()]).collect();
                    AdamState {
                        t: 0,
                        m: z.clone(),
                        v: z,
                    }
                });
                state.t += 1;
                let c1 = 1.0 - beta1.powi(state.t);
                let c2 = 1.0 - beta2.powi(state.t);
                let n = gmu.len();
                for (k, p) in self.params_mut().into_iter().enumerate() {
                    for (slot, (vals, g)) in [(k, (&mut p.mu, &gmu[k])), (n + k, (&mut p.rho, &grho[k]))] {
                        if slot >= n && deterministic {
                            continue;
                        }
                        let (m, v) = (&mut state.m[slot], &mut state.v[slot]);
                        for j in 0..vals.len() {
                            m[j] = beta1 * m[j] + (1.0 - beta1) * g[j];
                            v[j] = beta2 * v[j] + (1.0 - beta2) * g[j] * g[j];
                            vals[j] -= lr * (m[j] / c1) / ((v[j] / c2).sqrt() + eps);
                        }
                    }
                }
                self.opt_state = Some(state);
            }
        }
    }

    /// One update of every `(mu, rho)` from `mc_samples` fresh weight draws.
    pub fn train_step(&mut self, batch: &TrainData, rng: &mut RngStream, kl_weight: f64) -> Result<LossBreakdown> {
        let noises: Vec<Noise> = (0..self.config.mc_samples).map(|_| self.sample_noise(rng)).collect();
        let (loss, gmu, grho) = self.loss_and_grad(batch, &noises, kl_weight)?;
        self.apply_update(&gmu, &grho);
        Ok(loss)
    }

    /// Freezes the output statistics from `data` unless already set.
    pub fn freeze_output_scaler(&mut self, data: &TrainData) -> Result<()> {
        if self.output_scaler.is_none() {
            if data.y.ncols() != self.output_dim() {
                return Err(BnnError::Shape("targets do not match the network output".into()));
            }
            self.output_scaler = Some(OutputScaler::fit(&data.y, data.mask.as_ref(), self.channels)?);
        }
        Ok(())
    }

    /// Minibatch training continuing from the current parameters.
    /// `epochs` overrides the configured count.
    pub fn fit(&mut self, train: &TrainData, epochs: Option<usize>, stream: &RngStream) -> Result<FitHistory> {
        let epochs = epochs.unwrap_or(self.config.epochs);
        let mut history = FitHistory::default();
        if epochs == 0 {
            return Ok(history);
        }
        self.check_batch(train)?;
        self.freeze_output_scaler(train)?;
        let n = train.len();
        let bs = self.config.batch_size.min(n);
        let n_batches = n.div_ceil(bs);
        let kl_weight = 1.0 / n_batches as f64;
        let mut order: Vec<usize> = (0..n).collect();
        let shuffle = stream.child("shuffle");
        let mut noise_rng = stream.child("noise");
        for e in 0..epochs {
            if n_batches > 1 {
                order.shuffle(&mut shuffle.indexed(e as u64));
            }
            let mut sum = 0.0;
            for chunk in order.chunks(bs) {
                let owned;
                let batch = if n_batches == 1 {
                    train
                } else {
                    owned = train.rows(chunk);
                    &owned
                };
                let loss = self.train_step(batch, &mut noise_rng, kl_weight)?;
                history.steps.push(loss.total);
                sum += loss.total;
            }
            history.epochs.push(sum / n_batches as f64);
        }
        Ok(history)
    }
}
