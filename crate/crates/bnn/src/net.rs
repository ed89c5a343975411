use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;
use rfsurrogate_core::RngStream;
use serde::{Deserialize, Serialize};

use crate::layer::{flatten_sequence, from_sequence, to_sequence, unflatten_sequence};
use crate::scale::{InputScaler, OutputScaler};
use crate::{Activation, BayesLinearLayer, BayesTConv1DLayer, BnnError, Result, VariationalParam};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Frequency is an input feature; one output per channel.
    Point,
    /// Geometry in, the whole spectrum of every channel out.
    Vector,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Optimizer {
    /// `θ ← θ − α·∇`.
    Sgd,
    Adam { beta1: f64, beta2: f64, eps: f64 },
}

impl Optimizer {
    pub fn adam() -> Self {
        Optimizer::Adam {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NetConfig {
    pub mode: Mode,
    pub widths: Vec<usize>,
    /// Hidden width of the point-mode head.
    pub head_width: usize,
    /// Channels entering the first and second transposed convolution (vector mode).
    pub conv_channels: [usize; 2],
    pub kernel: usize,
    pub stride: usize,
    pub prior_mu: f64,
    pub prior_sigma: f64,
    /// Likelihood noise in normalized output units.
    pub noise_sigma: f64,
    pub learning_rate: f64,
    pub optimizer: Optimizer,
    pub epochs: usize,
    pub batch_size: usize,
    pub mc_samples: usize,
    /// Ensemble size for predictive uncertainty.
    pub ensemble: usize,
    pub init_rho: f64,
    /// Point-estimate network: `σ` fixed at zero and no KL term.
    pub deterministic: bool,
    pub seed: u64,
}

impl Default for NetConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Point,
            widths: vec![64; 4],
            head_width: 64,
            conv_channels: [16, 8],
            kernel: 4,
            stride: 2,
            prior_mu: 0.0,
            prior_sigma: 1.0,
            noise_sigma: 0.1,
            learning_rate: 2e-5,
            optimizer: Optimizer::Sgd,
            epochs: 100,
            batch_size: 64,
            mc_samples: 1,
            ensemble: 32,
            init_rho: -5.0,
            deterministic: false,
            seed: 0,
        }
    }
}

impl NetConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(BnnError::Config(m.to_string()));
        if self.widths.is_empty() || self.widths.contains(&0) {
            return bad("backbone widths must be non-empty and positive");
        }
        if self.head_width == 0 || self.conv_channels.contains(&0) {
            return bad("head sizes must be positive");
        }
        if self.kernel == 0 || self.stride == 0 {
            return bad("kernel and stride must be positive");
        }
        if !(self.prior_sigma > 0.0) || !(self.noise_sigma > 0.0) {
            return bad("prior and noise scales must be positive");
        }
        if !(self.learning_rate >= 0.0) {
            return bad("learning rate must be non-negative");
        }
        if self.batch_size == 0 || self.mc_samples == 0 {
            return bad("batch size and MC samples must be positive");
        }
        if self.ensemble < 2 {
            return bad("ensemble size must be at least 2");
        }
        Ok(())
    }
}

/// Lengths and output paddings of a transposed-convolution stack ending at `target`.
pub fn conv_plan(target: usize, kernel: usize, stride: usize, layers: usize) -> Option<(usize, Vec<usize>)> {
    let mut len = target;
    let mut pads = Vec::with_capacity(layers);
    for _ in 0..layers {
        if len < kernel {
            return None;
        }
        let pad = (len - kernel) % stride;
        pads.push(pad);
        len = (len - kernel - pad) / stride + 1;
    }
    pads.reverse();
    Some((len, pads))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Head {
    Dense { layers: Vec<BayesLinearLayer> },
    Conv {
        project: BayesLinearLayer,
        /// Channels and length after reshaping the projection.
        channels: usize,
        len: usize,
        layers: Vec<BayesTConv1DLayer>,
    },
}

/// Per-parameter standard-normal draws, aligned with [`BayesNet::params`].
#[derive(Debug, Clone, PartialEq)]
pub struct Noise(pub Vec<Vec<f64>>);

/// Gradients aligned with [`BayesNet::params`].
pub type Grads = Vec<Vec<f64>>;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BayesNet {
    pub config: NetConfig,
    pub input_dim: usize,
    pub channels: usize,
    /// 1 in point mode, the grid length in vector mode.
    pub out_len: usize,
    pub backbone: Vec<BayesLinearLayer>,
    pub head: Head,
    pub input_scaler: InputScaler,
    pub output_scaler: Option<OutputScaler>,
    #[serde(skip)]
    pub(crate) opt_state: Option<crate::train::AdamState>,
}

impl PartialEq for BayesNet {
    fn eq(&self, other: &Self) -> bool {
        self.config == other.config
            && self.input_dim == other.input_dim
            && self.channels == other.channels
            && self.out_len == other.out_len
            && self.backbone == other.backbone
            && self.head == other.head
            && self.input_scaler == other.input_scaler
            && self.output_scaler == other.output_scaler
    }
}

fn linear(d_in: usize, d_out: usize, act: Activation, rho: f64, rng: &mut impl Rng) -> BayesLinearLayer {
    BayesLinearLayer {
        weight: VariationalParam::random(vec![d_out, d_in], 1.0 / (d_in as f64).sqrt(), rho, rng),
        bias: VariationalParam::random(vec![d_out], 1.0 / (d_in as f64).sqrt(), rho, rng),
        activation: act,
    }
}

/// Cached activations of one forward pass.
pub(crate) struct Trace {
    /// Input to each layer in parameter order plus the final output.
    pub acts: Vec<Array2<f64>>,
    pub weights: Vec<Vec<f64>>,
}

impl BayesNet {
    /// `input_scaler` fixes the input dimension; `out_len` must be 1 in point mode.
    pub fn new(config: NetConfig, input_scaler: InputScaler, channels: usize, out_len: usize) -> Result<Self> {
        config.validate()?;
        let input_dim = input_scaler.dim();
        if input_dim == 0 || channels == 0 || out_len == 0 {
            return Err(BnnError::Config("input, channel and output sizes must be positive".into()));
        }
        if config.mode == Mode::Point && out_len != 1 {
            return Err(BnnError::Config("point mode predicts one frequency per row".into()));
        }
        let mut rng = RngStream::new(config.seed, "bnn/init");
        let rho = config.init_rho;
        let mut backbone = Vec::new();
        let mut width = input_dim;
        for &w in &config.widths {
            backbone.push(linear(width, w, Activation::Tanh, rho, &mut rng));
            width = w;
        }
        let head = match config.mode {
            Mode::Point => Head::Dense {
                layers: vec![
                    linear(width, config.head_width, Activation::Tanh, rho, &mut rng),
                    linear(config.head_width, channels, Activation::Identity, rho, &mut rng),
                ],
            },
            Mode::Vector => {
                let (len, pads) = conv_plan(out_len, config.kernel, config.stride, 2).ok_or_else(|| {
                    BnnError::Config(format!("grid of {out_len} points is too short for the convolutional head"))
                })?;
                let [c0, c1] = config.conv_channels;
                let project = linear(width, c0 * len, Activation::Tanh, rho, &mut rng);
                let chans = [c0, c1, channels];
                let layers = (0..2)
                    .map(|i| {
                        let (ci, co) = (chans[i], chans[i + 1]);
                        let fan_in = (ci * config.kernel) as f64 / config.stride as f64;
                        BayesTConv1DLayer {
                            kernel: VariationalParam::random(vec![ci, co, config.kernel], 1.0 / fan_in.sqrt(), rho, &mut rng),
                            bias: VariationalParam::constant(vec![co], 0.0, rho),
                            stride: config.stride,
                            output_padding: pads[i],
                            activation: if i == 0 { Activation::Tanh } else { Activation::Identity },
                        }
                    })
                    .collect();
                Head::Conv {
                    project,
                    channels: c0,
                    len,
                    layers,
                }
            }
        };
        Ok(Self {
            config,
            input_dim,
            channels,
            out_len,
            backbone,
            head,
            input_scaler,
            output_scaler: None,
            opt_state: None,
        })
    }

    pub fn output_dim(&self) -> usize {
        self.channels * self.out_len
    }

    pub fn params(&self) -> Vec<&VariationalParam> {
        let mut out = Vec::new();
        for l in &self.backbone {
            out.push(&l.weight);
            out.push(&l.bias);
        }
        match &self.head {
            Head::Dense { layers } => {
                for l in layers {
                    out.push(&l.weight);
                    out.push(&l.bias);
                }
            }
            Head::Conv { project, layers, .. } => {
                out.push(&project.weight);
                out.push(&project.bias);
                for l in layers {
                    out.push(&l.kernel);
                    out.push(&l.bias);
                }
            }
        }
        out
    }

    pub fn params_mut(&mut self) -> Vec<&mut VariationalParam> {
        let mut out = Vec::new();
        for l in &mut self.backbone {
            out.push(&mut l.weight);
            out.push(&mut l.bias);
        }
        match &mut self.head {
            Head::Dense { layers } => {
                for l in layers {
                    out.push(&mut l.weight);
                    out.push(&mut l.bias);
                }
            }
            Head::Conv { project, layers, .. } => {
                out.push(&mut project.weight);
                out.push(&mut project.bias);
                for l in layers {
                    out.push(&mut l.kernel);
                    out.push(&mut l.bias);
                }
            }
        }
        out
    }

    /// Human-readable name of the layer owning parameter `i` of [`Self::params`].
    pub fn param_name(&self, i: usize) -> String {
        let part = if i % 2 == 0 { "weight" } else { "bias" };
        let layer = i / 2;
        let nb = self.backbone.len();
        if layer < nb {
            format!("backbone[{layer}].{part}")
        } else {
            format!("head[{}].{part}", layer - nb)
        }
    }

    pub fn n_params(&self) -> usize {
        self.params().iter().map(|p| p.len()).sum()
    }

    pub fn zero_noise(&self) -> Noise {
        Noise(self.params().iter().map(|p| vec![0.0; p.len()]).collect())
    }

    pub fn sample_noise(&self, rng: &mut impl Rng) -> Noise {
        Noise(
            self.params()
                .iter()
                .map(|p| (0..p.len()).map(|_| rng.sample(StandardNormal)).collect())
                .collect(),
        )
    }

    /// Weights realized for `noise`, or the means for deterministic nets and `None`.
    pub(crate) fn realize(&self, noise: Option<&Noise>) -> Result<Vec<Vec<f64>>> {
        let params = self.params();
        if let Some(n) = noise {
            if n.0.len() != params.len() || n.0.iter().zip(&params).any(|(e, p)| e.len() != p.len()) {
                return Err(BnnError::Shape("noise does not match the network parameters".into()));
            }
        }
        let use_noise = if self.config.deterministic { None } else { noise };
        Ok(params
            .iter()
            .enumerate()
            .map(|(i, p)| p.realize(use_noise.map(|n| n.0[i].as_slice())))
            .collect())
    }

    /// Forward pass in normalized units: `x` is `[batch × input_dim]` already
    /// scaled to `[−1, 1]`; returns `[batch × output_dim]`. Vector-mode rows
    /// are frequency-major (`k · channels + c`).
    pub fn forward_sample(&self, x: &Array2<f64>, noise: Option<&Noise>) -> Result<Array2<f64>> {
        Ok(self.trace(x, noise)?.acts.pop().expect("output"))
    }

    pub(crate) fn trace(&self, x: &Array2<f64>, noise: Option<&Noise>) -> Result<Trace> {
        if x.ncols() != self.input_dim {
            return Err(BnnError::Shape(format!(
                "input has {} features, network expects {}",
                x.ncols(),
                self.input_dim
            )));
        }
        let weights = self.realize(noise)?;
        let batch = x.nrows();
        let mut acts = vec![x.clone()];
        let mut p = 0;
        for l in &self.backbone {
            let a = l.forward(acts.last().expect("input"), &weights[p], &weights[p + 1]);
            acts.push(a);
            p += 2;
        }
        match &self.head {
            Head::Dense { layers } => {
                for l in layers {
                    let a = l.forward(acts.last().expect("input"), &weights[p], &weights[p + 1]);
                    acts.push(a);
                    p += 2;
                }
            }
            Head::Conv {
                project,
                channels,
                len,
                layers,
            } => {
                let a = project.forward(acts.last().expect("input"), &weights[p], &weights[p + 1]);
                p += 2;
                acts.push(to_sequence(&a, *channels, *len));
                let mut l_in = *len;
                for l in layers {
                    let a = l.forward(acts.last().expect("input"), batch, l_in, &weights[p], &weights[p + 1]);
                    l_in = l.output_len(l_in);
                    acts.push(a);
                    p += 2;
                }
                let last = acts.pop().expect("conv output");
                acts.push(flatten_sequence(last, batch));
            }
        }
        Ok(Trace { acts, weights })
    }

    /// Gradients of a scalar loss with respect to every realized parameter,
    /// given `dL/d output`.
    pub(crate) fn backward(&self, trace: &Trace, grad_out: Array2<f64>) -> Grads {
        let w = &trace.weights;
        let acts = &trace.acts;
        let batch = acts[0].nrows();
        let mut grads: Grads = vec![Vec::new(); w.len()];
        let mut g = grad_out;
        let nb = self.backbone.len();
        // acts[i] is the input of layer i (conv head: acts[nb + 1] is the reshaped projection)
        match &self.head {
            Head::Dense { layers } => {
                for (j, l) in layers.iter().enumerate().rev() {
                    let i = nb + j;
                    let (dx, dw, db) = l.backward(&acts[i], &acts[i + 1], g, &w[2 * i]);
                    grads[2 * i] = dw;
                    grads[2 * i + 1] = db;
                    g = dx;
                }
            }
            Head::Conv {
                project,
                channels,
                len,
                layers,
            } => {
                let mut lens = vec![*len];
                for l in layers {
                    lens.push(l.output_len(*lens.last().expect("len")));
                }
                let out_ch = layers.last().expect("conv layers").c_out();
                g = unflatten_sequence(g, out_ch);
                // the flattened output replaced the last sequence activation
                let last_seq = unflatten_sequence(acts[acts.len() - 1].clone(), out_ch);
                for (j, l) in layers.iter().enumerate().rev() {
                    let i = nb + 1 + j;
                    let input = &acts[i];
                    let out = if j + 1 == layers.len() { &last_seq } else { &acts[i + 1] };
                    let (dx, dk, db) = l.backward(input, out, g, batch, lens[j], &w[2 * i]);
                    grads[2 * i] = dk;
                    grads[2 * i + 1] = db;
                    g = dx;
                }
                g = from_sequence(&g, batch, *channels, *len);
                let proj_out = from_sequence(&acts[nb + 1], batch, *channels, *len);
                let (dx, dw, db) = project.backward(&acts[nb], &proj_out, g, &w[2 * nb]);
                grads[2 * nb] = dw;
                grads[2 * nb + 1] = db;
                g = dx;
            }
        }
        for (i, l) in self.backbone.iter().enumerate().rev() {
            let (dx, dw, db) = l.backward(&acts[i], &acts[i + 1], g, &w[2 * i]);
            grads[2 * i] = dw;
            grads[2 * i + 1] = db;
            g = dx;
        }
        grads
    }

    /// Forward pass from raw features to physical output units.
    pub fn predict_sample(&self, x_raw: &Array2<f64>, noise: Option<&Noise>) -> Result<Array2<f64>> {
        let x = self.input_scaler.transform(x_raw)?;
        let mut y = self.forward_sample(&x, noise)?;
        if let Some(s) = &self.output_scaler {
            s.inverse_inplace(&mut y, self.channels);
        }
        Ok(y)
    }
}

impl BayesNet {
    /// Consistency of parameter lengths and layer chaining, e.g. after loading.
    pub fn check_shapes(&self) -> Result<()> {
        let bad = |m: String| Err(BnnError::Shape(m));
        for (i, p) in self.params().iter().enumerate() {
            let n: usize = p.shape.iter().product();
            if p.mu.len() != n || p.rho.len() != n {
                return bad(format!("{}: tensor length does not match shape", self.param_name(i)));
            }
        }
        if self.input_scaler.dim() != self.input_dim {
            return bad("input scaler dimension differs from the network input".into());
        }
        if let Some(s) = &self.output_scaler {
            if s.mean.len() != self.channels || s.std.len() != self.channels {
                return bad("output scaler does not match the channel count".into());
            }
        }
        let mut width = self.input_dim;
        for (i, l) in self.backbone.iter().enumerate() {
            if l.weight.shape.len() != 2 || l.d_in() != width || l.bias.len() != l.d_out() {
                return bad(format!("backbone[{i}] does not chain"));
            }
            width = l.d_out();
        }
        match &self.head {
            Head::Dense { layers } => {
                for (i, l) in layers.iter().enumerate() {
                    if l.weight.shape.len() != 2 || l.d_in() != width || l.bias.len() != l.d_out() {
                        return bad(format!("head[{i}] does not chain"));
                    }
                    width = l.d_out();
                }
                if width != self.channels || self.out_len != 1 {
                    return bad("dense head output does not match the channel count".into());
                }
            }
            Head::Conv {
                project,
                channels,
                len,
                layers,
            } => {
                if project.weight.shape.len() != 2 || project.d_in() != width || project.d_out() != channels * len {
                    return bad("projection does not match the convolution input".into());
                }
                let (mut c, mut l_in) = (*channels, *len);
                for (i, l) in layers.iter().enumerate() {
                    if l.kernel.shape.len() != 3 || l.c_in() != c || l.bias.len() != l.c_out() || l.stride == 0 {
                        return bad(format!("convolution {i} does not chain"));
                    }
                    c = l.c_out();
                    l_in = l.output_len(l_in);
                }
                if layers.is_empty() || c != self.channels || l_in != self.out_len {
                    return bad("convolutional head output does not match the grid".into());
                }
            }
        }
        Ok(())
    }
}
