use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::VariationalParam;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Tanh,
    Identity,
}

impl Activation {
    fn apply(self, z: &mut Array2<f64>) {
        if self == Activation::Tanh {
            z.mapv_inplace(f64::tanh);
        }
    }

    /// Multiplies `grad` by the derivative, written in terms of the output `a`.
    fn backprop(self, a: &Array2<f64>, grad: &mut Array2<f64>) {
        if self == Activation::Tanh {
            grad.zip_mut_with(a, |g, &a| *g *= 1.0 - a * a);
        }
    }
}

/// Fully connected layer with Gaussian weights `[d_out × d_in]` and bias `[d_out]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BayesLinearLayer {
    pub weight: VariationalParam,
    pub bias: VariationalParam,
    pub activation: Activation,
}

impl BayesLinearLayer {
    pub fn d_in(&self) -> usize {
        self.weight.shape[1]
    }

    pub fn d_out(&self) -> usize {
        self.weight.shape[0]
    }

    /// `x`: `[batch × d_in]`.
    pub fn forward(&self, x: &Array2<f64>, w: &[f64], b: &[f64]) -> Array2<f64> {
        let w = ArrayView2::from_shape((self.d_out(), self.d_in()), w).expect("weight shape");
        let mut z = x.dot(&w.t());
        for mut row in z.rows_mut() {
            row.iter_mut().zip(b).for_each(|(v, b)| *v += b);
        }
        self.activation.apply(&mut z);
        z
    }

    /// Given the layer input, its output `a` and `dL/da`, returns
    /// `(dL/dx, dL/dW, dL/db)`.
    pub fn backward(&self, x: &Array2<f64>, a: &Array2<f64>, mut grad: Array2<f64>, w: &[f64]) -> (Array2<f64>, Vec<f64>, Vec<f64>) {
        self.activation.backprop(a, &mut grad);
        let w = ArrayView2::from_shape((self.d_out(), self.d_in()), w).expect("weight shape");
        let dx = grad.dot(&w);
        let dw = grad.t().dot(x);
        let db = grad.sum_axis(Axis(0));
        (dx, dw.into_iter().collect(), db.to_vec())
    }
}

/// 1-D transposed convolution with Gaussian kernel `[c_in × c_out × k]`.
///
/// Activations are laid out as `[(batch · length) × channels]`. Output
/// length is `(L_in − 1)·stride + k + output_padding`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BayesTConv1DLayer {
    pub kernel: VariationalParam,
    pub bias: VariationalParam,
    pub stride: usize,
    pub output_padding: usize,
    pub activation: Activation,
}

impl BayesTConv1DLayer {
    pub fn c_in(&self) -> usize {
        self.kernel.shape[0]
    }

    pub fn c_out(&self) -> usize {
        self.kernel.shape[1]
    }

    pub fn k(&self) -> usize {
        self.kernel.shape[2]
    }

    pub fn output_len(&self, input_len: usize) -> usize {
        (input_len - 1) * self.stride + self.k() + self.output_padding
    }

    /// Kernel tap `t` as a `[c_in × c_out]` matrix.
    fn tap(&self, kernel: &[f64], t: usize) -> Array2<f64> {
        let (ci, co, k) = (self.c_in(), self.c_out(), self.k());
        Array2::from_shape_fn((ci, co), |(i, o)| kernel[(i * co + o) * k + t])
    }

    pub fn forward(&self, x: &Array2<f64>, batch: usize, len: usize, kernel: &[f64], bias: &[f64]) -> Array2<f64> {
        let out_len = self.output_len(len);
        let mut y = Array2::zeros((batch * out_len, self.c_out()));
        for mut row in y.rows_mut() {
            row.iter_mut().zip(bias).for_each(|(v, b)| *v += b);
        }
        for t in 0..self.k() {
            let p = x.dot(&self.tap(kernel, t));
            for b in 0..batch {
                for i in 0..len {
                    let mut dst = y.row_mut(b * out_len + i * self.stride + t);
                    dst += &p.row(b * len + i);
                }
            }
        }
        self.activation.apply(&mut y);
        y
    }

    /// Returns `(dL/dx, dL/dkernel, dL/dbias)`.
    pub fn backward(
        &self,
        x: &Array2<f64>,
        a: &Array2<f64>,
        mut grad: Array2<f64>,
        batch: usize,
        len: usize,
        kernel: &[f64],
    ) -> (Array2<f64>, Vec<f64>, Vec<f64>) {
        self.activation.backprop(a, &mut grad);
        let out_len = self.output_len(len);
        let (ci, co, k) = (self.c_in(), self.c_out(), self.k());
        let mut dx = Array2::zeros((batch * len, ci));
        let mut dk = vec![0.0; ci * co * k];
        let mut gt = Array2::zeros((batch * len, co));
        for t in 0..k {
            for b in 0..batch {
                for i in 0..len {
                    gt.row_mut(b * len + i).assign(&grad.row(b * out_len + i * self.stride + t));
                }
            }
            dx += &gt.dot(&self.tap(kernel, t).t());
            let dtap = x.t().dot(&gt);
            for i in 0..ci {
                for o in 0..co {
                    dk[(i * co + o) * k + t] = dtap[(i, o)];
                }
            }
        }
        let db = grad.sum_axis(Axis(0)).to_vec();
        (dx, dk, db)
    }
}

/// `[batch × (c · len)]` channel-major rows to `[(batch · len) × c]`.
pub(crate) fn to_sequence(x: &Array2<f64>, channels: usize, len: usize) -> Array2<f64> {
    let batch = x.nrows();
    Array2::from_shape_fn((batch * len, channels), |(r, c)| x[(r / len, c * len + r % len)])
}

/// Inverse of [`to_sequence`].
pub(crate) fn from_sequence(x: &Array2<f64>, batch: usize, channels: usize, len: usize) -> Array2<f64> {
    Array2::from_shape_fn((batch, channels * len), |(b, u)| x[(b * len + u % len, u / len)])
}

/// `[(batch · len) × c]` to `[batch × (len · c)]`, frequency-major per row.
pub(crate) fn flatten_sequence(x: Array2<f64>, batch: usize) -> Array2<f64> {
    let cols = x.len() / batch;
    x.into_shape_with_order((batch, cols)).expect("contiguous activations")
}

pub(crate) fn unflatten_sequence(x: Array2<f64>, channels: usize) -> Array2<f64> {
    let rows = x.len() / channels;
    let x = if x.is_standard_layout() { x } else { x.as_standard_layout().to_owned() };
    x.into_shape_with_order((rows, channels)).expect("contiguous gradient")
}

