use ndarray::{Array1, Array2, Axis, Zip};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
}

/// Fully connected network with rectified hidden layers and a linear output.
/// Weights are stored `fan_in x fan_out` so a batch propagates as `X W + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
    pub activation: Activation,
}

/// Per-layer inputs kept from the forward pass.
pub struct MlpCache {
    inputs: Vec<Array2<f64>>,
    pre: Vec<Array2<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpGrads {
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
}

impl MlpGrads {
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (w, b) in self.weights.iter().zip(&self.biases) {
            out.extend(w.iter());
            out.extend(b.iter());
        }
        out
    }
}

impl Mlp {
    /// Glorot-uniform weights, zero biases.
    pub fn new<R: Rng>(dims: &[usize], rng: &mut R) -> Self {
        assert!(dims.len() >= 2);
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for pair in dims.windows(2) {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            weights.push(Array2::from_shape_fn((fan_in, fan_out), |_| {
                rng.random_range(-limit..limit)
            }));
            biases.push(Array1::zeros(fan_out));
        }
        Self {
            weights,
            biases,
            activation: Activation::Relu,
        }
    }

    pub fn dims(&self) -> Vec<usize> {
        let mut d = vec![self.weights[0].nrows()];
        d.extend(self.weights.iter().map(|w| w.ncols()));
        d
    }

    pub fn input_dim(&self) -> usize {
        self.weights[0].nrows()
    }

    pub fn output_dim(&self) -> usize {
        self.weights.last().unwrap().ncols()
    }

    pub fn param_count(&self) -> usize {
        self.weights.iter().map(|w| w.len()).sum::<usize>() + self.biases.iter().map(|b| b.len()).sum::<usize>()
    }

    pub fn forward(&self, x: &Array2<f64>) -> Array2<f64> {
        let mut h = x.clone();
        let last = self.weights.len() - 1;
        for (l, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            h = h.dot(w) + b;
            if l < last {
                h.mapv_inplace(|v| v.max(0.0));
            }
        }
        h
    }

    pub fn forward_cached(&self, x: &Array2<f64>) -> (Array2<f64>, MlpCache) {
        let mut inputs = Vec::with_capacity(self.weights.len());
        let mut pre = Vec::with_capacity(self.weights.len());
        let mut h = x.clone();
        let last = self.weights.len() - 1;
        for (l, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            let z = h.dot(w) + b;
            inputs.push(h);
            h = if l < last { z.mapv(|v| v.max(0.0)) } else { z.clone() };
            pre.push(z);
        }
        (h, MlpCache { inputs, pre })
    }

    /// Backpropagates `grad_out = dL/dY`; returns parameter gradients and
    /// `dL/dX`.
    pub fn backward(&self, cache: &MlpCache, grad_out: &Array2<f64>) -> (MlpGrads, Array2<f64>) {
        let layers = self.weights.len();
        let mut gw = Vec::with_capacity(layers);
        let mut gb = Vec::with_capacity(layers);
        let mut delta = grad_out.clone();
        for l in (0..layers).rev() {
            if l < layers - 1 {
                Zip::from(&mut delta)
                    .and(&cache.pre[l])
                    .for_each(|d, &z| {
                        if z <= 0.0 {
                            *d = 0.0;
                        }
                    });
            }
            gw.push(cache.inputs[l].t().dot(&delta));
            gb.push(delta.sum_axis(Axis(0)));
            delta = delta.dot(&self.weights[l].t());
        }
        gw.reverse();
        gb.reverse();
        (
            MlpGrads {
                weights: gw,
                biases: gb,
            },
            delta,
        )
    }

    /// Input gradient only (no parameter gradients).
    pub fn input_gradient(&self, cache: &MlpCache, grad_out: &Array2<f64>) -> Array2<f64> {
        let layers = self.weights.len();
        let mut delta = grad_out.clone();
        for l in (0..layers).rev() {
            if l < layers - 1 {
                Zip::from(&mut delta)
                    .and(&cache.pre[l])
                    .for_each(|d, &z| {
                        if z <= 0.0 {
                            *d = 0.0;
                        }
                    });
            }
            delta = delta.dot(&self.weights[l].t());
        }
        delta
    }

    pub fn zero_grads(&self) -> MlpGrads {
        MlpGrads {
            weights: self.weights.iter().map(|w| Array2::zeros(w.raw_dim())).collect(),
            biases: self.biases.iter().map(|b| Array1::zeros(b.raw_dim())).collect(),
        }
    }

    /// Parameters in layer order, each weight matrix row-major then its bias.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for (w, b) in self.weights.iter().zip(&self.biases) {
            out.extend(w.iter());
            out.extend(b.iter());
        }
        out
    }

    pub fn set_flat(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.param_count() {
            return Err(Error::ShapeMismatch(format!(
                "{} parameters for a network with {}",
                params.len(),
                self.param_count()
            )));
        }
        let mut it = params.iter().copied();
        for (w, b) in self.weights.iter_mut().zip(self.biases.iter_mut()) {
            w.iter_mut().for_each(|v| *v = it.next().unwrap());
            b.iter_mut().for_each(|v| *v = it.next().unwrap());
        }
        Ok(())
    }

    pub fn from_flat(dims: &[usize], params: &[f64]) -> Result<Self> {
        let mut net = Self {
            weights: dims.windows(2).map(|p| Array2::zeros((p[0], p[1]))).collect(),
            biases: dims.windows(2).map(|p| Array1::zeros(p[1])).collect(),
            activation: Activation::Relu,
        };
        net.set_flat(params)?;
        Ok(net)
    }

    pub fn same_shape(&self, other: &Mlp) -> bool {
        self.dims() == other.dims()
    }
}

/// `target <- retain * target + (1 - retain) * online`.
pub fn soft_update(target: &mut Mlp, online: &Mlp, retain: f64) -> Result<()> {
    if !target.same_shape(online) {
        return Err(Error::ShapeMismatch(format!(
            "target {:?} vs online {:?}",
            target.dims(),
            online.dims()
        )));
    }
    for (t, o) in target.weights.iter_mut().zip(&online.weights) {
        Zip::from(t).and(o).for_each(|t, &o| *t = retain * *t + (1.0 - retain) * o);
    }
    for (t, o) in target.biases.iter_mut().zip(&online.biases) {
        Zip::from(t).and(o).for_each(|t, &o| *t = retain * *t + (1.0 - retain) * o);
    }
    Ok(())
}
