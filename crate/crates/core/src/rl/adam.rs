use ndarray::{Array1, Array2, Zip};

use super::mlp::{Mlp, MlpGrads};

pub const BETA1: f64 = 0.9;
pub const BETA2: f64 = 0.999;
pub const EPSILON: f64 = 1e-8;

/// Adam moments for one network.
#[derive(Debug, Clone, PartialEq)]
pub struct Adam {
    pub lr: f64,
    pub step: u64,
    pub m: MlpGrads,
    pub v: MlpGrads,
}

impl Adam {
    pub fn new(net: &Mlp, lr: f64) -> Self {
        Self {
            lr,
            step: 0,
            m: net.zero_grads(),
            v: net.zero_grads(),
        }
    }

    pub fn reset(&mut self) {
        self.step = 0;
        for w in self.m.weights.iter_mut().chain(self.v.weights.iter_mut()) {
            w.fill(0.0);
        }
        for b in self.m.biases.iter_mut().chain(self.v.biases.iter_mut()) {
            b.fill(0.0);
        }
    }

    /// Gradient-descent step on `net` with bias-corrected moments.
    pub fn apply(&mut self, net: &mut Mlp, grads: &MlpGrads) {
        self.step += 1;
        let t = self.step as i32;
        let lr_t = self.lr * (1.0 - BETA2.powi(t)).sqrt() / (1.0 - BETA1.powi(t));
        for l in 0..net.weights.len() {
            update2(&mut net.weights[l], &grads.weights[l], &mut self.m.weights[l], &mut self.v.weights[l], lr_t);
            update1(&mut net.biases[l], &grads.biases[l], &mut self.m.biases[l], &mut self.v.biases[l], lr_t);
        }
    }
}

fn update2(p: &mut Array2<f64>, g: &Array2<f64>, m: &mut Array2<f64>, v: &mut Array2<f64>, lr_t: f64) {
    Zip::from(p).and(g).and(m).and(v).for_each(|p, &g, m, v| {
        *m = BETA1 * *m + (1.0 - BETA1) * g;
        *v = BETA2 * *v + (1.0 - BETA2) * g * g;
        *p -= lr_t * *m / (v.sqrt() + EPSILON);
    });
}

fn update1(p: &mut Array1<f64>, g: &Array1<f64>, m: &mut Array1<f64>, v: &mut Array1<f64>, lr_t: f64) {
    Zip::from(p).and(g).and(m).and(v).for_each(|p, &g, m, v| {
        *m = BETA1 * *m + (1.0 - BETA1) * g;
        *v = BETA2 * *v + (1.0 - BETA2) * g * g;
        *p -= lr_t * *m / (v.sqrt() + EPSILON);
    });
}
