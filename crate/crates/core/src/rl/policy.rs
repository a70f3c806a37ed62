use ndarray::{Array1, Array2, Axis};

use super::mlp::{Mlp, MlpCache, MlpGrads};

pub const LOG_STD_MIN: f64 = -10.0;
pub const LOG_STD_MAX: f64 = 1.0;
pub const ACTION_STRIDE: f64 = 0.01;

const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;

/// `ln(1 - tanh(z)^2)` without cancellation for large `|z|`.
pub fn log_one_minus_tanh_sq(z: f64) -> f64 {
    2.0 * (std::f64::consts::LN_2 - z - softplus(-2.0 * z))
}

fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x
    } else {
        x.exp().ln_1p()
    }
}

/// Squashed-Gaussian head on top of an actor network whose output is
/// `[mean (A), raw log-std (A)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyHead {
    pub log_std_min: f64,
    pub log_std_max: f64,
    pub stride: f64,
}

impl Default for PolicyHead {
    fn default() -> Self {
        Self {
            log_std_min: LOG_STD_MIN,
            log_std_max: LOG_STD_MAX,
            stride: ACTION_STRIDE,
        }
    }
}

/// Reparameterized samples for a batch of states.
///
/// `unit` is `tanh(mean + std * noise)` in `[-1, 1]`; the applied action is
/// `stride * unit` and `log_prob` is the density of that scaled action.
pub struct PolicySample {
    pub mean: Array2<f64>,
    pub log_std: Array2<f64>,
    pub unit: Array2<f64>,
    pub log_prob: Array1<f64>,
    noise: Array2<f64>,
    clamped: Array2<bool>,
    cache: MlpCache,
}

impl PolicySample {
    pub fn actions(&self, stride: f64) -> Array2<f64> {
        self.unit.mapv(|u| stride * u)
    }

    pub fn mean_log_std(&self) -> f64 {
        self.log_std.mean().unwrap_or(0.0)
    }
}

impl PolicyHead {
    pub fn action_dim(actor: &Mlp) -> usize {
        actor.output_dim() / 2
    }

    pub fn sample(&self, actor: &Mlp, states: &Array2<f64>, noise: &Array2<f64>) -> PolicySample {
        let dim = Self::action_dim(actor);
        let (out, cache) = actor.forward_cached(states);
        let mean = out.slice(ndarray::s![.., ..dim]).to_owned();
        let raw = out.slice(ndarray::s![.., dim..]).to_owned();
        let clamped = raw.mapv(|v| v < self.log_std_min || v > self.log_std_max);
        let log_std = raw.mapv(|v| v.clamp(self.log_std_min, self.log_std_max));
        let z = &mean + &(log_std.mapv(f64::exp) * noise);
        let unit = z.mapv(f64::tanh);
        let ln_stride = self.stride.ln();
        let mut log_prob = Array1::zeros(states.nrows());
        for (row, lp) in log_prob.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in 0..dim {
                let e = noise[[row, k]];
                acc += -0.5 * e * e
                    - log_std[[row, k]]
                    - HALF_LN_TWO_PI
                    - log_one_minus_tanh_sq(z[[row, k]])
                    - ln_stride;
            }
            *lp = acc;
        }
        PolicySample {
            mean,
            log_std,
            unit,
            log_prob,
            noise: noise.clone(),
            clamped,
            cache,
        }
    }

    /// Chains `dL/d unit` and `dL/d log_prob` back to the actor parameters.
    pub fn backward(
        &self,
        actor: &Mlp,
        sample: &PolicySample,
        grad_unit: &Array2<f64>,
        grad_log_prob: &Array1<f64>,
    ) -> MlpGrads {
        let dim = sample.mean.ncols();
        let rows = sample.mean.nrows();
        let mut grad_out = Array2::zeros((rows, 2 * dim));
        for r in 0..rows {
            let glp = grad_log_prob[r];
            for k in 0..dim {
                let u = sample.unit[[r, k]];
                let sigma = sample.log_std[[r, k]].exp();
                let eps = sample.noise[[r, k]];
                let gz = grad_unit[[r, k]] * (1.0 - u * u) + glp * 2.0 * u;
                grad_out[[r, k]] = gz;
                grad_out[[r, dim + k]] = if sample.clamped[[r, k]] {
                    0.0
                } else {
                    gz * sigma * eps - glp
                };
            }
        }
        actor.backward(&sample.cache, &grad_out).0
    }

    /// Unit action for one row of raw actor output, matching [`Self::sample`].
    pub fn squash(&self, output: &[f64], noise: &[f64]) -> Vec<f64> {
        let dim = output.len() / 2;
        (0..dim)
            .map(|k| {
                let ls = output[dim + k].clamp(self.log_std_min, self.log_std_max);
                (output[k] + ls.exp() * noise[k]).tanh()
            })
            .collect()
    }

    /// Mean action with the noise switched off.
    pub fn deterministic(&self, actor: &Mlp, states: &Array2<f64>) -> Array2<f64> {
        let dim = Self::action_dim(actor);
        let out = actor.forward(states);
        out.slice(ndarray::s![.., ..dim]).mapv(|m| self.stride * m.tanh())
    }
}

/// Stacks a single state as a one-row batch.
pub fn single_row(state: &[f64]) -> Array2<f64> {
    Array2::from_shape_vec((1, state.len()), state.to_vec()).expect("row shape")
}

pub fn concat_columns(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    ndarray::concatenate(Axis(1), &[a.view(), b.view()]).expect("row counts agree")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn stable_log_jacobian() {
        for z in [-40.0, -3.0, 0.0, 0.7, 25.0] {
            let t: f64 = f64::tanh(z);
            let direct = (1.0 - t * t).ln();
            if direct.is_finite() && z.abs() < 10.0 {
                assert!((log_one_minus_tanh_sq(z) - direct).abs() < 1e-12);
            }
            assert!(log_one_minus_tanh_sq(z).is_finite());
        }
    }

    #[test]
    fn collapsed_std_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut actor = Mlp::new(&[4, 8, 4], &mut rng);
        // push the raw log-std outputs far below the clamp
        actor.biases[1][2] = -50.0;
        actor.biases[1][3] = -50.0;
        let head = PolicyHead::default();
        let states = Array2::from_shape_fn((3, 4), |(r, c)| (r + c) as f64 * 0.1);
        let noise = Array2::from_elem((3, 2), 1.7);
        let s = head.sample(&actor, &states, &noise);
        assert!(s.log_std.iter().all(|&v| v == LOG_STD_MIN));
        let det = head.deterministic(&actor, &states);
        for (a, d) in s.actions(head.stride).iter().zip(det.iter()) {
            assert!((a - d).abs() < 1e-6);
            assert!(a.abs() <= ACTION_STRIDE);
        }
    }
}
