//! Finite-difference checks of the SAC objectives.

use hardfactor::rl::buffer::Batch;
use hardfactor::rl::mlp::Mlp;
use hardfactor::rl::sac::{actor_objective, critic_objective, gaussian_noise, SacConfig, SacNetworks};
use ndarray::{Array1, Array2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const STEP: f64 = 1e-5;

pub fn toy_config() -> SacConfig {
    SacConfig {
        coefficients: 1,
        discount: 0.9,
        entropy_weight: 0.02,
        ..SacConfig::default()
    }
}

/// State dim 2, action dim 1.
pub fn toy_nets(actor_dims: &[usize], critic_dims: &[usize], seed: u64) -> SacNetworks {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let actor = Mlp::new(actor_dims, &mut rng);
    let critic1 = Mlp::new(critic_dims, &mut rng);
    let critic2 = Mlp::new(critic_dims, &mut rng);
    let target1 = Mlp::new(critic_dims, &mut rng);
    let target2 = Mlp::new(critic_dims, &mut rng);
    SacNetworks {
        actor,
        critic1,
        critic2,
        target1,
        target2,
    }
}

pub fn toy_batch(rows: usize, seed: u64) -> Batch {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let states = gaussian_noise(rows, 2, &mut rng);
    let next_states = gaussian_noise(rows, 2, &mut rng);
    let actions = gaussian_noise(rows, 1, &mut rng).mapv(f64::tanh);
    let rewards = gaussian_noise(rows, 1, &mut rng).column(0).to_owned();
    let dones = Array1::from_shape_fn(rows, |r| if r % 3 == 0 { 1.0 } else { 0.0 });
    Batch {
        states,
        actions,
        rewards,
        next_states,
        dones,
    }
}

pub fn relative_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    let diff: f64 = analytic.iter().zip(numeric).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let scale: f64 = analytic.iter().map(|a| a * a).sum::<f64>().sqrt().max(numeric.iter().map(|a| a * a).sum::<f64>().sqrt());
    diff / scale.max(1e-300)
}

/// Relative error of `analytic` against central differences of `f` over
/// `coords`, and the number of coordinates skipped at kinks.
///
/// Central differences at two step sizes disagree only when a ReLU kink lies
/// within the step. The loss is not differentiable there, so such coordinates
/// are left out of the comparison.
pub fn checked_error<F: Fn(&[f64]) -> f64>(analytic: &[f64], params: &[f64], coords: &[usize], f: F) -> (f64, usize) {
    let central = |i: usize, h: f64| {
        let mut up = params.to_vec();
        let mut dn = params.to_vec();
        up[i] += h;
        dn[i] -= h;
        (f(&up) - f(&dn)) / (2.0 * h)
    };
    let mut picked = Vec::new();
    let mut numeric = Vec::new();
    let mut kinks = 0;
    for &i in coords {
        let (coarse, fine) = (central(i, STEP), central(i, STEP / 10.0));
        if (coarse - fine).abs() > 1e-8 + 1e-4 * coarse.abs() {
            kinks += 1;
            continue;
        }
        picked.push(analytic[i]);
        numeric.push(coarse);
    }
    assert!(kinks * 2 < coords.len().max(1), "{kinks} of {} coordinates at kinks", coords.len());
    (relative_error(&picked, &numeric), kinks)
}

fn all_coords(params: &[f64]) -> Vec<usize> {
    (0..params.len()).collect()
}

/// Relative errors of both critic gradients against central differences.
pub fn critic_errors(cfg: &SacConfig, nets: &SacNetworks, batch: &Batch, noise: &Array2<f64>) -> (f64, f64) {
    let obj = critic_objective(nets, cfg, batch, noise);

    let base = nets.critic1.flatten();
    let (err1, _) = checked_error(&obj.grads1.flatten(), &base, &all_coords(&base), |p| {
        let mut n = nets.clone();
        n.critic1.set_flat(p).unwrap();
        critic_objective(&n, cfg, batch, noise).loss1
    });

    let base = nets.critic2.flatten();
    let (err2, _) = checked_error(&obj.grads2.flatten(), &base, &all_coords(&base), |p| {
        let mut n = nets.clone();
        n.critic2.set_flat(p).unwrap();
        critic_objective(&n, cfg, batch, noise).loss2
    });
    (err1, err2)
}

/// Relative error of the actor gradient against central differences.
pub fn actor_error(cfg: &SacConfig, nets: &SacNetworks, states: &Array2<f64>, noise: &Array2<f64>) -> f64 {
    let obj = actor_objective(nets, cfg, states, noise);
    let base = nets.actor.flatten();
    checked_error(&obj.grads.flatten(), &base, &all_coords(&base), |p| {
        let mut n = nets.clone();
        n.actor.set_flat(p).unwrap();
        actor_objective(&n, cfg, states, noise).loss
    })
    .0
}
