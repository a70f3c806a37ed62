use ndarray::{Array1, Array2};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::adam::Adam;
use super::buffer::Batch;
use super::env::EnvConfig;
use super::mlp::{soft_update, Mlp, MlpGrads};
use super::policy::{concat_columns, PolicyHead, ACTION_STRIDE, LOG_STD_MAX, LOG_STD_MIN};
use super::reward::RewardType;
use crate::error::Result;

/// Which way the averaging constant is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PolyakMode {
    /// `target <- polyak * target + (1 - polyak) * online`.
    #[default]
    SlowTarget,
    /// `target <- polyak * online + (1 - polyak) * target`.
    Literal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct SacConfig {
    pub learning_rate: f64,
    pub discount: f64,
    pub entropy_weight: f64,
    pub polyak: f64,
    pub polyak_mode: PolyakMode,
    pub target_update_interval: u64,
    pub gradient_steps: usize,
    pub batch_size: usize,
    pub episodes: usize,
    pub episode_length: usize,
    pub measure_every: usize,
    pub reward_scale: f64,
    pub reward_type: RewardType,
    pub log_std_min: f64,
    pub log_std_max: f64,
    pub random_steps: usize,
    pub action_stride: f64,
    pub coefficients: usize,
    pub actor_hidden: usize,
    pub critic_hidden: usize,
    pub buffer_capacity: usize,
    pub max_resamples: usize,
    pub seed: u64,
}

impl Default for SacConfig {
    fn default() -> Self {
        Self {
            learning_rate: 3e-4,
            discount: 0.9,
            entropy_weight: 0.02,
            polyak: 0.995,
            polyak_mode: PolyakMode::SlowTarget,
            target_update_interval: 2,
            gradient_steps: 2,
            batch_size: 128,
            episodes: 1000,
            episode_length: 40,
            measure_every: 10,
            reward_scale: 5.0,
            reward_type: RewardType::R1,
            log_std_min: LOG_STD_MIN,
            log_std_max: LOG_STD_MAX,
            random_steps: 0,
            action_stride: ACTION_STRIDE,
            coefficients: crate::schedule::DEFAULT_COEFFICIENTS,
            actor_hidden: 256,
            critic_hidden: 512,
            buffer_capacity: super::buffer::DEFAULT_CAPACITY,
            max_resamples: 100,
            seed: 0,
        }
    }
}

impl SacConfig {
    pub fn state_dim(&self) -> usize {
        super::env::TIME_CODE_DIM + self.coefficients
    }

    pub fn head(&self) -> PolicyHead {
        PolicyHead {
            log_std_min: self.log_std_min,
            log_std_max: self.log_std_max,
            stride: self.action_stride,
        }
    }

    pub fn env(&self) -> EnvConfig {
        EnvConfig {
            episode_length: self.episode_length,
            measure_every: self.measure_every,
            reward_scale: self.reward_scale,
            stride: self.action_stride,
            ..EnvConfig::default()
        }
    }

    pub fn actor_dims(&self) -> Vec<usize> {
        vec![self.state_dim(), self.actor_hidden, self.actor_hidden, 2 * self.coefficients]
    }

    pub fn critic_dims(&self) -> Vec<usize> {
        vec![self.state_dim() + self.coefficients, self.critic_hidden, self.critic_hidden, 1]
    }
}

/// Actor, twin critics and their targets.
#[derive(Debug, Clone, PartialEq)]
pub struct SacNetworks {
    pub actor: Mlp,
    pub critic1: Mlp,
    pub critic2: Mlp,
    pub target1: Mlp,
    pub target2: Mlp,
}

impl SacNetworks {
    pub fn fresh_actor<R: Rng>(cfg: &SacConfig, rng: &mut R) -> Mlp {
        Mlp::new(&cfg.actor_dims(), rng)
    }

    /// Two independent critics, targets starting as copies.
    pub fn fresh_critics<R: Rng>(cfg: &SacConfig, rng: &mut R) -> (Mlp, Mlp) {
        (Mlp::new(&cfg.critic_dims(), rng), Mlp::new(&cfg.critic_dims(), rng))
    }

    pub fn new<R: Rng>(cfg: &SacConfig, actor_rng: &mut R, critic_rng: &mut R) -> Self {
        let actor = Self::fresh_actor(cfg, actor_rng);
        let (critic1, critic2) = Self::fresh_critics(cfg, critic_rng);
        Self {
            actor,
            target1: critic1.clone(),
            target2: critic2.clone(),
            critic1,
            critic2,
        }
    }
}

/// Adam state for each trained network.
#[derive(Debug, Clone, PartialEq)]
pub struct SacOptimizers {
    pub actor: Adam,
    pub critic1: Adam,
    pub critic2: Adam,
}

impl SacOptimizers {
    pub fn new(nets: &SacNetworks, lr: f64) -> Self {
        Self {
            actor: Adam::new(&nets.actor, lr),
            critic1: Adam::new(&nets.critic1, lr),
            critic2: Adam::new(&nets.critic2, lr),
        }
    }
}

pub fn gaussian_noise<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Array2<f64> {
    Array2::from_shape_simple_fn((rows, cols), || rng.sample(StandardNormal))
}

pub struct CriticObjective {
    pub targets: Array1<f64>,
    pub loss1: f64,
    pub loss2: f64,
    pub grads1: MlpGrads,
    pub grads2: MlpGrads,
}

/// TD regression losses of both critics; `next_noise` drives `a' ~ pi(s')`.
pub fn critic_objective(nets: &SacNetworks, cfg: &SacConfig, batch: &Batch, next_noise: &Array2<f64>) -> CriticObjective {
    let head = cfg.head();
    let next = head.sample(&nets.actor, &batch.next_states, next_noise);
    let next_in = concat_columns(&batch.next_states, &next.unit);
    let q1t = nets.target1.forward(&next_in);
    let q2t = nets.target2.forward(&next_in);
    let rows = batch.len();
    let targets: Array1<f64> = (0..rows)
        .map(|r| {
            let soft = q1t[[r, 0]].min(q2t[[r, 0]]) - cfg.entropy_weight * next.log_prob[r];
            batch.rewards[r] + cfg.discount * (1.0 - batch.dones[r]) * soft
        })
        .collect();

    let input = concat_columns(&batch.states, &batch.actions);
    let regress = |net: &Mlp| {
        let (q, cache) = net.forward_cached(&input);
        let mut loss = 0.0;
        let mut g = Array2::zeros((rows, 1));
        for r in 0..rows {
            let d = q[[r, 0]] - targets[r];
            loss += d * d;
            g[[r, 0]] = 2.0 * d / rows as f64;
        }
        (loss / rows as f64, net.backward(&cache, &g).0)
    };
    let (loss1, grads1) = regress(&nets.critic1);
    let (loss2, grads2) = regress(&nets.critic2);
    CriticObjective {
        targets,
        loss1,
        loss2,
        grads1,
        grads2,
    }
}

pub struct ActorObjective {
    pub loss: f64,
    pub grads: MlpGrads,
    pub mean_log_std: f64,
}

/// `E[alpha * log pi(a~|s) - min(Q1, Q2)(s, a~)]` with reparameterized `a~`.
pub fn actor_objective(nets: &SacNetworks, cfg: &SacConfig, states: &Array2<f64>, noise: &Array2<f64>) -> ActorObjective {
    let head = cfg.head();
    let sample = head.sample(&nets.actor, states, noise);
    let input = concat_columns(states, &sample.unit);
    let (q1, c1) = nets.critic1.forward_cached(&input);
    let (q2, c2) = nets.critic2.forward_cached(&input);
    let rows = states.nrows();
    let inv = 1.0 / rows as f64;
    let mut loss = 0.0;
    let mut g1 = Array2::zeros((rows, 1));
    let mut g2 = Array2::zeros((rows, 1));
    for r in 0..rows {
        let (q, first) = if q1[[r, 0]] <= q2[[r, 0]] { (q1[[r, 0]], true) } else { (q2[[r, 0]], false) };
        loss += cfg.entropy_weight * sample.log_prob[r] - q;
        if first {
            g1[[r, 0]] = -inv;
        } else {
            g2[[r, 0]] = -inv;
        }
    }
    let state_dim = states.ncols();
    let din = nets.critic1.input_gradient(&c1, &g1) + nets.critic2.input_gradient(&c2, &g2);
    let grad_unit = din.slice(ndarray::s![.., state_dim..]).to_owned();
    let grad_log_prob = Array1::from_elem(rows, cfg.entropy_weight * inv);
    let grads = head.backward(&nets.actor, &sample, &grad_unit, &grad_log_prob);
    ActorObjective {
        loss: loss * inv,
        grads,
        mean_log_std: sample.mean_log_std(),
    }
}

/// Averaging step in the configured direction.
pub fn polyak_update(target: &mut Mlp, online: &Mlp, polyak: f64, mode: PolyakMode) -> Result<()> {
    match mode {
        PolyakMode::SlowTarget => soft_update(target, online, polyak),
        PolyakMode::Literal => soft_update(target, online, 1.0 - polyak),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct UpdateStats {
    pub critic_loss1: f64,
    pub critic_loss2: f64,
    pub actor_loss: f64,
    pub mean_log_std: f64,
}

/// Networks plus optimizers plus the gradient-step counter.
#[derive(Debug, Clone)]
pub struct SacLearner {
    pub nets: SacNetworks,
    pub opt: SacOptimizers,
    pub gradient_steps: u64,
}

impl SacLearner {
    pub fn new(nets: SacNetworks, cfg: &SacConfig) -> Self {
        let opt = SacOptimizers::new(&nets, cfg.learning_rate);
        Self {
            nets,
            opt,
            gradient_steps: 0,
        }
    }

    pub fn critic_update<R: Rng>(&mut self, cfg: &SacConfig, batch: &Batch, rng: &mut R) -> (f64, f64) {
        let noise = gaussian_noise(batch.len(), cfg.coefficients, rng);
        let obj = critic_objective(&self.nets, cfg, batch, &noise);
        self.opt.critic1.apply(&mut self.nets.critic1, &obj.grads1);
        self.opt.critic2.apply(&mut self.nets.critic2, &obj.grads2);
        (obj.loss1, obj.loss2)
    }

    pub fn actor_update<R: Rng>(&mut self, cfg: &SacConfig, states: &Array2<f64>, rng: &mut R) -> (f64, f64) {
        let noise = gaussian_noise(states.nrows(), cfg.coefficients, rng);
        let obj = actor_objective(&self.nets, cfg, states, &noise);
        self.opt.actor.apply(&mut self.nets.actor, &obj.grads);
        (obj.loss, obj.mean_log_std)
    }

    /// Critic step, actor step, then the target sync when due.
    pub fn gradient_step<R: Rng>(&mut self, cfg: &SacConfig, batch: &Batch, rng: &mut R) -> Result<UpdateStats> {
        let (critic_loss1, critic_loss2) = self.critic_update(cfg, batch, rng);
        let (actor_loss, mean_log_std) = self.actor_update(cfg, &batch.states, rng);
        self.gradient_steps += 1;
        if cfg.target_update_interval > 0 && self.gradient_steps % cfg.target_update_interval == 0 {
            polyak_update(&mut self.nets.target1, &self.nets.critic1, cfg.polyak, cfg.polyak_mode)?;
            polyak_update(&mut self.nets.target2, &self.nets.critic2, cfg.polyak, cfg.polyak_mode)?;
        }
        Ok(UpdateStats {
            critic_loss1,
            critic_loss2,
            actor_loss,
            mean_log_std,
        })
    }
}
