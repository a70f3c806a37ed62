use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::buffer::{ReplayBuffer, Transition};
use super::checkpoint::{AdamRecord, Checkpoint, NetworkRecord, OptimizerRecords, RngRecord, CHECKPOINT_VERSION};
use super::env::{env_reset, is_measurement_step, propose, EnvState, RewardSource};
use super::policy::single_row;
use super::sac::{gaussian_noise, SacConfig, SacLearner, SacNetworks, UpdateStats};
use crate::error::{Error, Result};
use crate::rng::substream;
use crate::schedule::{MonotoneGrid, Schedule};

const STREAMS: [&str; 3] = ["env", "buffer", "update"];

/// What to copy from a source checkpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransferMode {
    Actor,
    Critic,
    Both,
    Schedule,
}

impl std::str::FromStr for TransferMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "actor" => Ok(Self::Actor),
            "critic" => Ok(Self::Critic),
            "both" => Ok(Self::Both),
            "schedule" => Ok(Self::Schedule),
            _ => Err(Error::Malformed(format!("unknown transfer mode {s}"))),
        }
    }
}

/// One row of the training log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub episode: usize,
    pub step: usize,
    pub measurement_index: usize,
    pub reward: f64,
    pub best_reward: f64,
    pub min_success: f64,
    pub mean_success: f64,
}

pub const TRACE_HEADER: &str = "episode,step,measurement_index,reward,best_reward,min_success,mean_success";

impl TraceRow {
    /// Success columns are left empty when the source has no success
    /// probabilities.
    pub fn csv(&self) -> String {
        let opt = |v: f64| if v.is_finite() { v.to_string() } else { String::new() };
        format!(
            "{},{},{},{},{},{},{}",
            self.episode,
            self.step,
            self.measurement_index,
            self.reward,
            self.best_reward,
            opt(self.min_success),
            opt(self.mean_success)
        )
    }
}

pub fn trace_csv(rows: &[TraceRow]) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv());
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainStats {
    /// Steps where every resample was non-monotone and the zero action was used.
    pub resample_exhausted: usize,
    pub floored_measurements: usize,
    pub last_update: Option<UpdateStats>,
}

/// SAC training state over one reward source.
pub struct Trainer {
    pub cfg: SacConfig,
    pub qubits: usize,
    pub learner: SacLearner,
    pub buffer: ReplayBuffer,
    env_rng: ChaCha8Rng,
    buffer_rng: ChaCha8Rng,
    update_rng: ChaCha8Rng,
    pub b: Vec<f64>,
    pub best_b: Vec<f64>,
    pub best_reward: Option<f64>,
    pub episodes_completed: usize,
    pub measurements: usize,
    pub stats: TrainStats,
    monotone: MonotoneGrid,
}

impl Trainer {
    /// Fresh networks, starting schedule `b0`.
    pub fn fresh(cfg: SacConfig, qubits: usize, b0: &Schedule) -> Result<Self> {
        let mut actor_rng = substream(cfg.seed, "actor", &[]);
        let mut critic_rng = substream(cfg.seed, "critic", &[]);
        let nets = SacNetworks::new(&cfg, &mut actor_rng, &mut critic_rng);
        Self::assemble(cfg, qubits, nets, b0)
    }

    fn assemble(cfg: SacConfig, qubits: usize, nets: SacNetworks, b0: &Schedule) -> Result<Self> {
        if b0.coefficients().len() != cfg.coefficients {
            return Err(Error::ShapeMismatch(format!(
                "{} starting coefficients, config has {}",
                b0.coefficients().len(),
                cfg.coefficients
            )));
        }
        let start = env_reset(b0, &cfg.env())?;
        let learner = SacLearner::new(nets, &cfg);
        Ok(Self {
            buffer: ReplayBuffer::new(cfg.buffer_capacity),
            env_rng: substream(cfg.seed, "env", &[]),
            buffer_rng: substream(cfg.seed, "buffer", &[]),
            update_rng: substream(cfg.seed, "update", &[]),
            b: start.b.clone(),
            best_b: start.b,
            best_reward: None,
            episodes_completed: 0,
            measurements: 0,
            stats: TrainStats::default(),
            monotone: MonotoneGrid::new(cfg.env().monotone_grid, cfg.coefficients),
            learner,
            cfg,
            qubits,
        })
    }

    /// Initializes from `source` under `mode`; optimizer moments always start
    /// from zero and every network that is not copied is freshly drawn from
    /// this run's seed.
    pub fn transfer(cfg: SacConfig, qubits: usize, source: &Checkpoint, mode: TransferMode) -> Result<Self> {
        if source.coefficients != cfg.coefficients {
            return Err(Error::ShapeMismatch(format!(
                "source has C = {}, target C = {}",
                source.coefficients, cfg.coefficients
            )));
        }
        let src = source.networks()?;
        let mut actor_rng = substream(cfg.seed, "actor", &[]);
        let mut critic_rng = substream(cfg.seed, "critic", &[]);
        let mut nets = SacNetworks::new(&cfg, &mut actor_rng, &mut critic_rng);
        let check = |got: &crate::rl::mlp::Mlp, want: Vec<usize>| -> Result<()> {
            if got.dims() != want {
                return Err(Error::ShapeMismatch(format!("source network {:?}, expected {:?}", got.dims(), want)));
            }
            Ok(())
        };
        if matches!(mode, TransferMode::Actor | TransferMode::Both) {
            check(&src.actor, cfg.actor_dims())?;
            nets.actor = src.actor.clone();
        }
        if matches!(mode, TransferMode::Critic | TransferMode::Both) {
            for c in [&src.critic1, &src.critic2, &src.target1, &src.target2] {
                check(c, cfg.critic_dims())?;
            }
            nets.critic1 = src.critic1;
            nets.critic2 = src.critic2;
            nets.target1 = src.target1;
            nets.target2 = src.target2;
        }
        let b0 = if mode == TransferMode::Schedule {
            Schedule::fourier(source.best_b.clone())
        } else {
            Schedule::zeros(cfg.coefficients)
        };
        Self::assemble(cfg, qubits, nets, &b0)
    }

    /// Continues from a checkpoint written by [`Trainer::checkpoint`]. The
    /// replay buffer is not persisted and starts empty.
    pub fn resume(cfg: SacConfig, source: &Checkpoint) -> Result<Self> {
        let learner = source.learner()?;
        let mut t = Self::assemble(cfg, source.qubits, learner.nets.clone(), &Schedule::fourier(source.current_b.clone()))?;
        t.learner = learner;
        t.env_rng = source.rng("env")?;
        t.buffer_rng = source.rng("buffer")?;
        t.update_rng = source.rng("update")?;
        t.best_b = source.best_b.clone();
        t.best_reward = source.best_reward;
        t.episodes_completed = source.episodes_completed;
        t.measurements = source.measurements;
        Ok(t)
    }

    pub fn checkpoint(&self) -> Checkpoint {
        let nets = &self.learner.nets;
        let opt = &self.learner.opt;
        let rngs = [&self.env_rng, &self.buffer_rng, &self.update_rng];
        Checkpoint {
            version: CHECKPOINT_VERSION.to_string(),
            coefficients: self.cfg.coefficients,
            qubits: self.qubits,
            config: self.cfg.clone(),
            actor: NetworkRecord::from_net(&nets.actor),
            critic1: NetworkRecord::from_net(&nets.critic1),
            critic2: NetworkRecord::from_net(&nets.critic2),
            target1: NetworkRecord::from_net(&nets.target1),
            target2: NetworkRecord::from_net(&nets.target2),
            optimizers: OptimizerRecords {
                actor: AdamRecord::from_adam(&opt.actor),
                critic1: AdamRecord::from_adam(&opt.critic1),
                critic2: AdamRecord::from_adam(&opt.critic2),
            },
            gradient_steps: self.learner.gradient_steps,
            episodes_completed: self.episodes_completed,
            measurements: self.measurements,
            current_b: self.b.clone(),
            best_b: self.best_b.clone(),
            best_reward: self.best_reward,
            rng: STREAMS.iter().zip(rngs).map(|(n, r)| RngRecord::capture(n, r)).collect(),
        }
    }

    pub fn best_schedule(&self) -> Schedule {
        Schedule::fourier(self.best_b.clone())
    }

    /// Draws a monotone-preserving unit action for `state`, falling back to
    /// zero once the resample budget is spent.
    fn choose(&mut self, state: &EnvState) -> (Vec<f64>, Vec<f64>) {
        let head = self.cfg.head();
        let output = self.learner.nets.actor.forward(&single_row(&state.encoded()));
        let output = output.row(0).to_vec();
        for _ in 0..=self.cfg.max_resamples {
            let noise = gaussian_noise(1, self.cfg.coefficients, &mut self.env_rng);
            let unit = head.squash(&output, noise.as_slice().expect("contiguous"));
            let a: Vec<f64> = unit.iter().map(|u| u * self.cfg.action_stride).collect();
            let next = propose(state, &a);
            if self.monotone.is_monotone(&next) {
                return (unit, next);
            }
        }
        self.stats.resample_exhausted += 1;
        (vec![0.0; self.cfg.coefficients], state.b.clone())
    }

    /// One episode of interaction followed by the gradient steps.
    pub fn run_episode(&mut self, source: &dyn RewardSource, trace: &mut Vec<TraceRow>) -> Result<()> {
        let env = self.cfg.env();
        let episode = self.episodes_completed + 1;
        let mut state = EnvState { t: 1, b: self.b.clone() };
        for t in 1..=env.episode_length {
            state.t = t;
            let (unit, next_b) = self.choose(&state);
            let mut reward = 0.0;
            if is_measurement_step(t, &env) {
                let m = source.measure(&next_b)?;
                self.measurements += 1;
                if m.floored {
                    self.stats.floored_measurements += 1;
                }
                reward = env.reward_scale * m.reward;
                if self.best_reward.is_none_or(|best| m.reward > best) {
                    self.best_reward = Some(m.reward);
                    self.best_b = next_b.clone();
                }
                trace.push(TraceRow {
                    episode,
                    step: t,
                    measurement_index: self.measurements,
                    reward: m.reward,
                    best_reward: self.best_reward.unwrap(),
                    min_success: m.min_success,
                    mean_success: m.mean_success,
                });
            }
            let next = EnvState { t: t + 1, b: next_b };
            self.buffer.push(Transition {
                state: state.encoded(),
                action: unit,
                reward,
                next_state: next.encoded(),
                done: t == env.episode_length,
            });
            state = next;
        }
        self.b = state.b;
        if self.buffer.len() >= self.cfg.batch_size {
            for _ in 0..self.cfg.gradient_steps {
                let batch = self
                    .buffer
                    .sample(self.cfg.batch_size, &mut self.buffer_rng)
                    .expect("buffer holds a full batch");
                let stats = self.learner.gradient_step(&self.cfg, &batch, &mut self.update_rng)?;
                self.stats.last_update = Some(stats);
            }
        }
        self.episodes_completed += 1;
        Ok(())
    }

    /// Runs `cfg.episodes` episodes, calling `observe` after each one.
    pub fn run<F: FnMut(&Trainer, &[TraceRow])>(
        &mut self,
        source: &dyn RewardSource,
        mut observe: F,
    ) -> Result<Vec<TraceRow>> {
        let mut trace = Vec::new();
        for _ in 0..self.cfg.episodes {
            self.run_episode(source, &mut trace)?;
            observe(self, &trace);
        }
        Ok(trace)
    }
}

/// Result of a complete training run.
pub struct TrainOutcome {
    pub checkpoint: Checkpoint,
    pub best_schedule: Schedule,
    pub best_reward: Option<f64>,
    pub trace: Vec<TraceRow>,
    pub stats: TrainStats,
}

pub fn train(source: &dyn RewardSource, trainer: Trainer) -> Result<TrainOutcome> {
    let mut trainer = trainer;
    let trace = trainer.run(source, |_, _| {})?;
    Ok(TrainOutcome {
        checkpoint: trainer.checkpoint(),
        best_schedule: trainer.best_schedule(),
        best_reward: trainer.best_reward,
        trace,
        stats: trainer.stats.clone(),
    })
}
