//! Soft actor-critic configuration of annealing schedules.
//!
//! The agent observes `[double-one-hot(t), b]`, nudges the Fourier
//! coefficients `b` by at most the action stride per step, and is rewarded
//! every `measure_every` steps with a score of the hard instances' success
//! probabilities under the current schedule.

pub mod adam;
pub mod buffer;
pub mod checkpoint;
pub mod env;
pub mod evaluate;
pub mod mlp;
pub mod policy;
pub mod reward;
pub mod sac;
pub mod trace;
pub mod train;

pub use buffer::{Batch, ReplayBuffer, Transition};
pub use checkpoint::{write_atomic, Checkpoint, CHECKPOINT_VERSION};
pub use env::{
    double_one_hot, env_reset, env_step, AqcReward, EnvConfig, EnvState, Measurement, RewardSource, StepOutcome,
    ToyReward,
};
pub use evaluate::{evaluate_schedule, success_histogram};
pub use mlp::Mlp;
pub use policy::{PolicyHead, PolicySample};
pub use reward::{reward_fn, RewardType, RewardValue};
pub use sac::{actor_objective, critic_objective, polyak_update, PolyakMode, SacConfig, SacLearner, SacNetworks};
pub use train::{trace_csv, train, TraceRow, TrainOutcome, Trainer, TransferMode};
