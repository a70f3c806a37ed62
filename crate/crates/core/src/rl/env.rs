use serde::{Deserialize, Serialize};

use super::reward::RewardType;
use crate::error::{Error, Result};
use crate::schedule::{clamp_coefficients, Schedule, DEFAULT_MONOTONE_GRID};

pub const ONE_HOT_SLOTS: usize = 10;
pub const TIME_CODE_DIM: usize = 2 * ONE_HOT_SLOTS;

/// Tens and units digits of `t`, each one-hot over ten slots.
pub fn double_one_hot(t: usize) -> [f64; TIME_CODE_DIM] {
    let mut code = [0.0; TIME_CODE_DIM];
    code[(t / ONE_HOT_SLOTS) % ONE_HOT_SLOTS] = 1.0;
    code[ONE_HOT_SLOTS + t % ONE_HOT_SLOTS] = 1.0;
    code
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvState {
    pub t: usize,
    pub b: Vec<f64>,
}

impl EnvState {
    pub fn encoded(&self) -> Vec<f64> {
        let mut v = double_one_hot(self.t).to_vec();
        v.extend_from_slice(&self.b);
        v
    }

    pub fn dim(&self) -> usize {
        TIME_CODE_DIM + self.b.len()
    }
}

/// One reward evaluation of a candidate schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    /// Unscaled reward-function value.
    pub reward: f64,
    pub success: Vec<f64>,
    pub min_success: f64,
    pub mean_success: f64,
    pub floored: bool,
}

/// Anything that can score a coefficient vector.
pub trait RewardSource: Sync {
    fn measure(&self, b: &[f64]) -> Result<Measurement>;
}

/// Quadratic bowl around `target`, used to sanity-check the agent.
#[derive(Debug, Clone)]
pub struct ToyReward {
    pub target: Vec<f64>,
}

impl ToyReward {
    pub fn new(target: Vec<f64>) -> Self {
        Self { target }
    }
}

impl RewardSource for ToyReward {
    fn measure(&self, b: &[f64]) -> Result<Measurement> {
        if b.len() != self.target.len() {
            return Err(Error::ShapeMismatch(format!("{} coefficients, target has {}", b.len(), self.target.len())));
        }
        let d: f64 = b.iter().zip(&self.target).map(|(x, y)| (x - y) * (x - y)).sum();
        Ok(Measurement {
            reward: -d,
            success: Vec::new(),
            min_success: f64::NAN,
            mean_success: f64::NAN,
            floored: false,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EnvConfig {
    pub episode_length: usize,
    pub measure_every: usize,
    pub reward_scale: f64,
    pub stride: f64,
    pub monotone_grid: usize,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            episode_length: 40,
            measure_every: 10,
            reward_scale: 5.0,
            stride: super::policy::ACTION_STRIDE,
            monotone_grid: DEFAULT_MONOTONE_GRID,
        }
    }
}

pub fn is_valid_schedule(b: &[f64], grid: usize) -> bool {
    Schedule::fourier(b.to_vec()).is_monotone(grid)
}

pub fn env_reset(b0: &Schedule, cfg: &EnvConfig) -> Result<EnvState> {
    let b = b0.coefficients().to_vec();
    if b.iter().any(|v| !(-1.0..=1.0).contains(v)) {
        return Err(Error::OutOfDomain {
            value: b.iter().copied().fold(0.0, |m: f64, v| m.max(v.abs())),
            lo: -1.0,
            hi: 1.0,
        });
    }
    if !is_valid_schedule(&b, cfg.monotone_grid) {
        return Err(Error::NonMonotone);
    }
    Ok(EnvState { t: 1, b })
}

/// `clamp(b + a)`; validity is up to the caller.
pub fn propose(state: &EnvState, action: &[f64]) -> Vec<f64> {
    let raw: Vec<f64> = state.b.iter().zip(action).map(|(b, a)| b + a).collect();
    clamp_coefficients(&raw)
}

pub fn is_measurement_step(t: usize, cfg: &EnvConfig) -> bool {
    t % cfg.measure_every == 0
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub next: EnvState,
    /// Scaled reward fed to the agent; zero between measurements.
    pub reward: f64,
    pub measurement: Option<Measurement>,
    pub done: bool,
}

/// Applies an already-validated action.
pub fn env_step(
    state: &EnvState,
    action: &[f64],
    source: &dyn RewardSource,
    cfg: &EnvConfig,
) -> Result<StepOutcome> {
    if action.iter().any(|a| a.abs() > cfg.stride * (1.0 + 1e-12)) {
        return Err(Error::OutOfDomain {
            value: action.iter().copied().fold(0.0, |m: f64, v| m.max(v.abs())),
            lo: -cfg.stride,
            hi: cfg.stride,
        });
    }
    let b = propose(state, action);
    let (reward, measurement) = if is_measurement_step(state.t, cfg) {
        let m = source.measure(&b)?;
        (cfg.reward_scale * m.reward, Some(m))
    } else {
        (0.0, None)
    };
    Ok(StepOutcome {
        next: EnvState { t: state.t + 1, b },
        reward,
        measurement,
        done: state.t >= cfg.episode_length,
    })
}

/// Reward over a fixed problem set, one fixed-slice evolution per instance.
pub struct AqcReward {
    pub numbers: Vec<u64>,
    pub problems: Vec<crate::dynamics::EvolutionProblem>,
    pub total_time: f64,
    pub slices: usize,
    pub kind: RewardType,
}

impl AqcReward {
    /// Reward over the listed members of `class`, in class-normalized units.
    pub fn for_hard_set(
        class: &crate::encoder::SizeClass,
        hard: &[u64],
        total_time: f64,
        slices: usize,
        kind: RewardType,
    ) -> Result<Self> {
        if hard.is_empty() {
            return Err(Error::Empty("hard set"));
        }
        let problems = hard
            .iter()
            .map(|&n| {
                class
                    .get(n)
                    .map(|i| crate::dynamics::EvolutionProblem::from_instance(i, class.norm_constant))
                    .ok_or_else(|| Error::Malformed(format!("{n} is not in the {}-qubit class", class.qubits)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            numbers: hard.to_vec(),
            problems,
            total_time,
            slices,
            kind,
        })
    }
}

impl RewardSource for AqcReward {
    fn measure(&self, b: &[f64]) -> Result<Measurement> {
        let schedule = Schedule::fourier(b.to_vec());
        let outcomes = crate::dynamics::evaluate_problems_fixed(&self.problems, &schedule, self.total_time, self.slices);
        let success: Vec<f64> = outcomes.iter().map(|o| o.success_probability).collect();
        let energies: Vec<f64> = outcomes.iter().map(|o| o.energy).collect();
        let r = super::reward::reward_fn(&success, self.kind, Some(&energies))?;
        let min_success = success.iter().copied().fold(f64::INFINITY, f64::min);
        let mean_success = success.iter().sum::<f64>() / success.len() as f64;
        Ok(Measurement {
            reward: r.value,
            success,
            min_success,
            mean_success,
            floored: r.floored,
        })
    }
}
