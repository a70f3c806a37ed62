use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Stand-in for `ln 0` under the logarithmic rewards.
pub const LOG_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RewardType {
    /// min ln p
    R1,
    /// mean ln p
    R2,
    /// min p
    R3,
    /// mean p
    R4,
    /// -mean final energy
    R5,
}

impl RewardType {
    pub const ALL: [RewardType; 5] = [Self::R1, Self::R2, Self::R3, Self::R4, Self::R5];

    pub fn needs_energies(self) -> bool {
        self == Self::R5
    }
}

impl std::str::FromStr for RewardType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "R1" | "REWARD1" => Ok(Self::R1),
            "R2" | "REWARD2" => Ok(Self::R2),
            "R3" | "REWARD3" => Ok(Self::R3),
            "R4" | "REWARD4" => Ok(Self::R4),
            "R5" | "REWARD5" => Ok(Self::R5),
            _ => Err(Error::Malformed(format!("unknown reward type {s}"))),
        }
    }
}

impl std::fmt::Display for RewardType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardValue {
    pub value: f64,
    /// A zero probability hit the logarithm floor.
    pub floored: bool,
}

pub fn reward_fn(probs: &[f64], kind: RewardType, energies: Option<&[f64]>) -> Result<RewardValue> {
    if probs.is_empty() {
        return Err(Error::Empty("success probabilities"));
    }
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    let min = |xs: &[f64]| xs.iter().copied().fold(f64::INFINITY, f64::min);
    let mut floored = false;
    let logs: Vec<f64> = probs
        .iter()
        .map(|&p| {
            if p <= 0.0 {
                floored = true;
                LOG_FLOOR.ln()
            } else {
                p.ln()
            }
        })
        .collect();
    let value = match kind {
        RewardType::R1 => min(&logs),
        RewardType::R2 => mean(&logs),
        RewardType::R3 => min(probs),
        RewardType::R4 => mean(probs),
        RewardType::R5 => {
            let e = energies.ok_or(Error::Empty("final-state energies"))?;
            if e.len() != probs.len() {
                return Err(Error::ShapeMismatch(format!(
                    "{} energies for {} instances",
                    e.len(),
                    probs.len()
                )));
            }
            -mean(e)
        }
    };
    Ok(RewardValue {
        value,
        floored: floored && matches!(kind, RewardType::R1 | RewardType::R2),
    })
}
