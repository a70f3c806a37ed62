//! Run configuration: a JSON file whose sections mirror the command
//! settings, overlaid by command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use hardfactor::encoder::MemberFilter;
use hardfactor::rl::SacConfig;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct ClassSettings {
    /// Inclusive `[first, last]`.
    pub range: [u64; 2],
    pub numbers: Vec<u64>,
    pub qubits: Option<usize>,
    pub width: usize,
    pub filter: MemberFilter,
}

impl Default for ClassSettings {
    fn default() -> Self {
        Self {
            range: [49, 633],
            numbers: Vec::new(),
            qubits: None,
            width: hardfactor::encoder::DEFAULT_BLOCK_WIDTH,
            filter: MemberFilter::Semiprime,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct ProfileSettings {
    pub runs: usize,
    pub beta0: f64,
}

impl Default for ProfileSettings {
    fn default() -> Self {
        Self {
            runs: hardfactor::hardness::DEFAULT_RUNS,
            beta0: hardfactor::hardness::DEFAULT_BETA0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct CalibrateSettings {
    pub threshold: f64,
    pub grid_start: f64,
    pub grid_ratio: f64,
    pub grid_points: usize,
}

impl Default for CalibrateSettings {
    fn default() -> Self {
        let g = hardfactor::dynamics::GeometricGrid::default();
        Self {
            threshold: hardfactor::dynamics::DEFAULT_THRESHOLD,
            grid_start: g.start,
            grid_ratio: g.ratio,
            grid_points: g.points,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct TrainSettings {
    #[serde(flatten)]
    pub sac: SacConfig,
    /// Split-step slices per reward evaluation; `ceil(T)` when absent.
    pub measure_slices: Option<usize>,
    pub checkpoint_every: usize,
}

impl Default for TrainSettings {
    fn default() -> Self {
        Self {
            sac: SacConfig::default(),
            measure_slices: None,
            checkpoint_every: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct EvaluateSettings {
    pub bins: usize,
}

impl Default for EvaluateSettings {
    fn default() -> Self {
        Self { bins: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct RunConfig {
    pub seed: u64,
    pub out: PathBuf,
    pub workers: Option<usize>,
    pub class: ClassSettings,
    pub profile: ProfileSettings,
    pub calibrate: CalibrateSettings,
    pub train: TrainSettings,
    pub evaluate: EvaluateSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            out: PathBuf::from("runs"),
            workers: None,
            class: ClassSettings::default(),
            profile: ProfileSettings::default(),
            calibrate: CalibrateSettings::default(),
            train: TrainSettings::default(),
            evaluate: EvaluateSettings::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// `a..b` (inclusive).
pub fn parse_range(text: &str) -> Result<[u64; 2]> {
    let Some((a, b)) = text.split_once("..") else {
        bail!("expected a range like 49..633, got {text}");
    };
    let b = b.trim_start_matches('=');
    let (a, b): (u64, u64) = (a.trim().parse()?, b.trim().parse()?);
    if a > b {
        bail!("empty range {text}");
    }
    Ok([a, b])
}

/// Overwrites `slot` when the flag was given.
pub fn overlay<T>(slot: &mut T, flag: Option<T>) {
    if let Some(v) = flag {
        *slot = v;
    }
}
