use std::io::Write;
use std::path::Path;

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::adam::Adam;
use super::mlp::{Activation, Mlp};
use super::sac::{SacConfig, SacLearner, SacNetworks, SacOptimizers};
use crate::error::{Error, Result};

pub const CHECKPOINT_VERSION: &str = "hardfactor-checkpoint/1";

/// Little-endian f64 array as base64.
pub fn encode_f64s(values: &[f64]) -> String {
    let mut bytes = Vec::with_capacity(values.len() * 8);
    for v in values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    STANDARD.encode(bytes)
}

pub fn decode_f64s(text: &str) -> Result<Vec<f64>> {
    let bytes = STANDARD
        .decode(text)
        .map_err(|e| Error::Malformed(format!("base64: {e}")))?;
    if bytes.len() % 8 != 0 {
        return Err(Error::Malformed(format!("{} bytes is not a whole number of f64", bytes.len())));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkRecord {
    pub dims: Vec<usize>,
    pub activation: Activation,
    pub params: String,
}

impl NetworkRecord {
    pub fn from_net(net: &Mlp) -> Self {
        Self {
            dims: net.dims(),
            activation: net.activation,
            params: encode_f64s(&net.flatten()),
        }
    }

    pub fn to_net(&self) -> Result<Mlp> {
        let mut net = Mlp::from_flat(&self.dims, &decode_f64s(&self.params)?)?;
        net.activation = self.activation;
        Ok(net)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamRecord {
    pub lr: f64,
    pub step: u64,
    pub m: String,
    pub v: String,
}

impl AdamRecord {
    pub fn from_adam(opt: &Adam) -> Self {
        Self {
            lr: opt.lr,
            step: opt.step,
            m: encode_f64s(&opt.m.flatten()),
            v: encode_f64s(&opt.v.flatten()),
        }
    }

    pub fn to_adam(&self, net: &Mlp) -> Result<Adam> {
        let mut opt = Adam::new(net, self.lr);
        opt.step = self.step;
        let dims = net.dims();
        let m = Mlp::from_flat(&dims, &decode_f64s(&self.m)?)?;
        let v = Mlp::from_flat(&dims, &decode_f64s(&self.v)?)?;
        opt.m.weights = m.weights;
        opt.m.biases = m.biases;
        opt.v.weights = v.weights;
        opt.v.biases = v.biases;
        Ok(opt)
    }
}

/// Full ChaCha position; the word position is kept as a decimal string
/// because it is 128 bits wide.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RngRecord {
    pub name: String,
    pub seed: String,
    pub stream: u64,
    pub word_pos: String,
}

impl RngRecord {
    pub fn capture(name: &str, rng: &ChaCha8Rng) -> Self {
        let seed: String = rng.get_seed().iter().map(|b| format!("{b:02x}")).collect();
        Self {
            name: name.to_string(),
            seed,
            stream: rng.get_stream(),
            word_pos: rng.get_word_pos().to_string(),
        }
    }

    pub fn restore(&self) -> Result<ChaCha8Rng> {
        use rand::SeedableRng;
        if self.seed.len() != 64 {
            return Err(Error::Malformed(format!("rng seed for {}", self.name)));
        }
        let mut seed = [0u8; 32];
        for (i, byte) in seed.iter_mut().enumerate() {
            *byte = u8::from_str_radix(&self.seed[2 * i..2 * i + 2], 16)
                .map_err(|e| Error::Malformed(format!("rng seed: {e}")))?;
        }
        let mut rng = ChaCha8Rng::from_seed(seed);
        rng.set_stream(self.stream);
        let pos: u128 = self
            .word_pos
            .parse()
            .map_err(|e| Error::Malformed(format!("rng word position: {e}")))?;
        rng.set_word_pos(pos);
        Ok(rng)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerRecords {
    pub actor: AdamRecord,
    pub critic1: AdamRecord,
    pub critic2: AdamRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Checkpoint {
    pub version: String,
    #[serde(rename = "C")]
    pub coefficients: usize,
    pub qubits: usize,
    pub config: SacConfig,
    pub actor: NetworkRecord,
    pub critic1: NetworkRecord,
    pub critic2: NetworkRecord,
    pub target1: NetworkRecord,
    pub target2: NetworkRecord,
    pub optimizers: OptimizerRecords,
    pub gradient_steps: u64,
    pub episodes_completed: usize,
    pub measurements: usize,
    pub current_b: Vec<f64>,
    pub best_b: Vec<f64>,
    /// Unscaled; absent until the first measurement.
    pub best_reward: Option<f64>,
    pub rng: Vec<RngRecord>,
}

impl Checkpoint {
    pub fn networks(&self) -> Result<SacNetworks> {
        Ok(SacNetworks {
            actor: self.actor.to_net()?,
            critic1: self.critic1.to_net()?,
            critic2: self.critic2.to_net()?,
            target1: self.target1.to_net()?,
            target2: self.target2.to_net()?,
        })
    }

    pub fn learner(&self) -> Result<SacLearner> {
        let nets = self.networks()?;
        let opt = SacOptimizers {
            actor: self.optimizers.actor.to_adam(&nets.actor)?,
            critic1: self.optimizers.critic1.to_adam(&nets.critic1)?,
            critic2: self.optimizers.critic2.to_adam(&nets.critic2)?,
        };
        Ok(SacLearner {
            nets,
            opt,
            gradient_steps: self.gradient_steps,
        })
    }

    pub fn rng(&self, name: &str) -> Result<ChaCha8Rng> {
        self.rng
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| Error::Malformed(format!("checkpoint has no rng stream {name}")))?
            .restore()
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut out = serde_json::to_vec_pretty(self)?;
        out.push(b'\n');
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let probe: serde_json::Value = serde_json::from_slice(bytes)?;
        match probe.get("version").and_then(|v| v.as_str()) {
            Some(CHECKPOINT_VERSION) => {}
            Some(other) => return Err(Error::UnsupportedVersion(other.to_string())),
            None => return Err(Error::Malformed("checkpoint without version".into())),
        }
        let ckpt: Self = serde_json::from_value(probe)?;
        ckpt.networks()?;
        Ok(ckpt)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.to_bytes()?)
    }
}

/// Writes to a sibling temp file, then renames over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{RngCore, SeedableRng};

    #[test]
    fn f64_codec_is_exact() {
        let v = vec![0.0, -0.0, 1.0 / 3.0, f64::MIN_POSITIVE, 1e300, -2.5];
        let back = decode_f64s(&encode_f64s(&v)).unwrap();
        assert_eq!(
            v.iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
            back.iter().map(|x| x.to_bits()).collect::<Vec<_>>()
        );
        assert!(decode_f64s("AAAA").is_err());
    }

    #[test]
    fn rng_position_survives() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..37 {
            rng.next_u32();
        }
        let rec = RngRecord::capture("env", &rng);
        let mut back = rec.restore().unwrap();
        assert_eq!(rng.next_u64(), back.next_u64());
    }
}
