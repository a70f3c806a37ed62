//! Artifact layout under the output directory and the load-or-build
//! helpers that chain the pipeline stages.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use hardfactor::dynamics::{calibrate_t, classify_instances, Calibration, GeometricGrid, IntegratorConfig, SplitReport};
use hardfactor::encoder::{
    canonical_split, encode_instance, instance_file_name, ClassManifest, Instance, InstanceExport, SizeClass,
};
use hardfactor::rl::write_atomic;
use serde::Serialize;

use crate::config::{CalibrateSettings, ClassSettings};

pub struct Workspace {
    pub out: PathBuf,
}

impl Workspace {
    pub fn new(out: &Path) -> Result<Self> {
        std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
        Ok(Self { out: out.to_path_buf() })
    }

    pub fn class_dir(&self, qubits: usize) -> PathBuf {
        self.out.join(format!("n{qubits}"))
    }

    pub fn manifest_path(&self, qubits: usize) -> PathBuf {
        self.class_dir(qubits).join("manifest.json")
    }

    pub fn calibration_path(&self, qubits: usize) -> PathBuf {
        self.class_dir(qubits).join("calibration.json")
    }

    pub fn split_path(&self, qubits: usize) -> PathBuf {
        self.class_dir(qubits).join("split.json")
    }

    /// Timestamped line in the sidecar log; the only place wall-clock time
    /// is recorded.
    pub fn log(&self, line: &str) -> Result<()> {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let mut f = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(self.out.join("run.log"))?;
        writeln!(f, "{secs} {line}")?;
        Ok(())
    }

    /// Writes the class manifest and one file per instance.
    pub fn write_class(&self, class: &SizeClass) -> Result<()> {
        let dir = self.class_dir(class.qubits);
        std::fs::create_dir_all(dir.join("instances"))?;
        for inst in &class.instances {
            write_json(&dir.join("instances").join(instance_file_name(inst.number)), &InstanceExport::new(inst, class.norm_constant))?;
        }
        write_json(&self.manifest_path(class.qubits), &ClassManifest::new(class))
    }

    /// Rebuilds the class recorded in the manifest, or encodes it from the
    /// range and records it.
    pub fn load_or_build_class(&self, qubits: usize, settings: &ClassSettings) -> Result<SizeClass> {
        let path = self.manifest_path(qubits);
        if path.exists() {
            let manifest: ClassManifest = read_json(&path)?;
            let instances = manifest
                .instances
                .iter()
                .map(|e| encode_instance(e.number, e.split, manifest.width))
                .collect::<hardfactor::Result<Vec<Instance>>>()?;
            let class = SizeClass::from_instances(manifest.n, manifest.width, instances);
            if class.norm_constant != manifest.norm_constant {
                bail!(
                    "{} records normConstant {} but its instances give {}",
                    path.display(),
                    manifest.norm_constant,
                    class.norm_constant
                );
            }
            return Ok(class);
        }
        let [lo, hi] = settings.range;
        let class = hardfactor::encoder::build_size_class_with(lo..=hi, qubits, settings.width, settings.filter)?;
        if class.is_empty() {
            bail!("no admissible numbers in {lo}..{hi} encode to {qubits} qubits");
        }
        self.write_class(&class)?;
        self.log(&format!("encoded {qubits}-qubit class {:?}", class.numbers()))?;
        Ok(class)
    }

    pub fn load_or_calibrate(&self, class: &SizeClass, settings: &CalibrateSettings) -> Result<Calibration> {
        let path = self.calibration_path(class.qubits);
        if path.exists() {
            return read_json(&path);
        }
        let cal = run_calibration(class, settings)?;
        write_json(&path, &cal)?;
        self.log(&format!("calibrated {}-qubit class: T = {}", class.qubits, cal.total_time))?;
        Ok(cal)
    }

    /// The stored split when it was made at the stored `T` and at `threshold`
    /// (any threshold when `None`), else a fresh one at the stored `T`.
    pub fn load_or_classify(&self, class: &SizeClass, cal: &Calibration, threshold: Option<f64>) -> Result<SplitReport> {
        let path = self.split_path(class.qubits);
        if path.exists() {
            let split: SplitReport = read_json(&path)?;
            if threshold.is_none_or(|t| t == split.threshold) && split.total_time == cal.total_time {
                return Ok(split);
            }
        }
        let threshold = threshold.unwrap_or(cal.threshold);
        let split = classify_instances(class, cal.total_time, threshold, &IntegratorConfig::default())?;
        write_json(&path, &split)?;
        self.log(&format!("classified {}-qubit class: hard {:?}", class.qubits, split.hard))?;
        Ok(split)
    }
}

pub fn run_calibration(class: &SizeClass, settings: &CalibrateSettings) -> Result<Calibration> {
    let grid = GeometricGrid {
        start: settings.grid_start,
        ratio: settings.grid_ratio,
        points: settings.grid_points,
    };
    Ok(calibrate_t(class, settings.threshold, &grid, &IntegratorConfig::default())?)
}

/// Encodes the listed numbers, grouped by qubit count; returns the classes
/// and one diagnostic per skipped number.
pub fn encode_numbers(numbers: &[u64], width: usize) -> (BTreeMap<usize, Vec<Instance>>, Vec<String>) {
    let mut groups: BTreeMap<usize, Vec<Instance>> = BTreeMap::new();
    let mut skipped = Vec::new();
    for &n in numbers {
        if n % 2 == 0 {
            skipped.push(format!("skipped {n}: even"));
            continue;
        }
        let Some(layout) = canonical_split(n, width) else {
            skipped.push(format!("skipped {n}: prime or too small, no factor split"));
            continue;
        };
        match encode_instance(n, layout.split, width) {
            Ok(inst) => groups.entry(inst.qubits()).or_default().push(inst),
            Err(e) => skipped.push(format!("skipped {n}: {e}")),
        }
    }
    (groups, skipped)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)?;
    Ok(())
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    write_atomic(path, text.as_bytes())?;
    Ok(())
}
