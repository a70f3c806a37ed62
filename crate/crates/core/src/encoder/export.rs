use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::class::{Instance, SizeClass};
use super::ising::IsingHamiltonian;
use super::layout::BitSplit;

/// On-disk form of an encoded instance. Fields, couplings and offset are
/// the unnormalized Ising coefficients (exact quarter-integers); divide by
/// `normConstant` for the class-normalized Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceExport {
    pub n: usize,
    #[serde(rename = "N")]
    pub number: u64,
    pub split: BitSplit,
    #[serde(rename = "W")]
    pub width: usize,
    pub variables: Vec<String>,
    pub h: Vec<f64>,
    #[serde(rename = "J")]
    pub couplings: Vec<(usize, usize, f64)>,
    pub offset: f64,
    #[serde(rename = "normConstant")]
    pub norm_constant: f64,
    #[serde(rename = "normIncludesOffset")]
    pub norm_includes_offset: bool,
}

impl InstanceExport {
    pub fn new(instance: &Instance, norm_constant: f64) -> Self {
        let reg = &instance.registry;
        Self {
            n: instance.qubits(),
            number: instance.number,
            split: instance.split(),
            width: instance.layout.width,
            variables: (0..reg.len()).map(|v| reg.name(v)).collect(),
            h: instance.ising.fields.clone(),
            couplings: instance.ising.couplings.clone(),
            offset: instance.ising.offset,
            norm_constant,
            norm_includes_offset: false,
        }
    }

    pub fn hamiltonian(&self) -> IsingHamiltonian {
        IsingHamiltonian {
            n: self.n,
            fields: self.h.clone(),
            couplings: self.couplings.clone(),
            offset: self.offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    #[serde(rename = "N")]
    pub number: u64,
    pub split: BitSplit,
    pub file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassManifest {
    pub n: usize,
    #[serde(rename = "W")]
    pub width: usize,
    #[serde(rename = "normConstant")]
    pub norm_constant: f64,
    #[serde(rename = "normIncludesOffset")]
    pub norm_includes_offset: bool,
    pub instances: Vec<ManifestEntry>,
}

impl ClassManifest {
    pub fn new(class: &SizeClass) -> Self {
        Self {
            n: class.qubits,
            width: class.width,
            norm_constant: class.norm_constant,
            norm_includes_offset: false,
            instances: class
                .instances
                .iter()
                .map(|i| ManifestEntry {
                    number: i.number,
                    split: i.split(),
                    file: instance_file_name(i.number),
                })
                .collect(),
        }
    }

    pub fn numbers(&self) -> Vec<u64> {
        self.instances.iter().map(|e| e.number).collect()
    }
}

pub fn instance_file_name(number: u64) -> String {
    format!("instance_{number}.json")
}

/// One `i j value` line per coupling and `i i value` per field; the offset
/// is not part of the list.
pub fn flat_couplers(h: &IsingHamiltonian) -> String {
    let mut out = String::new();
    for (i, v) in h.fields.iter().enumerate() {
        if *v != 0.0 {
            writeln!(out, "{i} {i} {v}").unwrap();
        }
    }
    for &(i, j, v) in &h.couplings {
        writeln!(out, "{i} {j} {v}").unwrap();
    }
    out
}
