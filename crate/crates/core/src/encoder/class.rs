use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cost::build_cost_function;
use super::ising::{brute_force_ground, to_ising, GroundState, IsingHamiltonian};
use super::layout::{build_block_layout, enumerate_bit_splits, BitSplit, BlockLayout};
use super::poly::QuboPolynomial;
use super::reduce::reduce_to_quadratic;
use super::registry::VariableRegistry;
use crate::error::Result;

pub const DEFAULT_BLOCK_WIDTH: usize = 3;

/// One factoring instance carried through every encoding stage.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Instance {
    pub number: u64,
    pub layout: BlockLayout,
    pub registry: VariableRegistry,
    /// Cost before quadratization (order up to four).
    pub cost: QuboPolynomial,
    pub qubo: QuboPolynomial,
    pub ising: IsingHamiltonian,
    pub ground: GroundState,
}

impl Instance {
    pub fn split(&self) -> BitSplit {
        self.layout.split
    }

    pub fn qubits(&self) -> usize {
        self.layout.total_qubits
    }

    pub fn normalized(&self, norm: f64) -> IsingHamiltonian {
        self.ising.scaled(1.0 / norm)
    }
}

pub fn encode_instance(number: u64, split: BitSplit, width: usize) -> Result<Instance> {
    let layout = build_block_layout(split, width)?;
    let (cost, reg) = build_cost_function(number, &layout);
    let (qubo, registry) = reduce_to_quadratic(&cost, &reg)?;
    debug_assert_eq!(registry.len(), layout.total_qubits);
    let ising = to_ising(&qubo)?;
    let ground = brute_force_ground(&ising)?;
    Ok(Instance {
        number,
        layout,
        registry,
        cost,
        qubo,
        ising,
        ground,
    })
}

/// The split the pipeline encodes by default: fewest qubits, then the most
/// balanced bit lengths.
pub fn canonical_split(number: u64, width: usize) -> Option<BlockLayout> {
    enumerate_bit_splits(number)
        .into_iter()
        .filter_map(|s| build_block_layout(s, width).ok())
        .min_by_key(|l| (l.total_qubits, l.split.lq - l.split.lp, l.split.lp))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SizeClass {
    pub qubits: usize,
    pub width: usize,
    pub instances: Vec<Instance>,
    /// Largest absolute QUBO coefficient of order >= 1 across the class;
    /// the constant term is not included.
    pub norm_constant: f64,
    pub calibrated_t: Option<f64>,
}

impl SizeClass {
    pub fn from_instances(qubits: usize, width: usize, instances: Vec<Instance>) -> Self {
        let norm_constant = instances
            .iter()
            .map(|i| i.qubo.max_abs_coefficient())
            .max()
            .unwrap_or(0) as f64;
        Self {
            qubits,
            width,
            instances,
            norm_constant,
            calibrated_t: None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn numbers(&self) -> Vec<u64> {
        self.instances.iter().map(|i| i.number).collect()
    }

    pub fn get(&self, number: u64) -> Option<&Instance> {
        self.instances.iter().find(|i| i.number == number)
    }
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Product of exactly two primes.
pub fn is_semiprime(n: u64) -> bool {
    (2..)
        .take_while(|d| d * d <= n)
        .find(|d| n % d == 0)
        .is_some_and(|d| is_prime(n / d))
}

/// Which odd numbers of a range are admitted into a size class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MemberFilter {
    /// `N = p q` with both factors prime.
    #[default]
    Semiprime,
    OddComposite,
}

impl MemberFilter {
    pub fn admits(self, n: u64) -> bool {
        n % 2 == 1
            && match self {
                MemberFilter::Semiprime => is_semiprime(n),
                MemberFilter::OddComposite => !is_prime(n),
            }
    }
}

/// Encodes every odd semiprime in `range` whose canonical split needs
/// exactly `qubits` variables.
pub fn build_size_class(range: RangeInclusive<u64>, qubits: usize, width: usize) -> Result<SizeClass> {
    build_size_class_with(range, qubits, width, MemberFilter::Semiprime)
}

pub fn build_size_class_with(
    range: RangeInclusive<u64>,
    qubits: usize,
    width: usize,
    filter: MemberFilter,
) -> Result<SizeClass> {
    let candidates: Vec<(u64, BitSplit)> = range
        .filter(|&n| filter.admits(n))
        .filter_map(|n| canonical_split(n, width).map(|l| (n, l)))
        .filter(|(_, l)| l.total_qubits == qubits)
        .map(|(n, l)| (n, l.split))
        .collect();
    let instances = candidates
        .into_par_iter()
        .map(|(n, s)| encode_instance(n, s, width))
        .collect::<Result<Vec<_>>>()?;
    Ok(SizeClass::from_instances(qubits, width, instances))
}
