//! Classical hardness from exponential-schedule simulated annealing.
//!
//! A run starts from uniformly random spins, applies `10 j0` single-site
//! Metropolis updates at random sites with `beta(j) = beta0 exp(j / j0)`,
//! and succeeds if it ends in a ground state. `j0*` is the first point of
//! the doubling grid `1, 2, 4, ...` at which a run succeeds.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::encoder::IsingHamiltonian;
use crate::rng::{derive_seed, substream};

pub const DEFAULT_BETA0: f64 = 0.1;
pub const DEFAULT_RUNS: usize = 500;
pub const J0_CAP: u64 = 1 << 20;
const SUCCESS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealConfig {
    pub beta0: f64,
    pub j0: u64,
    pub seed: u64,
}

impl AnnealConfig {
    pub fn total_steps(&self) -> u64 {
        10 * self.j0
    }

    pub fn beta(&self, step: u64) -> f64 {
        self.beta0 * (step as f64 / self.j0 as f64).exp()
    }
}

/// Metropolis acceptance `min(1, exp(-beta dE))`.
#[inline]
pub fn acceptance_probability(beta: f64, delta_e: f64) -> f64 {
    if delta_e <= 0.0 {
        1.0
    } else {
        (-beta * delta_e).exp()
    }
}

/// Sparse form of a Hamiltonian for single-spin updates.
#[derive(Debug, Clone)]
pub struct SpinModel {
    fields: Vec<f64>,
    adjacency: Vec<Vec<(usize, f64)>>,
    hamiltonian: IsingHamiltonian,
    ground_energy: f64,
}

impl SpinModel {
    pub fn new(hamiltonian: IsingHamiltonian, ground_energy: f64) -> Self {
        Self {
            fields: hamiltonian.fields.clone(),
            adjacency: hamiltonian.adjacency(),
            hamiltonian,
            ground_energy,
        }
    }

    pub fn n(&self) -> usize {
        self.fields.len()
    }

    pub fn ground_energy(&self) -> f64 {
        self.ground_energy
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealOutcome {
    pub final_energy: f64,
    pub final_bits: u64,
    pub success: bool,
}

/// One annealing run; bit-reproducible for a given `cfg.seed`.
pub fn sa_run(model: &SpinModel, cfg: &AnnealConfig) -> AnnealOutcome {
    let mut rng = substream(cfg.seed, "sa-run", &[]);
    let n = model.n();
    // spin +1 <-> x = 0
    let mut spins: Vec<f64> = (0..n)
        .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
        .collect();
    let mut local: Vec<f64> = (0..n)
        .map(|i| {
            model.fields[i]
                + model.adjacency[i]
                    .iter()
                    .map(|&(j, c)| c * spins[j])
                    .sum::<f64>()
        })
        .collect();

    let steps = cfg.total_steps();
    for step in 0..steps {
        let i = rng.random_range(0..n);
        let delta = -2.0 * spins[i] * local[i];
        let accept = delta <= 0.0 || rng.random::<f64>() < acceptance_probability(cfg.beta(step), delta);
        if accept {
            let old = spins[i];
            spins[i] = -old;
            for &(j, c) in &model.adjacency[i] {
                local[j] -= 2.0 * c * old;
            }
        }
    }

    let bits = spins
        .iter()
        .enumerate()
        .filter(|(_, &s)| s < 0.0)
        .fold(0u64, |acc, (i, _)| acc | 1 << i);
    let final_energy = model.hamiltonian.energy(bits);
    AnnealOutcome {
        final_energy,
        final_bits: bits,
        success: (final_energy - model.ground_energy).abs() <= SUCCESS_TOLERANCE,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct J0Sample {
    pub run: usize,
    pub j0_star: u64,
    pub censored: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardnessReport {
    #[serde(rename = "N")]
    pub number: u64,
    pub n: usize,
    pub beta0: f64,
    pub samples: Vec<J0Sample>,
    pub mean: f64,
    pub median: f64,
    pub max: u64,
    pub std_error: f64,
    pub censored: usize,
}

impl HardnessReport {
    fn from_samples(number: u64, n: usize, beta0: f64, samples: Vec<J0Sample>) -> Self {
        let mut values: Vec<u64> = samples.iter().map(|s| s.j0_star).collect();
        values.sort_unstable();
        let count = values.len() as f64;
        let mean = values.iter().map(|&v| v as f64).sum::<f64>() / count;
        let median = if values.len() % 2 == 1 {
            values[values.len() / 2] as f64
        } else {
            let h = values.len() / 2;
            (values[h - 1] + values[h]) as f64 / 2.0
        };
        let std_error = if values.len() > 1 {
            let var = values.iter().map(|&v| (v as f64 - mean).powi(2)).sum::<f64>() / (count - 1.0);
            (var / count).sqrt()
        } else {
            0.0
        };
        Self {
            number,
            n,
            beta0,
            censored: samples.iter().filter(|s| s.censored).count(),
            max: *values.last().unwrap_or(&0),
            samples,
            mean,
            median,
            std_error,
        }
    }
}

/// `j0*` for one run: doubling sweep with a fresh seed per attempt.
pub fn j0_star_for_run(model: &SpinModel, beta0: f64, run_seed: u64) -> J0Sample {
    let mut j0 = 1u64;
    let mut attempt = 0u64;
    loop {
        let cfg = AnnealConfig {
            beta0,
            j0,
            seed: derive_seed(run_seed, "attempt", &[attempt]),
        };
        if sa_run(model, &cfg).success {
            return J0Sample {
                run: 0,
                j0_star: j0,
                censored: false,
            };
        }
        if j0 >= J0_CAP {
            return J0Sample {
                run: 0,
                j0_star: J0_CAP,
                censored: true,
            };
        }
        j0 *= 2;
        attempt += 1;
    }
}

pub fn estimate_j0_star(
    number: u64,
    model: &SpinModel,
    runs: usize,
    beta0: f64,
    master_seed: u64,
) -> HardnessReport {
    let mut samples: Vec<J0Sample> = (0..runs)
        .into_par_iter()
        .map(|run| {
            let seed = derive_seed(master_seed, "sa", &[number, run as u64]);
            J0Sample {
                run,
                ..j0_star_for_run(model, beta0, seed)
            }
        })
        .collect();
    samples.sort_by_key(|s| s.run);
    HardnessReport::from_samples(number, model.n(), beta0, samples)
}

/// Instance numbers ordered hardest first (mean `j0*` descending, ties by `N`).
pub fn rank_hardness(reports: &[HardnessReport]) -> Vec<u64> {
    let mut order: Vec<&HardnessReport> = reports.iter().collect();
    order.sort_by(|a, b| b.mean.total_cmp(&a.mean).then(a.number.cmp(&b.number)));
    order.into_iter().map(|r| r.number).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::{brute_force_ground, to_ising, QuboPolynomial};

    fn model_from(poly: &QuboPolynomial) -> SpinModel {
        let h = to_ising(poly).unwrap();
        let g = brute_force_ground(&h).unwrap();
        SpinModel::new(h, g.min_energy)
    }

    #[test]
    fn downhill_always_accepted() {
        assert_eq!(acceptance_probability(5.0, -1.0), 1.0);
        assert_eq!(acceptance_probability(5.0, 0.0), 1.0);
        assert!((acceptance_probability(2.0, 0.5) - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn single_variable_instance_has_unit_j0_star() {
        let m = model_from(&QuboPolynomial::variable(1, 0, 1));
        let r = estimate_j0_star(1, &m, 50, DEFAULT_BETA0, 3);
        assert!(r.samples.iter().all(|s| s.j0_star == 1 && !s.censored));
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let mut p = QuboPolynomial::constant(3, 1);
        p.add_term(&[0, 1], -2);
        p.add_term(&[1, 2], 3);
        p.add_term(&[0], 1);
        let m = model_from(&p);
        let cfg = AnnealConfig {
            beta0: 0.1,
            j0: 17,
            seed: 99,
        };
        assert_eq!(sa_run(&m, &cfg), sa_run(&m, &cfg));
    }

    #[test]
    fn ranking_breaks_ties_by_number() {
        let rep = |number, mean| HardnessReport {
            number,
            n: 3,
            beta0: 0.1,
            samples: vec![],
            mean,
            median: mean,
            max: 0,
            std_error: 0.0,
            censored: 0,
        };
        let reports = vec![rep(91, 2.0), rep(77, 2.0), rep(65, 5.0), rep(55, 1.0)];
        assert_eq!(rank_hardness(&reports), vec![65, 77, 91, 55]);
    }
}
