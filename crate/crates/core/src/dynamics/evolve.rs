use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::state::{initial_state, success_probability, StateVector};
use crate::encoder::{Instance, SizeClass};
use crate::error::{Error, Result};
use crate::schedule::Schedule;

/// `H(s) = (1 - lambda(s)) * transverse * (-sum sigma_x) + lambda(s) * diag(diagonal)`.
///
/// For a normalized instance `diagonal = E / ||H_P||` and
/// `transverse = 1 / ||H_P||`, i.e. the whole interpolated Hamiltonian is
/// divided by the class constant.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionProblem {
    pub n: usize,
    pub diagonal: Vec<f64>,
    pub transverse: f64,
    pub ground_set: Vec<u64>,
}

impl EvolutionProblem {
    pub fn from_instance(instance: &Instance, norm: f64) -> Self {
        let diagonal = instance.ising.diagonal().into_iter().map(|e| e / norm).collect();
        Self {
            n: instance.qubits(),
            diagonal,
            transverse: 1.0 / norm,
            ground_set: instance.ground.ground_set.clone(),
        }
    }

    pub fn class_problems(class: &SizeClass) -> Vec<Self> {
        class
            .instances
            .iter()
            .map(|i| Self::from_instance(i, class.norm_constant))
            .collect()
    }

    /// The same problem with every energy divided by `zeta`.
    pub fn rescaled(&self, zeta: f64) -> Self {
        Self {
            n: self.n,
            diagonal: self.diagonal.iter().map(|e| e / zeta).collect(),
            transverse: self.transverse / zeta,
            ground_set: self.ground_set.clone(),
        }
    }
}

/// Slice-count refinement for [`evolve`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub min_slices: usize,
    pub slices_per_time: f64,
    pub tolerance: f64,
    pub max_doublings: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            min_slices: 1000,
            slices_per_time: 10.0,
            tolerance: 1e-6,
            max_doublings: 8,
        }
    }
}

impl IntegratorConfig {
    pub fn initial_slices(&self, total_time: f64) -> usize {
        self.min_slices.max((self.slices_per_time * total_time).ceil() as usize)
    }
}

pub struct EvolutionSpec<'a> {
    pub problem: &'a EvolutionProblem,
    pub schedule: &'a Schedule,
    pub total_time: f64,
}

#[derive(Debug, Clone)]
pub struct Evolution {
    pub state: StateVector,
    pub slices: usize,
    pub success_probability: f64,
}

/// `exp(i theta sigma_x)` on every qubit.
fn rotate_x(amps: &mut [Complex64], n: usize, theta: f64) {
    let (s, c) = theta.sin_cos();
    for q in 0..n {
        let stride = 1usize << q;
        for block in amps.chunks_exact_mut(stride << 1) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = Complex64::new(c * x.re - s * y.im, c * x.im + s * y.re);
                *b = Complex64::new(c * y.re - s * x.im, c * y.im + s * x.re);
            }
        }
    }
}

/// `exp(-i phi diag)`.
fn phase_diagonal(amps: &mut [Complex64], diagonal: &[f64], phi: f64) {
    for (a, e) in amps.iter_mut().zip(diagonal) {
        let (s, c) = (phi * e).sin_cos();
        *a = Complex64::new(a.re * c + a.im * s, a.im * c - a.re * s);
    }
}

/// Second-order symmetric split-step with `slices` equal slices and the
/// schedule sampled at slice midpoints. Adjacent half-step phases are fused.
pub fn evolve_with<F: Fn(f64) -> f64>(
    problem: &EvolutionProblem,
    schedule: F,
    total_time: f64,
    slices: usize,
) -> StateVector {
    assert!(total_time > 0.0 && slices >= 1);
    let mut state = initial_state(problem.n);
    let dt = total_time / slices as f64;
    let amps = &mut state.amplitudes;
    let lambda = |k: usize| schedule((k as f64 + 0.5) / slices as f64);

    let mut current = lambda(0);
    phase_diagonal(amps, &problem.diagonal, 0.5 * dt * current);
    for k in 0..slices {
        rotate_x(amps, problem.n, dt * (1.0 - current) * problem.transverse);
        if k + 1 < slices {
            let next = lambda(k + 1);
            phase_diagonal(amps, &problem.diagonal, 0.5 * dt * (current + next));
            current = next;
        } else {
            phase_diagonal(amps, &problem.diagonal, 0.5 * dt * current);
        }
    }
    state
}

pub fn evolve_fixed(problem: &EvolutionProblem, schedule: &Schedule, total_time: f64, slices: usize) -> StateVector {
    evolve_with(problem, |s| schedule.value(s), total_time, slices)
}

/// Evolves with slice doubling until the success probability moves by less
/// than the tolerance between refinements.
pub fn evolve(spec: &EvolutionSpec, cfg: &IntegratorConfig) -> Result<Evolution> {
    evolve_from(spec, cfg, cfg.initial_slices(spec.total_time))
}

/// As [`evolve`], starting the doubling at `slices`.
pub fn evolve_from(spec: &EvolutionSpec, cfg: &IntegratorConfig, slices: usize) -> Result<Evolution> {
    let ground = &spec.problem.ground_set;
    let mut slices = slices.max(1);
    let mut state = evolve_fixed(spec.problem, spec.schedule, spec.total_time, slices);
    let mut prob = success_probability(&state, ground);
    let mut delta = f64::INFINITY;
    for _ in 0..cfg.max_doublings {
        let finer_slices = slices * 2;
        let finer = evolve_fixed(spec.problem, spec.schedule, spec.total_time, finer_slices);
        let finer_prob = success_probability(&finer, ground);
        delta = (finer_prob - prob).abs();
        state = finer;
        prob = finer_prob;
        slices = finer_slices;
        if delta < cfg.tolerance {
            return Ok(Evolution {
                state,
                slices,
                success_probability: prob,
            });
        }
    }
    Err(Error::NonConvergence { delta, slices })
}
