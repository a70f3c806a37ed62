use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::evolve::{evolve, evolve_fixed, EvolutionProblem, EvolutionSpec, IntegratorConfig};
use super::state::{expectation_diagonal, success_probability};
use crate::encoder::SizeClass;
use crate::error::{Error, Result};
use crate::schedule::Schedule;

pub const DEFAULT_THRESHOLD: f64 = 0.1;

/// `T_k = start * ratio^k` for `k < points`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometricGrid {
    pub start: f64,
    pub ratio: f64,
    pub points: usize,
}

impl Default for GeometricGrid {
    fn default() -> Self {
        // 10 .. ~1.2e6
        Self {
            start: 10.0,
            ratio: 1.2,
            points: 65,
        }
    }
}

impl GeometricGrid {
    pub fn value(&self, k: usize) -> f64 {
        self.start * self.ratio.powi(k as i32)
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(|k| self.value(k))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceSuccess {
    #[serde(rename = "N")]
    pub number: u64,
    pub success_probability: f64,
}

/// Per-instance outcome of one evolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub success_probability: f64,
    /// `<psi|H_P|psi>` in normalized units.
    pub energy: f64,
    pub slices: usize,
}

/// Runs one refined evolution per problem.
pub fn evaluate_problems(
    problems: &[EvolutionProblem],
    schedule: &Schedule,
    total_time: f64,
    cfg: &IntegratorConfig,
) -> Result<Vec<Outcome>> {
    problems
        .par_iter()
        .map(|problem| {
            let spec = EvolutionSpec {
                problem,
                schedule,
                total_time,
            };
            let ev = evolve(&spec, cfg)?;
            Ok(Outcome {
                success_probability: ev.success_probability,
                energy: expectation_diagonal(&ev.state, &problem.diagonal),
                slices: ev.slices,
            })
        })
        .collect()
}

/// One evolution per problem at a fixed slice count (no refinement).
pub fn evaluate_problems_fixed(
    problems: &[EvolutionProblem],
    schedule: &Schedule,
    total_time: f64,
    slices: usize,
) -> Vec<Outcome> {
    problems
        .par_iter()
        .map(|problem| {
            let state = evolve_fixed(problem, schedule, total_time, slices);
            Outcome {
                success_probability: success_probability(&state, &problem.ground_set),
                energy: expectation_diagonal(&state, &problem.diagonal),
                slices,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub n: usize,
    #[serde(rename = "T")]
    pub total_time: f64,
    #[serde(rename = "P_th")]
    pub threshold: f64,
    pub grid: GeometricGrid,
    pub mean_success: f64,
    /// Coarsest slice count that passed the refinement check at `T`.
    pub slices: usize,
    pub driver: String,
    pub per_instance: Vec<InstanceSuccess>,
}

/// Smallest grid `T` at which the class-mean success under the quadratic
/// schedule reaches `threshold`.
pub fn calibrate_t(
    class: &SizeClass,
    threshold: f64,
    grid: &GeometricGrid,
    cfg: &IntegratorConfig,
) -> Result<Calibration> {
    if class.is_empty() {
        return Err(Error::Empty("size class"));
    }
    let problems = EvolutionProblem::class_problems(class);
    let schedule = Schedule::quadratic();
    let mut best = (f64::NAN, f64::NEG_INFINITY);
    for t in grid.iter() {
        let outcomes = evaluate_problems(&problems, &schedule, t, cfg)?;
        let mean = outcomes.iter().map(|o| o.success_probability).sum::<f64>() / outcomes.len() as f64;
        if mean > best.1 {
            best = (t, mean);
        }
        if mean >= threshold {
            let slices = outcomes.iter().map(|o| o.slices / 2).max().unwrap_or(1);
            return Ok(Calibration {
                n: class.qubits,
                total_time: t,
                threshold,
                grid: *grid,
                mean_success: mean,
                slices,
                driver: DRIVER_DESCRIPTION.to_string(),
                per_instance: class
                    .instances
                    .iter()
                    .zip(&outcomes)
                    .map(|(i, o)| InstanceSuccess {
                        number: i.number,
                        success_probability: o.success_probability,
                    })
                    .collect(),
            });
        }
    }
    Err(Error::GridExhausted {
        best_t: best.0,
        best_mean: best.1,
    })
}

/// Recorded alongside calibrations since `T` depends on the driver choice.
pub const DRIVER_DESCRIPTION: &str = "H_B = -sum_i sigma_x_i; H(s) = [(1-l(s)) H_B + l(s) H_P] / norm";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitReport {
    pub easy: Vec<u64>,
    pub hard: Vec<u64>,
    pub per_instance_success: BTreeMap<u64, f64>,
    #[serde(rename = "P_th")]
    pub threshold: f64,
    #[serde(rename = "T")]
    pub total_time: f64,
}

/// Splits by per-instance success under the quadratic schedule at `T`:
/// `success < threshold` is hard.
pub fn classify_instances(
    class: &SizeClass,
    total_time: f64,
    threshold: f64,
    cfg: &IntegratorConfig,
) -> Result<SplitReport> {
    let problems = EvolutionProblem::class_problems(class);
    let outcomes = evaluate_problems(&problems, &Schedule::quadratic(), total_time, cfg)?;
    let per: BTreeMap<u64, f64> = class
        .instances
        .iter()
        .zip(&outcomes)
        .map(|(i, o)| (i.number, o.success_probability))
        .collect();
    Ok(split_by_threshold(per, threshold, total_time))
}

pub fn split_by_threshold(per: BTreeMap<u64, f64>, threshold: f64, total_time: f64) -> SplitReport {
    let (hard, easy): (Vec<_>, Vec<_>) = per.iter().partition(|(_, &p)| p < threshold);
    SplitReport {
        easy: easy.into_iter().map(|(n, _)| *n).collect(),
        hard: hard.into_iter().map(|(n, _)| *n).collect(),
        per_instance_success: per,
        threshold,
        total_time,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_values() {
        let g = GeometricGrid::default();
        assert_eq!(g.value(0), 10.0);
        assert!((g.value(1) - 12.0).abs() < 1e-12);
    }

    #[test]
    fn threshold_split_edges() {
        let per: BTreeMap<u64, f64> = [(15, 0.3), (21, 0.05)].into_iter().collect();
        let r = split_by_threshold(per.clone(), 0.0, 1.0);
        assert!(r.hard.is_empty());
        let r = split_by_threshold(per.clone(), 1.0, 1.0);
        assert_eq!(r.hard, vec![15, 21]);
        let r = split_by_threshold(per, 0.1, 1.0);
        assert_eq!((r.easy, r.hard), (vec![15], vec![21]));
    }
}
