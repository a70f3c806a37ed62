use std::collections::BTreeMap;

use crate::dynamics::{evaluate_problems, EvolutionProblem, IntegratorConfig, Outcome};
use crate::error::{Error, Result};
use crate::schedule::{Schedule, DEFAULT_MONOTONE_GRID};

/// Per-instance success probabilities of `schedule` at `total_time`, one
/// refined evolution per instance.
pub fn evaluate_schedule(
    schedule: &Schedule,
    numbers: &[u64],
    problems: &[EvolutionProblem],
    total_time: f64,
    cfg: &IntegratorConfig,
) -> Result<BTreeMap<u64, Outcome>> {
    if numbers.len() != problems.len() {
        return Err(Error::ShapeMismatch(format!("{} numbers for {} problems", numbers.len(), problems.len())));
    }
    if !schedule.is_monotone(DEFAULT_MONOTONE_GRID) {
        return Err(Error::NonMonotone);
    }
    let outcomes = evaluate_problems(problems, schedule, total_time, cfg)?;
    Ok(numbers.iter().copied().zip(outcomes).collect())
}

/// Histogram counts of `values` over `bins` equal-width bins on `[0, 1]`.
pub fn success_histogram(values: &[f64], bins: usize) -> Vec<usize> {
    let mut counts = vec![0; bins];
    for &v in values {
        let k = ((v.clamp(0.0, 1.0) * bins as f64) as usize).min(bins - 1);
        counts[k] += 1;
    }
    counts
}
