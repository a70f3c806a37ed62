//! Convergence summaries of a measured reward trace.

use super::train::TraceRow;

/// Trailing moving average over `window` measurements.
pub fn moving_average(values: &[f64], window: usize) -> Vec<f64> {
    let w = window.max(1);
    let mut out = Vec::with_capacity(values.len());
    let mut sum = 0.0;
    for (i, v) in values.iter().enumerate() {
        sum += v;
        if i >= w {
            sum -= values[i - w];
        }
        out.push(sum / (i + 1).min(w) as f64);
    }
    out
}

/// Mean reward over the final `fraction` of measurements.
pub fn plateau(trace: &[TraceRow], fraction: f64) -> Option<f64> {
    if trace.is_empty() {
        return None;
    }
    let k = ((trace.len() as f64 * fraction).ceil() as usize).clamp(1, trace.len());
    let tail = &trace[trace.len() - k..];
    Some(tail.iter().map(|r| r.reward).sum::<f64>() / k as f64)
}

/// First measurement count at which the smoothed reward is within
/// `rel_tol * |level|` of `level` or above it.
pub fn steps_to_reach(trace: &[TraceRow], level: f64, rel_tol: f64, window: usize) -> Option<usize> {
    let rewards: Vec<f64> = trace.iter().map(|r| r.reward).collect();
    let smooth = moving_average(&rewards, window);
    let bar = level - rel_tol * level.abs();
    smooth.iter().position(|&v| v >= bar).map(|i| i + 1)
}
