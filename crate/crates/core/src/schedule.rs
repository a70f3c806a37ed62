//! Hamiltonian schedules `lambda(s)`, `s = tau / T`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_COEFFICIENTS: usize = 6;
pub const DEFAULT_MONOTONE_GRID: usize = 1024;
pub const COEFFICIENT_BOUND: f64 = 1.0;
const MONOTONE_TOLERANCE: f64 = -1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleForm {
    /// `s + sum_m b_m sin(m pi s)`
    Fourier,
    Linear,
    /// `s^2`
    Quadratic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "ScheduleJson", try_from = "ScheduleJson")]
pub struct Schedule {
    form: ScheduleForm,
    b: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ScheduleJson {
    form: ScheduleForm,
    #[serde(rename = "C")]
    c: usize,
    b: Vec<f64>,
}

impl From<Schedule> for ScheduleJson {
    fn from(s: Schedule) -> Self {
        Self {
            form: s.form,
            c: s.b.len(),
            b: s.b,
        }
    }
}

impl TryFrom<ScheduleJson> for Schedule {
    type Error = String;

    fn try_from(j: ScheduleJson) -> std::result::Result<Self, String> {
        if j.form == ScheduleForm::Fourier && j.c != j.b.len() {
            return Err(format!("C = {} but {} coefficients", j.c, j.b.len()));
        }
        Ok(Self { form: j.form, b: j.b })
    }
}

impl Schedule {
    pub fn fourier(b: Vec<f64>) -> Self {
        Self {
            form: ScheduleForm::Fourier,
            b,
        }
    }

    pub fn zeros(c: usize) -> Self {
        Self::fourier(vec![0.0; c])
    }

    pub fn linear() -> Self {
        Self {
            form: ScheduleForm::Linear,
            b: Vec::new(),
        }
    }

    pub fn quadratic() -> Self {
        Self {
            form: ScheduleForm::Quadratic,
            b: Vec::new(),
        }
    }

    pub fn form(&self) -> ScheduleForm {
        self.form
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.b
    }

    pub fn name(&self) -> &'static str {
        match self.form {
            ScheduleForm::Fourier => "fourier",
            ScheduleForm::Linear => "linear",
            ScheduleForm::Quadratic => "quadratic",
        }
    }

    /// `lambda(s)` without the domain check.
    #[inline]
    pub fn value(&self, s: f64) -> f64 {
        match self.form {
            ScheduleForm::Linear => s,
            ScheduleForm::Quadratic => s * s,
            ScheduleForm::Fourier => {
                // exact at the end points regardless of rounding in sin(m pi)
                if s == 0.0 || s == 1.0 {
                    return s;
                }
                s + self
                    .b
                    .iter()
                    .enumerate()
                    .map(|(k, bm)| bm * ((k + 1) as f64 * PI * s).sin())
                    .sum::<f64>()
            }
        }
    }

    pub fn evaluate(&self, s: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::OutOfDomain {
                value: s,
                lo: 0.0,
                hi: 1.0,
            });
        }
        Ok(self.value(s))
    }

    /// Non-decreasing on the grid `k / grid_size`, up to `-1e-12` per step.
    pub fn is_monotone(&self, grid_size: usize) -> bool {
        assert!(grid_size >= 2, "grid needs at least two intervals");
        let mut prev = self.value(0.0);
        for k in 1..=grid_size {
            let v = self.value(k as f64 / grid_size as f64);
            if v - prev < MONOTONE_TOLERANCE {
                return false;
            }
            prev = v;
        }
        true
    }
}

/// Fourier basis `sin(m pi k / grid)` tabulated once, for repeated
/// monotonicity checks of coefficient vectors of a fixed length.
/// Agrees exactly with [`Schedule::is_monotone`].
#[derive(Debug, Clone)]
pub struct MonotoneGrid {
    grid: usize,
    coefficients: usize,
    basis: Vec<f64>,
}

impl MonotoneGrid {
    pub fn new(grid: usize, coefficients: usize) -> Self {
        assert!(grid >= 2, "grid needs at least two intervals");
        let mut basis = Vec::with_capacity((grid + 1) * coefficients);
        for k in 0..=grid {
            let s = k as f64 / grid as f64;
            for m in 0..coefficients {
                basis.push(((m + 1) as f64 * PI * s).sin());
            }
        }
        Self {
            grid,
            coefficients,
            basis,
        }
    }

    pub fn is_monotone(&self, b: &[f64]) -> bool {
        assert_eq!(b.len(), self.coefficients);
        let value = |k: usize| {
            if k == 0 || k == self.grid {
                return (k / self.grid) as f64;
            }
            let s = k as f64 / self.grid as f64;
            let row = &self.basis[k * self.coefficients..(k + 1) * self.coefficients];
            s + b.iter().zip(row).map(|(bm, sm)| bm * sm).sum::<f64>()
        };
        let mut prev = value(0);
        for k in 1..=self.grid {
            let v = value(k);
            if v - prev < MONOTONE_TOLERANCE {
                return false;
            }
            prev = v;
        }
        true
    }
}

pub fn clamp_coefficients(b: &[f64]) -> Vec<f64> {
    b.iter()
        .map(|v| v.clamp(-COEFFICIENT_BOUND, COEFFICIENT_BOUND))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_coefficients_are_linear() {
        assert_eq!(Schedule::zeros(6).evaluate(0.5).unwrap(), 0.5);
    }

    #[test]
    fn first_harmonic_at_midpoint() {
        let s = Schedule::fourier(vec![0.1, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!((s.evaluate(0.5).unwrap() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn domain_guard() {
        assert!(Schedule::linear().evaluate(1.5).is_err());
        assert!(Schedule::linear().evaluate(-0.1).is_err());
    }

    #[test]
    fn closed_forms() {
        assert_eq!(Schedule::quadratic().evaluate(0.5).unwrap(), 0.25);
        assert_eq!(Schedule::linear().evaluate(0.3).unwrap(), 0.3);
    }

    #[test]
    fn monotone_examples() {
        assert!(Schedule::zeros(6).is_monotone(DEFAULT_MONOTONE_GRID));
        assert!(!Schedule::fourier(vec![-0.5, 0.0, 0.0, 0.0, 0.0, 0.0]).is_monotone(DEFAULT_MONOTONE_GRID));
        assert!(Schedule::quadratic().is_monotone(DEFAULT_MONOTONE_GRID));
    }

    #[test]
    fn clamp_examples() {
        assert_eq!(clamp_coefficients(&[1.2, 0.0]), vec![1.0, 0.0]);
        assert_eq!(clamp_coefficients(&[0.3, -0.2]), vec![0.3, -0.2]);
        assert_eq!(
            clamp_coefficients(&[-3.0, 3.0, 0.0, 0.0, 0.0, 0.0]),
            vec![-1.0, 1.0, 0.0, 0.0, 0.0, 0.0]
        );
    }

    #[test]
    fn json_shape() {
        let s = Schedule::fourier(vec![0.25, -0.5]);
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"{"form":"fourier","C":2,"b":[0.25,-0.5]}"#);
        let back: Schedule = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<Schedule>(r#"{"form":"fourier","C":3,"b":[0.1]}"#).is_err());
    }

    #[test]
    fn tabulated_check_agrees() {
        let grid = MonotoneGrid::new(DEFAULT_MONOTONE_GRID, 6);
        for k in 0..400 {
            let x = k as f64 / 400.0;
            let b = vec![-0.5 + x, 0.3 * (7.0 * x).sin(), -0.1, 0.05 * x, 0.0, 0.02];
            assert_eq!(grid.is_monotone(&b), Schedule::fourier(b.clone()).is_monotone(DEFAULT_MONOTONE_GRID));
        }
    }
}
