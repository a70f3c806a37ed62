//! Closed-system adiabatic evolution on the full state vector.

mod calibrate;
mod evolve;
mod state;

pub use calibrate::*;
pub use evolve::{
    evolve, evolve_fixed, evolve_from, evolve_with, Evolution, EvolutionProblem, EvolutionSpec, IntegratorConfig,
};
pub use state::{expectation_diagonal, initial_state, success_probability, StateVector};
