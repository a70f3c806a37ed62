//! Dense fourth-order Magnus propagator used as a reference for the
//! split-step integrator.

use hardfactor::dynamics::{initial_state, EvolutionProblem, StateVector};
use hardfactor::schedule::Schedule;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

type C = Complex64;

pub fn problem() -> EvolutionProblem {
    let diagonal = vec![0.8, 0.3, 1.1, 0.0, 0.45, 0.9, 0.2, 0.65];
    EvolutionProblem {
        n: 3,
        diagonal,
        transverse: 0.7,
        ground_set: vec![3],
    }
}

pub fn hamiltonian(p: &EvolutionProblem, lambda: f64) -> DMatrix<C> {
    let dim = 1 << p.n;
    let mut h = DMatrix::from_element(dim, dim, C::new(0.0, 0.0));
    for i in 0..dim {
        h[(i, i)] = C::new(lambda * p.diagonal[i], 0.0);
        for q in 0..p.n {
            h[(i, i ^ (1 << q))] += C::new(-(1.0 - lambda) * p.transverse, 0.0);
        }
    }
    h
}

/// `exp(-i K)` for Hermitian `K`.
pub fn unitary(k: &DMatrix<C>) -> DMatrix<C> {
    let eig = k.clone().symmetric_eigen();
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|e| C::new(0.0, -e).exp()));
    &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
}

pub fn magnus_reference(p: &EvolutionProblem, schedule: &Schedule, total: f64, steps: usize) -> StateVector {
    let dim = 1 << p.n;
    let init = initial_state(p.n);
    let mut psi = DVector::from_iterator(dim, init.amplitudes.iter().copied());
    let dt = total / steps as f64;
    let offset = 3f64.sqrt() / 6.0;
    for k in 0..steps {
        let t0 = k as f64 * dt;
        let h1 = hamiltonian(p, schedule.value((t0 + (0.5 - offset) * dt) / total));
        let h2 = hamiltonian(p, schedule.value((t0 + (0.5 + offset) * dt) / total));
        // Omega = -i dt/2 (H1 + H2) - sqrt(3)/12 dt^2 [H2, H1]; exp(Omega) = exp(-i K)
        let comm = &h2 * &h1 - &h1 * &h2;
        let k_mat = (&h1 + &h2) * C::new(dt / 2.0, 0.0) + comm * C::new(0.0, -(3f64.sqrt()) / 12.0 * dt * dt);
        psi = unitary(&k_mat) * psi;
    }
    StateVector {
        n: p.n,
        amplitudes: psi.iter().copied().collect(),
    }
}

pub fn distance(a: &StateVector, b: &StateVector) -> f64 {
    (2.0 - 2.0 * a.fidelity(b)).max(0.0).sqrt()
}

pub fn schedule() -> Schedule {
    Schedule::fourier(vec![-0.2, 0.05, 0.0, 0.01, 0.0, 0.0])
}
