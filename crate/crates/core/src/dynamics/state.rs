use num_complex::Complex64;

/// `2^n` amplitudes; basis index bit `i` is qubit `i` in state `|x_i>`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub n: usize,
    pub amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn basis(n: usize, index: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self { n, amplitudes }
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `|<self|other>|`, insensitive to global phase.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        assert_eq!(self.n, other.n);
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm()
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.amplitudes[index].norm_sqr()
    }
}

/// Uniform superposition, the ground state of `-sum_i sigma_x_i`.
pub fn initial_state(n: usize) -> StateVector {
    assert!(n >= 1);
    let amp = (0.5f64).powf(n as f64 / 2.0);
    StateVector {
        n,
        amplitudes: vec![Complex64::new(amp, 0.0); 1 << n],
    }
}

/// Weight of the state on the ground-state manifold.
pub fn success_probability(state: &StateVector, ground_set: &[u64]) -> f64 {
    ground_set
        .iter()
        .map(|&g| state.probability(g as usize))
        .sum()
}

/// `<psi| diag |psi>` for a diagonal operator.
pub fn expectation_diagonal(state: &StateVector, diagonal: &[f64]) -> f64 {
    state
        .amplitudes
        .iter()
        .zip(diagonal)
        .map(|(a, e)| a.norm_sqr() * e)
        .sum()
}
