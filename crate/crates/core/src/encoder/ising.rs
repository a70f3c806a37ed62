use serde::{Deserialize, Serialize};

use super::poly::QuboPolynomial;
use super::registry::{Role, VariableRegistry};
use crate::error::{Error, Result};

pub const MAX_BRUTE_FORCE_QUBITS: usize = 24;

/// Diagonal Hamiltonian `offset + sum h_i s_i + sum_{i<j} J_ij s_i s_j`
/// with spins `s_i = 1 - 2 x_i` (`x_i = 0` is spin up).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsingHamiltonian {
    pub n: usize,
    pub fields: Vec<f64>,
    /// Upper-triangular couplings `(i, j, J_ij)` with `i < j`, sorted.
    pub couplings: Vec<(usize, usize, f64)>,
    pub offset: f64,
}

impl IsingHamiltonian {
    pub fn energy(&self, bits: u64) -> f64 {
        let spin = |i: usize| if bits >> i & 1 == 1 { -1.0 } else { 1.0 };
        let mut e = self.offset;
        for (i, h) in self.fields.iter().enumerate() {
            e += h * spin(i);
        }
        for &(i, j, c) in &self.couplings {
            e += c * spin(i) * spin(j);
        }
        e
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            n: self.n,
            fields: self.fields.iter().map(|h| h * factor).collect(),
            couplings: self
                .couplings
                .iter()
                .map(|&(i, j, c)| (i, j, c * factor))
                .collect(),
            offset: self.offset * factor,
        }
    }

    /// Neighbour lists `(j, J_ij)` for every site.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(i, j, c) in &self.couplings {
            adj[i].push((j, c));
            adj[j].push((i, c));
        }
        adj
    }

    /// Energies of all `2^n` basis states, index bit `i` holding `x_i`.
    ///
    /// Built incrementally from the state with the top set bit cleared, so
    /// the cost is `O(2^n * degree)`. All values stay dyadic rationals and
    /// the recursion is exact for integer-derived Hamiltonians.
    pub fn diagonal(&self) -> Vec<f64> {
        let size = 1usize << self.n;
        let adj = self.adjacency();
        let mut diag = vec![0.0; size];
        diag[0] = self.offset + self.fields.iter().sum::<f64>()
            + self.couplings.iter().map(|c| c.2).sum::<f64>();
        for x in 1..size {
            let top = usize::BITS as usize - 1 - x.leading_zeros() as usize;
            let prev = x ^ (1 << top);
            // flipping s_top from +1 to -1
            let mut local = self.fields[top];
            for &(j, c) in &adj[top] {
                let s = if prev >> j & 1 == 1 { -1.0 } else { 1.0 };
                local += c * s;
            }
            diag[x] = diag[prev] - 2.0 * local;
        }
        diag
    }
}

/// Substitutes `x_i = (1 - s_i) / 2` into a quadratic polynomial.
pub fn to_ising(poly: &QuboPolynomial) -> Result<IsingHamiltonian> {
    let order = poly.order();
    if order > 2 {
        return Err(Error::NotQuadratic(order));
    }
    let n = poly.num_vars;
    let mut fields = vec![0.0; n];
    let mut offset = poly.constant as f64;
    let mut couplings = Vec::new();
    for (vars, &c) in &poly.terms {
        let c = c as f64;
        match vars.as_slice() {
            [i] => {
                offset += c / 2.0;
                fields[*i] -= c / 2.0;
            }
            [i, j] => {
                offset += c / 4.0;
                fields[*i] -= c / 4.0;
                fields[*j] -= c / 4.0;
                couplings.push((*i, *j, c / 4.0));
            }
            _ => unreachable!("order checked above"),
        }
    }
    Ok(IsingHamiltonian {
        n,
        fields,
        couplings,
        offset,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundState {
    pub min_energy: f64,
    /// Every basis index attaining `min_energy`, ascending.
    pub ground_set: Vec<u64>,
}

pub fn ground_from_diagonal(diag: &[f64]) -> GroundState {
    let min_energy = diag.iter().copied().fold(f64::INFINITY, f64::min);
    let ground_set = diag
        .iter()
        .enumerate()
        .filter(|(_, &e)| e == min_energy)
        .map(|(i, _)| i as u64)
        .collect();
    GroundState {
        min_energy,
        ground_set,
    }
}

/// Exhaustive ground-state search (exact for integer-derived Hamiltonians).
pub fn brute_force_ground(h: &IsingHamiltonian) -> Result<GroundState> {
    if h.n > MAX_BRUTE_FORCE_QUBITS {
        return Err(Error::TooManyQubits(h.n));
    }
    Ok(ground_from_diagonal(&h.diagonal()))
}

/// Reassembles `(p, q)` from a bitstring; carries and auxiliaries are ignored.
pub fn decode_solution(bits: u64, registry: &VariableRegistry) -> Result<(u64, u64)> {
    let split = registry.split.ok_or(Error::Empty("factor split"))?;
    let mut p = 1 | 1 << split.lp;
    let mut q = 1 | 1 << split.lq;
    for (var, role) in registry.roles.iter().enumerate() {
        let bit = bits >> var & 1;
        match role {
            Role::PBit { index } => p |= bit << index,
            Role::QBit { index } => q |= bit << index,
            _ => {}
        }
    }
    Ok((p, q))
}
