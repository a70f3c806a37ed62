use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Multilinear polynomial over binary variables with integer coefficients.
///
/// Keys are strictly increasing variable-index lists; the empty monomial is
/// held separately in `constant`. Multiplication applies `x * x = x`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct QuboPolynomial {
    pub num_vars: usize,
    pub constant: i64,
    pub terms: BTreeMap<Vec<usize>, i64>,
}

impl QuboPolynomial {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            constant: 0,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(num_vars: usize, value: i64) -> Self {
        let mut p = Self::new(num_vars);
        p.constant = value;
        p
    }

    /// Single-variable polynomial `coeff * x_index`.
    pub fn variable(num_vars: usize, index: usize, coeff: i64) -> Self {
        let mut p = Self::new(num_vars);
        p.add_term(&[index], coeff);
        p
    }

    /// Adds `coeff` times the product of `vars` (any order, duplicates collapse).
    pub fn add_term(&mut self, vars: &[usize], coeff: i64) {
        if coeff == 0 {
            return;
        }
        let mut key = vars.to_vec();
        key.sort_unstable();
        key.dedup();
        if let Some(&max) = key.last() {
            assert!(max < self.num_vars, "variable {max} out of range");
        }
        if key.is_empty() {
            self.constant += coeff;
            return;
        }
        match self.terms.get_mut(&key) {
            Some(c) => {
                *c += coeff;
                if *c == 0 {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, coeff);
            }
        }
    }

    /// Highest monomial order present (0 for a constant polynomial).
    pub fn order(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_quadratic(&self) -> bool {
        self.order() <= 2
    }

    pub fn coefficient(&self, vars: &[usize]) -> i64 {
        let mut key = vars.to_vec();
        key.sort_unstable();
        key.dedup();
        if key.is_empty() {
            self.constant
        } else {
            self.terms.get(&key).copied().unwrap_or(0)
        }
    }

    /// Largest absolute coefficient among monomials of order >= 1.
    pub fn max_abs_coefficient(&self) -> i64 {
        self.terms.values().map(|c| c.abs()).max().unwrap_or(0)
    }

    /// Value at the assignment whose bit `i` is `x_i`.
    pub fn evaluate(&self, bits: u64) -> i64 {
        let mut total = self.constant;
        for (vars, &c) in &self.terms {
            if vars.iter().all(|&v| bits >> v & 1 == 1) {
                total += c;
            }
        }
        total
    }

    pub fn with_num_vars(mut self, num_vars: usize) -> Self {
        assert!(num_vars >= self.num_vars);
        self.num_vars = num_vars;
        self
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone().with_num_vars(self.num_vars.max(other.num_vars));
        out.constant += other.constant;
        for (vars, &c) in &other.terms {
            out.add_term(vars, c);
        }
        out
    }

    pub fn scale(&self, factor: i64) -> Self {
        let mut out = Self::constant(self.num_vars, self.constant * factor);
        for (vars, &c) in &self.terms {
            out.add_term(vars, c * factor);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::new(self.num_vars.max(other.num_vars));
        let lhs: Vec<(&[usize], i64)> = std::iter::once((&[][..], self.constant))
            .chain(self.terms.iter().map(|(k, &c)| (k.as_slice(), c)))
            .collect();
        let rhs: Vec<(&[usize], i64)> = std::iter::once((&[][..], other.constant))
            .chain(other.terms.iter().map(|(k, &c)| (k.as_slice(), c)))
            .collect();
        let mut merged = Vec::with_capacity(8);
        for &(a, ca) in &lhs {
            if ca == 0 {
                continue;
            }
            for &(b, cb) in &rhs {
                if cb == 0 {
                    continue;
                }
                merged.clear();
                merged.extend_from_slice(a);
                merged.extend_from_slice(b);
                out.add_term(&merged, ca * cb);
            }
        }
        out
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn idempotent_square_of_single_variable() {
        let x = QuboPolynomial::variable(1, 0, 3);
        let sq = x.square();
        assert_eq!(sq.coefficient(&[0]), 9);
        assert_eq!(sq.order(), 1);
    }

    #[test]
    fn cancelling_terms_are_removed() {
        let mut p = QuboPolynomial::new(3);
        p.add_term(&[2, 0], 4);
        p.add_term(&[0, 2], -4);
        assert!(p.terms.is_empty());
    }

    #[test]
    fn evaluate_matches_square_pointwise() {
        let mut p = QuboPolynomial::constant(3, -2);
        p.add_term(&[0], 1);
        p.add_term(&[1, 2], 3);
        let sq = p.square();
        for bits in 0..8u64 {
            let v = p.evaluate(bits);
            assert_eq!(sq.evaluate(bits), v * v);
        }
    }
}
