use std::collections::BTreeMap;

use super::poly::QuboPolynomial;
use super::registry::{Role, VariableRegistry};
use crate::error::{Error, Result};

/// Substitution penalty `x1 x2 - 2 x1 y - 2 x2 y + 3 y`: zero iff `y = x1 x2`,
/// at least one otherwise.
pub fn substitution_penalty(num_vars: usize, x1: usize, x2: usize, y: usize) -> QuboPolynomial {
    let mut p = QuboPolynomial::new(num_vars);
    p.add_term(&[x1, x2], 1);
    p.add_term(&[x1, y], -2);
    p.add_term(&[x2, y], -2);
    p.add_term(&[y], 3);
    p
}

/// Quadratic gadget for `sign * x1 x2 x3` with auxiliary `x4`:
/// `sign * x4 x3 + 2 (x1 x2 - 2 x1 x4 - 2 x2 x4 + 3 x4)`.
pub fn cubic_gadget(sign: i64, x: [usize; 4]) -> QuboPolynomial {
    let nv = x.iter().max().unwrap() + 1;
    let mut g = substitution_penalty(nv, x[0], x[1], x[3]).scale(2);
    g.add_term(&[x[3], x[2]], sign);
    g
}

struct AuxTable {
    index: BTreeMap<(usize, usize), usize>,
    weight: BTreeMap<usize, i64>,
}

impl AuxTable {
    fn get_or_insert(&mut self, reg: &mut VariableRegistry, a: usize, b: usize) -> usize {
        let key = (a.min(b), a.max(b));
        *self.index.entry(key).or_insert_with(|| {
            reg.push(Role::Auxiliary {
                left: key.0,
                right: key.1,
            })
        })
    }
}

/// Picks the pair to substitute first: the lowest `p` bit with the lowest
/// `q` bit when both are present, else the two lowest variables.
fn pick_pair(vars: &[usize], reg: &VariableRegistry) -> (usize, usize) {
    let p = vars.iter().copied().find(|&v| reg.is_p(v));
    let q = vars.iter().copied().find(|&v| reg.is_q(v));
    match (p, q) {
        (Some(p), Some(q)) => (p, q),
        _ => (vars[0], vars[1]),
    }
}

/// Rewrites every monomial of order 3 or 4 using auxiliaries for variable
/// pairs, then adds `2 |a|` copies of the substitution penalty for every
/// coefficient `a` that used a given auxiliary.
///
/// For factoring registries one auxiliary is allocated per free `(p_m, q_n)`
/// pair up front, so quartic `p q p q` terms and cubic `p q x` terms become
/// quadratic directly. An allocated auxiliary that no term used still gets a
/// single-weight penalty so it stays pinned to its product; this holds even
/// when the cost is already quadratic.
pub fn reduce_to_quadratic(
    poly: &QuboPolynomial,
    registry: &VariableRegistry,
) -> Result<(QuboPolynomial, VariableRegistry)> {
    let order = poly.order();
    if order > 4 {
        return Err(Error::OrderTooHigh(order));
    }
    let mut reg = registry.clone();
    let mut aux = AuxTable {
        index: BTreeMap::new(),
        weight: BTreeMap::new(),
    };
    let p_vars: Vec<usize> = (0..reg.len()).filter(|&v| reg.is_p(v)).collect();
    let q_vars: Vec<usize> = (0..reg.len()).filter(|&v| reg.is_q(v)).collect();
    for &p in &p_vars {
        for &q in &q_vars {
            aux.get_or_insert(&mut reg, p, q);
        }
    }

    let mut rewritten: Vec<(Vec<usize>, i64)> = Vec::with_capacity(poly.terms.len());
    for (vars, &coeff) in &poly.terms {
        match vars.len() {
            0..=2 => rewritten.push((vars.clone(), coeff)),
            3 | 4 => {
                let (a, b) = pick_pair(vars, &reg);
                let y1 = aux.get_or_insert(&mut reg, a, b);
                *aux.weight.entry(y1).or_insert(0) += coeff.abs();
                let rest: Vec<usize> = vars.iter().copied().filter(|&v| v != a && v != b).collect();
                if rest.len() == 1 {
                    rewritten.push((vec![y1, rest[0]], coeff));
                } else {
                    let y2 = aux.get_or_insert(&mut reg, rest[0], rest[1]);
                    *aux.weight.entry(y2).or_insert(0) += coeff.abs();
                    rewritten.push((vec![y1, y2], coeff));
                }
            }
            n => return Err(Error::OrderTooHigh(n)),
        }
    }

    let nv = reg.len();
    let mut out = QuboPolynomial::constant(nv, poly.constant);
    for (vars, coeff) in rewritten {
        out.add_term(&vars, coeff);
    }
    for (&(a, b), &y) in &aux.index {
        let w = aux.weight.get(&y).copied().unwrap_or(0).max(1);
        out = out.add(&substitution_penalty(nv, a, b, y).scale(2 * w));
    }
    Ok((out, reg))
}
