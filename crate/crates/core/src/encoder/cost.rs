use super::layout::{column_size, BitSplit, BlockLayout};
use super::poly::QuboPolynomial;
use super::registry::{Role, VariableRegistry};

/// Registry holding the free factor bits followed by the carries.
fn base_registry(layout: &BlockLayout) -> VariableRegistry {
    let split = layout.split;
    let mut reg = VariableRegistry {
        split: Some(split),
        roles: Vec::new(),
    };
    for m in 1..split.lp {
        reg.push(Role::PBit { index: m });
    }
    for n in 1..split.lq {
        reg.push(Role::QBit { index: n });
    }
    for k in 1..=layout.total_carries {
        reg.push(Role::Carry { index: k });
    }
    reg
}

/// Bit `m` of a factor as a polynomial: the end bits are the constant 1.
fn factor_bit(num_vars: usize, top: usize, index: usize, var: Option<usize>) -> QuboPolynomial {
    if index == 0 || index == top {
        QuboPolynomial::constant(num_vars, 1)
    } else {
        QuboPolynomial::variable(num_vars, var.expect("free bit has a variable"), 1)
    }
}

/// Sum of the products `p_m q_n` with `m + n = j`.
fn column(split: &BitSplit, reg: &VariableRegistry, j: usize) -> QuboPolynomial {
    let nv = reg.len();
    let mut col = QuboPolynomial::new(nv);
    for m in 0..=split.lp {
        if j < m || j - m > split.lq {
            continue;
        }
        let n = j - m;
        let p = factor_bit(nv, split.lp, m, reg.p_var(m));
        let q = factor_bit(nv, split.lq, n, reg.q_var(n));
        col = col.add(&p.mul(&q));
    }
    debug_assert_eq!(
        col.evaluate(u64::MAX),
        column_size(split, j) as i64,
        "column {j} size"
    );
    col
}

fn carry_var(layout: &BlockLayout, prefix: usize, j: usize) -> usize {
    let split = layout.split;
    (split.lp - 1) + (split.lq - 1) + prefix + j - 1
}

/// The per-block balance expressions `rho_i + K_i - F_i - V_i` for blocks
/// `1..=P_N`, before squaring.
pub fn block_expressions(n: u64, layout: &BlockLayout) -> (Vec<QuboPolynomial>, VariableRegistry) {
    let split = layout.split;
    let reg = base_registry(layout);
    let nv = reg.len();
    let w = layout.width;
    let last = layout.num_blocks;

    let mut blocks = Vec::with_capacity(last);
    for i in 1..=last {
        let start = (i - 1) * w + 1;
        let end = if i < last { i * w } else { split.lp + split.lq };

        let mut expr = QuboPolynomial::new(nv);
        for j in start..=end {
            expr = expr.add(&column(&split, &reg, j).scale(1 << (j - start)));
        }

        // carries into block i
        if i >= 2 {
            let c_prev = layout.carry_counts[i - 2];
            let chi_prev = layout.carry_prefix[i - 2];
            for j in 1..=c_prev {
                expr.add_term(&[carry_var(layout, chi_prev, j)], 1 << (j - 1));
            }
        }
        // carries out of block i
        if i < last {
            let c = layout.carry_counts[i - 1];
            let chi = layout.carry_prefix[i - 1];
            for j in 1..=c {
                expr.add_term(&[carry_var(layout, chi, j)], -(1i64 << (w + j - 1)));
            }
        }

        let target = if i < last {
            (n >> start) & ((1 << w) - 1)
        } else {
            n >> start
        };
        expr.constant -= target as i64;
        blocks.push(expr);
    }
    (blocks, reg)
}

/// Sum of squared block balances, expanded with `x^2 = x`. Terms reach
/// order four where two `p q` products meet.
pub fn build_cost_function(n: u64, layout: &BlockLayout) -> (QuboPolynomial, VariableRegistry) {
    let (blocks, reg) = block_expressions(n, layout);
    let mut cost = QuboPolynomial::new(reg.len());
    for b in &blocks {
        cost = cost.add(&b.square());
    }
    (cost, reg)
}

/// Assignment of every non-auxiliary variable for a concrete factor pair,
/// with carries taken from the exact long multiplication.
pub fn assignment_for_factors(p: u64, q: u64, layout: &BlockLayout) -> u64 {
    let split = layout.split;
    let mut bits = 0u64;
    let mut var = 0;
    for m in 1..split.lp {
        bits |= (p >> m & 1) << var;
        var += 1;
    }
    for n in 1..split.lq {
        bits |= (q >> n & 1) << var;
        var += 1;
    }
    let w = layout.width;
    let mut carry_in = 0u64;
    for i in 1..layout.num_blocks {
        let start = (i - 1) * w + 1;
        let mut rho = 0u64;
        for j in start..start + w {
            let col: u64 = (0..=split.lp)
                .filter(|&m| j >= m && j - m <= split.lq)
                .map(|m| (p >> m & 1) * (q >> (j - m) & 1))
                .sum();
            rho += col << (j - start);
        }
        let carry_out = (rho + carry_in) >> w;
        let c = layout.carry_counts[i - 1];
        for j in 0..c {
            bits |= (carry_out >> j & 1) << (var + j);
        }
        var += c;
        carry_in = carry_out;
    }
    bits
}
