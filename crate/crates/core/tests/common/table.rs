//! Independent expansion of printed block cost functions.

use std::collections::BTreeMap;

use hardfactor::encoder::QuboPolynomial;

/// Parses `c + c*x*y - ...` with variable names as printed by the registry.
pub fn parse_linear_form(text: &str) -> Vec<(i64, Vec<String>)> {
    let cleaned = text.replace(' ', "").replace("\\tilde{C}", "C").replace('_', "");
    let mut terms = Vec::new();
    let mut sign = 1;
    let mut current = String::new();
    let flush = |current: &mut String, sign: i64, terms: &mut Vec<(i64, Vec<String>)>| {
        if current.is_empty() {
            return;
        }
        let digits: String = current.chars().take_while(|c| c.is_ascii_digit()).collect();
        let coeff = if digits.is_empty() { 1 } else { digits.parse().unwrap() };
        let rest = &current[digits.len()..];
        let mut vars = Vec::new();
        let chars: Vec<char> = rest.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let mut name = chars[i].to_string();
            i += 1;
            while i < chars.len() && chars[i].is_ascii_digit() {
                name.push(chars[i]);
                i += 1;
            }
            vars.push(name);
        }
        terms.push((sign * coeff, vars));
        current.clear();
    };
    for ch in cleaned.chars() {
        match ch {
            '+' | '-' => {
                flush(&mut current, sign, &mut terms);
                sign = if ch == '+' { 1 } else { -1 };
            }
            _ => current.push(ch),
        }
    }
    flush(&mut current, sign, &mut terms);
    terms
}

/// Multilinear coefficients of `f` from its truth table (Moebius transform).
pub fn moebius(values: &[i64], vars: usize) -> BTreeMap<u64, i64> {
    let mut a = values.to_vec();
    for k in 0..vars {
        for mask in 0..a.len() {
            if mask >> k & 1 == 1 {
                a[mask] -= a[mask ^ (1 << k)];
            }
        }
    }
    a.into_iter().enumerate().filter(|(_, c)| *c != 0).map(|(m, c)| (m as u64, c)).collect()
}

pub fn poly_by_mask(poly: &QuboPolynomial) -> BTreeMap<u64, i64> {
    let mut out = BTreeMap::new();
    if poly.constant != 0 {
        out.insert(0, poly.constant);
    }
    for (vars, &c) in &poly.terms {
        out.insert(vars.iter().fold(0u64, |m, &v| m | 1 << v), c);
    }
    out
}

// Block cost functions for 143 = 11 x 13 as printed with the multiplication table.
pub const F1: &str = "4p_2q_1+4p_1q_2+2p_1q_1+2p_2+2q_2+p_1+q_1-16\\tilde{C}_2-8\\tilde{C}_1+1";
pub const F2: &str = "p_2q_2+2p_2+p_1+2q_2+q_1+2\\tilde{C}_2+\\tilde{C}_1-4";
