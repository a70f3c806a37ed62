use serde::{Deserialize, Serialize};

use super::layout::BitSplit;

/// What a binary variable stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum Role {
    /// Free bit `p_index` of the smaller factor.
    PBit { index: usize },
    /// Free bit `q_index` of the larger factor.
    QBit { index: usize },
    /// Carry `C_index` (1-based, in block order).
    Carry { index: usize },
    /// Auxiliary standing for the product of two other variables.
    Auxiliary { left: usize, right: usize },
    /// Variable of a polynomial not produced by the factoring encoder.
    Free,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableRegistry {
    pub split: Option<BitSplit>,
    pub roles: Vec<Role>,
}

impl VariableRegistry {
    pub fn generic(num_vars: usize) -> Self {
        Self {
            split: None,
            roles: vec![Role::Free; num_vars],
        }
    }

    pub fn len(&self) -> usize {
        self.roles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roles.is_empty()
    }

    pub fn push(&mut self, role: Role) -> usize {
        self.roles.push(role);
        self.roles.len() - 1
    }

    pub fn p_var(&self, index: usize) -> Option<usize> {
        self.roles
            .iter()
            .position(|r| *r == Role::PBit { index })
    }

    pub fn q_var(&self, index: usize) -> Option<usize> {
        self.roles
            .iter()
            .position(|r| *r == Role::QBit { index })
    }

    pub fn is_p(&self, var: usize) -> bool {
        matches!(self.roles.get(var), Some(Role::PBit { .. }))
    }

    pub fn is_q(&self, var: usize) -> bool {
        matches!(self.roles.get(var), Some(Role::QBit { .. }))
    }

    pub fn aux_count(&self) -> usize {
        self.roles
            .iter()
            .filter(|r| matches!(r, Role::Auxiliary { .. }))
            .count()
    }

    /// Human-readable variable name (`p1`, `q2`, `C1`, `a(0,2)`, `x5`).
    pub fn name(&self, var: usize) -> String {
        match self.roles[var] {
            Role::PBit { index } => format!("p{index}"),
            Role::QBit { index } => format!("q{index}"),
            Role::Carry { index } => format!("C{index}"),
            Role::Auxiliary { left, right } => format!("a({left},{right})"),
            Role::Free => format!("x{var}"),
        }
    }
}
