//! Zero-temperature three-option decision rule.
//!
//! The effective utility of state `k` against state `j` is
//! `delta_kj = nu_k - nu_j + u_k - u_j`, where `nu` are neighborhood shares
//! and `u` intrinsic utilities. A state is taken with probability 1 when it
//! strictly beats both alternatives; ties split uniformly.

use super::network::Network;
use crate::{Error, Result};

/// Agent state. Indices follow the convention brand 1 = 1, brand 2 = 2,
/// non-adoption = 3; array positions are index - 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AgentState {
    Brand1,
    Brand2,
    NonAdopter,
}

impl AgentState {
    #[inline]
    pub fn slot(self) -> usize {
        match self {
            AgentState::Brand1 => 0,
            AgentState::Brand2 => 1,
            AgentState::NonAdopter => 2,
        }
    }

    pub fn is_adopter(self) -> bool {
        !matches!(self, AgentState::NonAdopter)
    }
}

/// Shares of each state within an agent's contact group.
pub fn local_shares(agent: usize, net: &Network, states: &[AgentState]) -> Result<[f64; 3]> {
    let neighbors = net.neighbors(agent);
    if neighbors.is_empty() {
        return Err(Error::IsolatedAgent { agent });
    }
    let mut counts = [0usize; 3];
    for &j in neighbors {
        counts[states[j as usize].slot()] += 1;
    }
    let degree = neighbors.len() as f64;
    Ok([counts[0] as f64 / degree, counts[1] as f64 / degree, counts[2] as f64 / degree])
}

/// `delta_kj = nu_k - nu_j + u_k - u_j` with 1-based state indices.
#[inline]
pub fn effective_delta(k_state: usize, j_state: usize, nu: &[f64; 3], u: &[f64; 3]) -> f64 {
    let (k, j) = (k_state - 1, j_state - 1);
    nu[k] - nu[j] + u[k] - u[j]
}

#[inline]
fn branch_probability(d1: f64, d2: f64) -> f64 {
    if d1 < 0.0 || d2 < 0.0 {
        0.0
    } else if d1 == 0.0 && d2 == 0.0 {
        1.0 / 3.0
    } else if d1 == 0.0 || d2 == 0.0 {
        0.5
    } else {
        1.0
    }
}

/// Probability of each state under the zero-temperature rule; sums to 1.
pub fn state_probabilities(nu: &[f64; 3], u: &[f64; 3]) -> [f64; 3] {
    let d12 = effective_delta(1, 2, nu, u);
    let d13 = effective_delta(1, 3, nu, u);
    let d23 = effective_delta(2, 3, nu, u);
    [
        branch_probability(d12, d13),
        branch_probability(-d12, d23),
        branch_probability(-d13, -d23),
    ]
}
