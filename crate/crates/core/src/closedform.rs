//! Optimal load fractions from the equal-finish recurrences.
//!
//! Every protocol reduces to the same shape: the root's share is tied to
//! child 1 by a ratio `k1` (`alpha_1 = k1 * alpha_0`), each later child is
//! tied to its predecessor by `q_i` (`alpha_i = q_i * alpha_{i-1}`), and the
//! fractions sum to one. Only the definitions of `k1` and `q_i` change.

use serde::Serialize;
use thiserror::Error;

use crate::model::{validate, AssumptionViolation, Protocol, StarNetwork};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("{protocol} distribution is infeasible: {}", join(.violations))]
    Infeasible {
        protocol: Protocol,
        violations: Vec<AssumptionViolation>,
    },
    #[error("internal error: load fraction {index} is negative ({value})")]
    NegativeFraction { index: usize, value: f64 },
}

fn join(violations: &[AssumptionViolation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// Ratios behind a schedule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivationTrace {
    /// `alpha_1 / alpha_0`.
    pub k1: f64,
    /// `q_2 ..= q_m`, where `q_i = alpha_i / alpha_{i-1}`.
    pub q: Vec<f64>,
    /// The protocol's definitions of `k1` and `q_i`.
    pub definition: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Schedule {
    /// `alpha_0` (root) followed by one fraction per child, in network order.
    pub alphas: Vec<f64>,
    pub finish_time: f64,
    pub protocol: Protocol,
    /// `None` for a root-only network.
    pub trace: Option<DerivationTrace>,
}

impl Schedule {
    pub fn root_fraction(&self) -> f64 {
        self.alphas[0]
    }
}

/// Solve for the optimal schedule under `protocol`.
pub fn solve(net: &StarNetwork, protocol: Protocol) -> Result<Schedule, SolveError> {
    match protocol {
        Protocol::Sequential => solve_sequential(net),
        Protocol::Staggered => solve_staggered(net),
        Protocol::Simultaneous => solve_simultaneous(net),
    }
}

/// Sequential distribution: a child's compute span equals its predecessor's
/// compute span minus the predecessor's transmission.
pub fn solve_sequential(net: &StarNetwork) -> Result<Schedule, SolveError> {
    ensure_feasible(net, Protocol::Sequential)?;
    let c = |i| net.compute_time(i);
    let t = |i| net.transfer_time(i);
    from_ratios(
        net,
        Protocol::Sequential,
        "k1 = w0/w1; q_i = (w_{i-1} t_cp - z_{i-1} t_cm) / (w_i t_cp)",
        |_| net.omega(0) / net.omega(1),
        |i| (c(i - 1) - t(i - 1)) / c(i),
    )
}

/// Staggered start: each child's receive-plus-compute span is equal.
pub fn solve_staggered(net: &StarNetwork) -> Result<Schedule, SolveError> {
    let span = |i| net.compute_time(i) + net.transfer_time(i);
    from_ratios(
        net,
        Protocol::Staggered,
        "k1 = w0 t_cp / (w1 t_cp + z1 t_cm); q_i = (w_{i-1} t_cp + z_{i-1} t_cm) / (w_i t_cp + z_i t_cm)",
        |_| net.compute_time(0) / span(1),
        |i| span(i - 1) / span(i),
    )
}

/// Simultaneous start: fractions are proportional to computing speed; link
/// speeds play no part once starvation is ruled out.
pub fn solve_simultaneous(net: &StarNetwork) -> Result<Schedule, SolveError> {
    ensure_feasible(net, Protocol::Simultaneous)?;
    from_ratios(
        net,
        Protocol::Simultaneous,
        "k1 = w0/w1; q_i = w_{i-1}/w_i",
        |_| net.omega(0) / net.omega(1),
        |i| net.omega(i - 1) / net.omega(i),
    )
}

fn ensure_feasible(net: &StarNetwork, protocol: Protocol) -> Result<(), SolveError> {
    let violations = validate(net, protocol);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(SolveError::Infeasible {
            protocol,
            violations,
        })
    }
}

fn from_ratios(
    net: &StarNetwork,
    protocol: Protocol,
    definition: &'static str,
    k1: impl Fn(&StarNetwork) -> f64,
    q: impl Fn(usize) -> f64,
) -> Result<Schedule, SolveError> {
    let m = net.child_count();
    if m == 0 {
        return Ok(Schedule {
            alphas: vec![1.0],
            finish_time: net.root_only_time(),
            protocol,
            trace: None,
        });
    }

    let k1 = k1(net);
    let q: Vec<f64> = (2..=m).map(q).collect();

    // products[i - 1] = prod_{l=2..i} q_l, empty product = 1
    let mut products = Vec::with_capacity(m);
    products.push(1.0);
    for &ql in &q {
        let last = *products.last().expect("non-empty");
        products.push(last * ql);
    }

    let bracket = 1.0 / k1 + products.iter().sum::<f64>();
    let alpha1 = 1.0 / bracket;
    let alpha0 = alpha1 / k1;

    let mut alphas = Vec::with_capacity(m + 1);
    alphas.push(alpha0);
    alphas.extend(products.iter().map(|p| p * alpha1));

    if let Some((index, &value)) = alphas.iter().enumerate().find(|(_, a)| **a < 0.0) {
        return Err(SolveError::NegativeFraction { index, value });
    }

    Ok(Schedule {
        finish_time: alpha0 * net.compute_time(0),
        alphas,
        protocol,
        trace: Some(DerivationTrace { k1, q, definition }),
    })
}
