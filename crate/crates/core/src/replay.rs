//! Timeline replay of an arbitrary load split.
//!
//! Given load fractions, the replay lays out when each child receives its
//! fragment and when every node computes, following each protocol's timing
//! rules. It knows nothing about optimality, so it serves as the oracle for
//! the closed-form schedules and as the objective for the numeric search.
//!
//! The root has a front end: it computes its own share on `[0, a0 w0 t_cp]`
//! while its links transmit.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::closedform::Schedule;
use crate::model::{Protocol, StarNetwork};

/// Tolerance on `sum(alphas) == 1`.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// Relative tolerance used by [`verify_schedule`].
pub const VERIFY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReplayError {
    #[error("expected {expected} load fractions (root + children), got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("load fraction {index} is invalid ({value})")]
    InvalidFraction { index: usize, value: f64 },
    #[error("load fractions sum to {0}, expected 1")]
    BadSum(f64),
    #[error("load must be positive and finite (got {0})")]
    BadLoad(f64),
    #[error("node {node} ({label}) runs out of data at t = {time}: it computes faster than its link delivers")]
    Starvation {
        node: usize,
        label: String,
        time: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Phase {
    Receive,
    Compute,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phase::Receive => f.write_str("receive"),
            Phase::Compute => f.write_str("compute"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimelineEntry {
    /// Node index, 0 = root.
    pub node: usize,
    pub label: String,
    pub phase: Phase,
    pub start: f64,
    pub end: f64,
}

impl TimelineEntry {
    pub fn duration(&self) -> f64 {
        self.end - self.start
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timeline {
    pub protocol: Protocol,
    /// Root compute first, then receive and compute per child, in network order.
    pub entries: Vec<TimelineEntry>,
    pub makespan: f64,
    /// Completion time of each node, index 0 = root.
    pub per_node_finish: Vec<f64>,
}

/// Receive and compute windows of one node.
#[derive(Debug, Clone, Copy, PartialEq)]
struct NodeWindows {
    receive: Option<(f64, f64)>,
    compute: (f64, f64),
}

fn check_alphas(net: &StarNetwork, alphas: &[f64]) -> Result<(), ReplayError> {
    if alphas.len() != net.node_count() {
        return Err(ReplayError::WrongLength {
            expected: net.node_count(),
            got: alphas.len(),
        });
    }
    if let Some((index, &value)) = alphas
        .iter()
        .enumerate()
        .find(|(_, a)| !a.is_finite() || **a < 0.0)
    {
        return Err(ReplayError::InvalidFraction { index, value });
    }
    let sum: f64 = alphas.iter().sum();
    if (sum - 1.0).abs() > SUM_TOLERANCE {
        return Err(ReplayError::BadSum(sum));
    }
    Ok(())
}

/// First instant at which a node would compute data it has not yet
/// received, if any. Rates are time per unit load.
fn starvation_time(
    receive: (f64, f64),
    compute_start: f64,
    compute_rate: f64,
    transfer_rate: f64,
) -> Option<f64> {
    let (rs, re) = receive;
    if re <= rs {
        // nothing to wait for once the (instant) delivery at rs is done
        return (compute_start < rs).then_some(compute_start);
    }
    if compute_start < rs {
        return Some(compute_start);
    }
    if transfer_rate <= compute_rate {
        return None;
    }
    // processed (t - cs)/A catches received (t - rs)/B at t*
    let catch_up =
        (transfer_rate * compute_start - compute_rate * rs) / (transfer_rate - compute_rate);
    (catch_up < re).then_some(catch_up)
}

fn walk(
    net: &StarNetwork,
    protocol: Protocol,
    alphas: &[f64],
    load: f64,
    mut visit: impl FnMut(usize, NodeWindows),
) -> Result<(), ReplayError> {
    if !(load.is_finite() && load > 0.0) {
        return Err(ReplayError::BadLoad(load));
    }
    check_alphas(net, alphas)?;

    visit(
        0,
        NodeWindows {
            receive: None,
            compute: (0.0, load * alphas[0] * net.compute_time(0)),
        },
    );

    let mut link_free_at = 0.0;
    for (i, &alpha) in alphas.iter().enumerate().skip(1) {
        let share = load * alpha;
        let compute_rate = net.compute_time(i);
        let transfer_rate = net.transfer_time(i);
        let receive_start = match protocol {
            Protocol::Sequential => link_free_at,
            Protocol::Staggered | Protocol::Simultaneous => 0.0,
        };
        let receive = (receive_start, receive_start + share * transfer_rate);
        link_free_at = receive.1;

        let compute_start = match protocol {
            Protocol::Sequential => receive.0,
            Protocol::Staggered => receive.1,
            Protocol::Simultaneous => 0.0,
        };
        if share > 0.0 {
            if let Some(time) = starvation_time(receive, compute_start, compute_rate, transfer_rate)
            {
                return Err(ReplayError::Starvation {
                    node: i,
                    label: net.label(i).to_owned(),
                    time,
                });
            }
        }
        visit(
            i,
            NodeWindows {
                receive: Some(receive),
                compute: (compute_start, compute_start + share * compute_rate),
            },
        );
    }
    Ok(())
}

/// Replay a unit load split by `alphas`.
pub fn replay(
    net: &StarNetwork,
    protocol: Protocol,
    alphas: &[f64],
) -> Result<Timeline, ReplayError> {
    replay_load(net, protocol, alphas, 1.0)
}

/// Replay a load of size `load` split by `alphas`.
pub fn replay_load(
    net: &StarNetwork,
    protocol: Protocol,
    alphas: &[f64],
    load: f64,
) -> Result<Timeline, ReplayError> {
    let mut entries = Vec::with_capacity(2 * net.node_count());
    let mut per_node_finish = Vec::with_capacity(net.node_count());
    walk(net, protocol, alphas, load, |i, w| {
        let label = net.label(i);
        if let Some((start, end)) = w.receive {
            entries.push(TimelineEntry {
                node: i,
                label: label.to_owned(),
                phase: Phase::Receive,
                start,
                end,
            });
        }
        entries.push(TimelineEntry {
            node: i,
            label: label.to_owned(),
            phase: Phase::Compute,
            start: w.compute.0,
            end: w.compute.1,
        });
        per_node_finish.push(w.compute.1);
    })?;
    let makespan = per_node_finish.iter().copied().fold(0.0, f64::max);
    Ok(Timeline {
        protocol,
        entries,
        makespan,
        per_node_finish,
    })
}

/// Makespan of a unit-load replay, without building the timeline.
pub fn replay_makespan(
    net: &StarNetwork,
    protocol: Protocol,
    alphas: &[f64],
) -> Result<f64, ReplayError> {
    let mut makespan: f64 = 0.0;
    walk(net, protocol, alphas, 1.0, |_, w| {
        makespan = makespan.max(w.compute.1)
    })?;
    Ok(makespan)
}

/// Per-node completion times of a unit-load replay, written into `out`.
pub fn replay_finish_times(
    net: &StarNetwork,
    protocol: Protocol,
    alphas: &[f64],
    out: &mut Vec<f64>,
) -> Result<(), ReplayError> {
    out.clear();
    walk(net, protocol, alphas, 1.0, |_, w| out.push(w.compute.1))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub protocol: Protocol,
    pub finish_time: f64,
    /// `None` when the replay itself was rejected.
    pub makespan: Option<f64>,
    /// Max minus min completion time over nodes with positive load.
    pub spread: f64,
    /// `|makespan - finish_time|`.
    pub makespan_gap: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub error: Option<String>,
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "{verdict} replay {}: finish_time={:e} spread={:e} gap={:e}",
            self.protocol, self.finish_time, self.spread, self.makespan_gap
        )?;
        if let Some(err) = &self.error {
            write!(f, " error={err}")?;
        }
        Ok(())
    }
}

/// Replay a schedule and check that every loaded node finishes at the
/// schedule's finish time.
pub fn verify_schedule(
    net: &StarNetwork,
    protocol: Protocol,
    schedule: &Schedule,
) -> VerificationReport {
    let finish_time = schedule.finish_time;
    let timeline = match replay(net, protocol, &schedule.alphas) {
        Ok(t) => t,
        Err(e) => {
            return VerificationReport {
                protocol,
                finish_time,
                makespan: None,
                spread: f64::INFINITY,
                makespan_gap: f64::INFINITY,
                tolerance: VERIFY_TOLERANCE,
                passed: false,
                error: Some(e.to_string()),
            }
        }
    };
    let loaded = timeline
        .per_node_finish
        .iter()
        .zip(&schedule.alphas)
        .filter(|(_, a)| **a > 0.0)
        .map(|(t, _)| *t);
    let (lo, hi) = loaded.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| {
        (lo.min(t), hi.max(t))
    });
    let spread = if hi >= lo { hi - lo } else { 0.0 };
    let makespan_gap = (timeline.makespan - finish_time).abs();
    let bound = VERIFY_TOLERANCE * finish_time.abs();
    VerificationReport {
        protocol,
        finish_time,
        makespan: Some(timeline.makespan),
        spread,
        makespan_gap,
        tolerance: VERIFY_TOLERANCE,
        passed: spread <= bound && makespan_gap <= bound,
        error: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedform::solve;
    use crate::model::{Child, Intensities, Link, Processor};
    use crate::presets;
    use approx::assert_relative_eq;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn homo_simultaneous_all_finish_together() {
        let net = presets::homo();
        let s = solve(&net, Protocol::Simultaneous).unwrap();
        let t = replay(&net, Protocol::Simultaneous, &s.alphas).unwrap();
        for f in &t.per_node_finish {
            assert_relative_eq!(*f, 1.2, max_relative = 1e-12);
        }
        assert_relative_eq!(t.makespan, 1.2, max_relative = 1e-12);
    }

    #[test]
    fn root_takes_everything() {
        let net = presets::het_printed();
        for p in Protocol::ALL {
            let t = replay(&net, p, &[1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
            assert_eq!(t.makespan, 4.0);
            assert!(t
                .entries
                .iter()
                .filter(|e| e.node > 0)
                .all(|e| e.duration() == 0.0));
        }
    }

    #[test]
    fn sequential_uniform_split_by_hand() {
        // het-reconstructed, alphas 0.2 each; t_cm = 1 so receive lasts 0.2 z
        let net = presets::het_reconstructed();
        let t = replay(&net, Protocol::Sequential, &[0.2; 5]).unwrap();
        let starts: Vec<f64> = t
            .entries
            .iter()
            .filter(|e| e.phase == Phase::Receive)
            .map(|e| e.start)
            .collect();
        for (got, want) in starts.iter().zip([0.0, 0.3, 0.74, 1.34]) {
            assert!(close(*got, want), "{got} vs {want}");
        }
        for (got, want) in t
            .per_node_finish
            .iter()
            .zip([0.8, 1.6, 2.3, 2.3 + 0.84, 4.14])
        {
            assert!(close(*got, want), "{got} vs {want}");
        }
        assert!(close(t.makespan, 4.14));
    }

    #[test]
    fn staggered_computes_after_delivery() {
        let net = presets::homo();
        let t = replay(&net, Protocol::Staggered, &[0.2; 5]).unwrap();
        for i in 1..=4 {
            let rx = &t.entries[2 * i - 1];
            let cp = &t.entries[2 * i];
            assert_eq!(rx.phase, Phase::Receive);
            assert_eq!(cp.start, rx.end);
            assert!(close(rx.end, 0.02));
        }
    }

    #[test]
    fn rejects_malformed_alphas() {
        let net = presets::homo();
        assert!(matches!(
            replay(&net, Protocol::Sequential, &[0.5, 0.5]),
            Err(ReplayError::WrongLength {
                expected: 5,
                got: 2
            })
        ));
        assert!(matches!(
            replay(&net, Protocol::Sequential, &[0.6, 0.6, -0.2, 0.0, 0.0]),
            Err(ReplayError::InvalidFraction { index: 2, .. })
        ));
        assert!(matches!(
            replay(&net, Protocol::Sequential, &[0.3; 5]),
            Err(ReplayError::BadSum(_))
        ));
    }

    #[test]
    fn starvation_detected() {
        let net = StarNetwork::new(
            Processor::new("P0", 1.0).unwrap(),
            vec![Child::new(
                Processor::new("P1", 1.0).unwrap(),
                Link::new(2.0).unwrap(),
            )],
            Intensities::new(1.0, 1.0).unwrap(),
        );
        for p in [Protocol::Sequential, Protocol::Simultaneous] {
            match replay(&net, p, &[0.5, 0.5]) {
                Err(ReplayError::Starvation { node: 1, time, .. }) => assert_eq!(time, 0.0),
                other => panic!("{other:?}"),
            }
        }
        assert!(replay(&net, Protocol::Staggered, &[0.5, 0.5]).is_ok());
        // an idle child cannot starve
        assert!(replay(&net, Protocol::Simultaneous, &[1.0, 0.0]).is_ok());
    }

    #[test]
    fn starvation_time_cases() {
        // compute starts before any data
        assert_eq!(starvation_time((1.0, 2.0), 0.5, 1.0, 1.0), Some(0.5));
        // slow link, delayed start: catches up at t* = (2*1 - 1*0)/(2-1) = 2 < re = 3
        assert_eq!(starvation_time((0.0, 3.0), 1.0, 1.0, 2.0), Some(2.0));
        // delayed long enough that delivery ends first
        assert_eq!(starvation_time((0.0, 3.0), 2.0, 1.0, 2.0), None);
        // fast link
        assert_eq!(starvation_time((0.0, 1.0), 0.0, 2.0, 1.0), None);
    }

    #[test]
    fn verify_passes_and_fails() {
        let net = presets::het_reconstructed();
        let s = solve(&net, Protocol::Sequential).unwrap();
        let ok = verify_schedule(&net, Protocol::Sequential, &s);
        assert!(ok.passed, "{ok}");

        let mut bad = s.clone();
        bad.alphas[1] += 0.01;
        bad.alphas[2] -= 0.01;
        let report = verify_schedule(&net, Protocol::Sequential, &bad);
        assert!(!report.passed);
        assert!(report.spread > 0.0);

        let root = StarNetwork::root_only(net.root.clone(), net.intensities);
        let rs = solve(&root, Protocol::Staggered).unwrap();
        let r = verify_schedule(&root, Protocol::Staggered, &rs);
        assert!(r.passed);
        assert_eq!(r.spread, 0.0);
    }
}
