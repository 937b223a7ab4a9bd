//! Numeric minimization of replay makespan over the load-fraction simplex.
//!
//! The makespan of a split is the maximum of per-node completion times, each
//! affine in the fractions, so it is convex and piecewise linear with its
//! minimum at a kink. The search is derivative-free:
//!
//! 1. exhaustive enumeration of the simplex lattice `{k / N}` in
//!    lexicographic order, with `N` as large as the evaluation budget allows
//!    (at most `1 / grid_step`);
//! 2. while the lattice is coarser than `grid_step`, an exhaustive scan of a
//!    finer lattice window around the incumbent;
//! 3. pairwise refinement: move `step` of load from one node to another,
//!    taking the best move, halving the step when none improves, until it
//!    drops below [`REFINE_FLOOR`]. Moves are ranked on a log-sum-exp
//!    smoothing of the per-node finish times whose temperature shrinks with
//!    the step; a max of affine functions stalls coordinate moves at its
//!    kinks, the smoothed surface does not.
//!
//! Candidates are ranked by makespan, then by lexicographically smallest
//! fractions, so the result does not depend on evaluation order.

use std::cmp::Ordering;

use serde::Serialize;
use thiserror::Error;

use crate::model::{Protocol, StarNetwork};
use crate::replay::{replay_finish_times, replay_makespan};

/// Largest child count the search accepts.
pub const MAX_CHILDREN: usize = 4;

/// Lattice points evaluated in the exhaustive phase, at most.
pub const GRID_BUDGET: u64 = 2_000_000;

/// Refinement stops once the step falls below this.
pub const REFINE_FLOOR: f64 = 1e-6;

const ZOOM: usize = 5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error(
        "network has {m} children; the simplex search handles at most {MAX_CHILDREN} \
         (grid size grows as (1/grid_step)^m)"
    )]
    TooManyChildren { m: usize },
    #[error("grid_step must lie in (0, 0.5] (got {0})")]
    BadStep(f64),
    #[error("no feasible split found for {0} distribution")]
    NoFeasiblePoint(Protocol),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    pub best_alphas: Vec<f64>,
    pub best_makespan: f64,
    pub evaluations: u64,
    pub grid_step: f64,
}

struct Incumbent {
    alphas: Vec<f64>,
    makespan: f64,
}

impl Incumbent {
    fn empty() -> Self {
        Self {
            alphas: Vec::new(),
            makespan: f64::INFINITY,
        }
    }

    fn offer(&mut self, alphas: &[f64], makespan: f64) -> bool {
        let better = match makespan.total_cmp(&self.makespan) {
            Ordering::Less => true,
            Ordering::Equal => lex_less(alphas, &self.alphas),
            Ordering::Greater => false,
        };
        if better {
            self.alphas.clear();
            self.alphas.extend_from_slice(alphas);
            self.makespan = makespan;
        }
        better
    }
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Less => return true,
            Ordering::Greater => return false,
            Ordering::Equal => {}
        }
    }
    a.len() < b.len()
}

struct Evaluator<'a> {
    net: &'a StarNetwork,
    protocol: Protocol,
    count: u64,
}

impl Evaluator<'_> {
    /// Replay makespan, or infinity when the replay rejects the split.
    fn makespan(&mut self, alphas: &[f64]) -> f64 {
        self.count += 1;
        replay_makespan(self.net, self.protocol, alphas).unwrap_or(f64::INFINITY)
    }

    /// True makespan and its smoothing at temperature `tau`.
    fn smoothed(&mut self, alphas: &[f64], tau: f64, buf: &mut Vec<f64>) -> (f64, f64) {
        self.count += 1;
        if replay_finish_times(self.net, self.protocol, alphas, buf).is_err() {
            return (f64::INFINITY, f64::INFINITY);
        }
        let max = buf.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = buf.iter().map(|f| ((f - max) / tau).exp()).sum();
        (max, max + tau * sum.ln())
    }
}

/// Largest per-unit-load time of any node; converts a load step into a
/// finish-time scale.
fn time_scale(net: &StarNetwork) -> f64 {
    (0..net.node_count())
        .map(|i| net.compute_time(i) + if i == 0 { 0.0 } else { net.transfer_time(i) })
        .fold(0.0, f64::max)
}

fn refine(net: &StarNetwork, mut step: f64, eval: &mut Evaluator<'_>, best: &mut Incumbent) {
    let dims = best.alphas.len();
    let scale = time_scale(net);
    let mut buf = Vec::with_capacity(dims);
    let mut center = best.alphas.clone();
    let mut trial = vec![0.0; dims];
    let mut chosen = vec![0.0; dims];
    while step >= REFINE_FLOOR {
        let tau = step * scale;
        let (_, mut current) = eval.smoothed(&center, tau, &mut buf);
        loop {
            let mut best_value = current;
            for from in 0..dims {
                if center[from] < step {
                    continue;
                }
                for to in 0..dims {
                    if to == from {
                        continue;
                    }
                    trial.copy_from_slice(&center);
                    trial[from] -= step;
                    trial[to] += step;
                    let (max, value) = eval.smoothed(&trial, tau, &mut buf);
                    best.offer(&trial, max);
                    if value < best_value {
                        best_value = value;
                        chosen.copy_from_slice(&trial);
                    }
                }
            }
            if best_value < current {
                current = best_value;
                center.copy_from_slice(&chosen);
            } else {
                break;
            }
        }
        step /= 2.0;
    }
}

/// Number of lattice points `{k / n}` on the simplex with `dims` coordinates.
fn lattice_size(n: u64, dims: usize) -> u64 {
    // C(n + dims - 1, dims - 1)
    let k = dims as u64 - 1;
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        acc = acc * (n as u128 + i) / i;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

fn enumerate_lattice(n: u64, dims: usize, eval: &mut Evaluator<'_>, best: &mut Incumbent) {
    fn rec(
        pos: usize,
        remaining: u64,
        n: u64,
        ks: &mut Vec<u64>,
        alphas: &mut Vec<f64>,
        eval: &mut Evaluator<'_>,
        best: &mut Incumbent,
    ) {
        let dims = alphas.len();
        if pos == dims - 1 {
            ks[pos] = remaining;
            for (a, &k) in alphas.iter_mut().zip(ks.iter()) {
                *a = k as f64 / n as f64;
            }
            let ms = eval.makespan(alphas);
            best.offer(alphas, ms);
            return;
        }
        for k in 0..=remaining {
            ks[pos] = k;
            rec(pos + 1, remaining - k, n, ks, alphas, eval, best);
        }
    }
    let mut ks = vec![0; dims];
    let mut alphas = vec![0.0; dims];
    rec(0, n, n, &mut ks, &mut alphas, eval, best);
}

/// Fill `out` with `center + step * offsets` on the free coordinates and
/// the balancing last coordinate. Returns false if the point leaves the simplex.
fn shifted(center: &[f64], offsets: &[i64], step: f64, out: &mut [f64]) -> bool {
    let free = offsets.len();
    let mut sum = 0.0;
    for j in 0..free {
        let v = center[j] + offsets[j] as f64 * step;
        if v < -1e-12 {
            return false;
        }
        out[j] = v.max(0.0);
        sum += out[j];
    }
    let last = 1.0 - sum;
    if last < -1e-12 {
        return false;
    }
    out[free] = last.max(0.0);
    true
}

/// Scan every offset vector in `[-radius, radius]^(dims-1)` around `center`.
fn scan_window(
    center: &[f64],
    radius: i64,
    step: f64,
    eval: &mut Evaluator<'_>,
    best: &mut Incumbent,
) {
    let dims = center.len();
    let free = dims - 1;
    let mut offsets = vec![-radius; free];
    let mut point = vec![0.0; dims];
    loop {
        if shifted(center, &offsets, step, &mut point) {
            let ms = eval.makespan(&point);
            best.offer(&point, ms);
        }
        // odometer increment
        let mut j = free;
        loop {
            if j == 0 {
                return;
            }
            j -= 1;
            if offsets[j] < radius {
                offsets[j] += 1;
                break;
            }
            offsets[j] = -radius;
        }
    }
}

/// Minimize replay makespan over load splits for `net` under `protocol`.
pub fn minimize_makespan(
    net: &StarNetwork,
    protocol: Protocol,
    grid_step: f64,
) -> Result<SearchResult, SearchError> {
    if !(grid_step > 0.0 && grid_step <= 0.5) {
        return Err(SearchError::BadStep(grid_step));
    }
    let m = net.child_count();
    if m > MAX_CHILDREN {
        return Err(SearchError::TooManyChildren { m });
    }
    let dims = m + 1;
    let mut eval = Evaluator {
        net,
        protocol,
        count: 0,
    };
    if dims == 1 {
        let makespan = eval.makespan(&[1.0]);
        return Ok(SearchResult {
            best_alphas: vec![1.0],
            best_makespan: makespan,
            evaluations: eval.count,
            grid_step,
        });
    }

    let target_n = (1.0 / grid_step).ceil() as u64;
    let mut n = target_n;
    while n > 1 && lattice_size(n, dims) > GRID_BUDGET {
        n = n * 9 / 10;
    }
    let target_step = 1.0 / target_n as f64;

    let mut best = Incumbent::empty();
    enumerate_lattice(n, dims, &mut eval, &mut best);
    if !best.makespan.is_finite() {
        return Err(SearchError::NoFeasiblePoint(protocol));
    }

    // zoom until the lattice spacing reaches grid_step
    let mut step = 1.0 / n as f64;
    while step > target_step * (1.0 + 1e-12) {
        let finer = (step / ZOOM as f64).max(target_step);
        let radius = (step / finer).ceil() as i64;
        let center = best.alphas.clone();
        scan_window(&center, radius, finer, &mut eval, &mut best);
        step = finer;
    }

    refine(net, step, &mut eval, &mut best);

    Ok(SearchResult {
        best_alphas: best.alphas,
        best_makespan: best.makespan,
        evaluations: eval.count,
        grid_step,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_scenario, homogeneous_network, Intensities, ProcessingMode};
    use crate::presets;

    #[test]
    fn lattice_sizes() {
        assert_eq!(lattice_size(10, 1), 1);
        assert_eq!(lattice_size(10, 2), 11);
        assert_eq!(lattice_size(4, 3), 15);
        assert_eq!(lattice_size(1000, 5), 42_084_793_751);
    }

    #[test]
    fn enumeration_is_lexicographic_and_complete() {
        let net =
            homogeneous_network(2, 1.0, 1.0, 0.0, Intensities::new(1.0, 1.0).unwrap()).unwrap();
        let mut eval = Evaluator {
            net: &net,
            protocol: Protocol::Staggered,
            count: 0,
        };
        let mut best = Incumbent::empty();
        enumerate_lattice(4, 3, &mut eval, &mut best);
        assert_eq!(eval.count, 15);
    }

    #[test]
    fn symmetric_pair() {
        let net =
            homogeneous_network(1, 1.0, 1.0, 0.0, Intensities::new(1.0, 1.0).unwrap()).unwrap();
        let r = minimize_makespan(&net, Protocol::Simultaneous, 0.1).unwrap();
        assert!((r.best_alphas[0] - 0.5).abs() < 1e-9);
        assert!((r.best_alphas[1] - 0.5).abs() < 1e-9);
        assert!((r.best_makespan - 0.5).abs() < 1e-9);
    }

    #[test]
    fn homo_simultaneous() {
        let r = minimize_makespan(&presets::homo(), Protocol::Simultaneous, 1e-3).unwrap();
        assert!((r.best_makespan - 1.2).abs() <= 1e-3, "{r:?}");
    }

    #[test]
    fn het_cloud_sequential() {
        let net = build_scenario(
            &presets::het_printed(),
            &presets::cloud(),
            ProcessingMode::Cloud,
        );
        let r = minimize_makespan(&net, Protocol::Sequential, 1e-3).unwrap();
        assert!((r.best_makespan - 0.522).abs() <= 1e-3, "{r:?}");
    }

    #[test]
    fn rejects_large_networks_and_bad_steps() {
        let comb = build_scenario(
            &presets::homo(),
            &presets::cloud(),
            ProcessingMode::Combined,
        );
        assert!(matches!(
            minimize_makespan(&comb, Protocol::Sequential, 0.1),
            Err(SearchError::TooManyChildren { m: 5 })
        ));
        assert!(matches!(
            minimize_makespan(&presets::homo(), Protocol::Sequential, 0.0),
            Err(SearchError::BadStep(_))
        ));
        assert!(minimize_makespan(&presets::homo(), Protocol::Sequential, 0.6).is_err());
    }

    #[test]
    fn ties_break_lexicographically() {
        let mut best = Incumbent::empty();
        assert!(best.offer(&[0.5, 0.5], 1.0));
        assert!(best.offer(&[0.4, 0.6], 1.0));
        assert!(!best.offer(&[0.45, 0.55], 1.0));
        assert_eq!(best.alphas, vec![0.4, 0.6]);
    }
}
