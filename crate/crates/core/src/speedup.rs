//! DLT speedups and their integration with Amdahl's law.
//!
//! The DLT speedup of a scenario is the ratio of the root's stand-alone time
//! to the scheduled finish time. It is evaluated here from the closed-form
//! speedup expressions directly rather than by inverting a [`Schedule`], so
//! that `speedup * finish_time == omega0 * t_cp` is a genuine cross-check.
//!
//! [`Schedule`]: crate::closedform::Schedule

use serde::Serialize;
use thiserror::Error;

use crate::closedform::SolveError;
use crate::model::{
    homogeneous_network, validate, Intensities, ModelError, ProcessingMode, Protocol, StarNetwork,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpeedupError {
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("f-grid value {0} is outside [0, 1]")]
    FractionOutOfRange(f64),
    #[error(
        "invalid f-grid `{0}` (expected start:stop:step with 0 <= start <= stop <= 1, step > 0)"
    )]
    BadGrid(String),
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

/// Speedup of the whole scenario network over the root working alone.
pub fn dlt_speedup(net: &StarNetwork, protocol: Protocol) -> Result<f64, SpeedupError> {
    ensure_feasible(net, protocol)?;
    let m = net.child_count();
    if m == 0 {
        return Ok(1.0);
    }
    let tcp = net.intensities.t_cp();
    let tcm = net.intensities.t_cm();
    let omega = |i| net.omega(i);
    let z = |i: usize| net.children[i - 1].link.z();

    let s = match protocol {
        Protocol::Sequential => {
            let k1 = omega(0) / omega(1);
            let mut product = 1.0;
            let mut bracket = 1.0;
            for i in 2..=m {
                product *= (omega(i - 1) * tcp - z(i - 1) * tcm) / (omega(i) * tcp);
                bracket += product;
            }
            1.0 + k1 * bracket
        }
        Protocol::Staggered => {
            let sum: f64 = (1..=m).map(|i| 1.0 / (omega(i) * tcp + z(i) * tcm)).sum();
            1.0 + omega(0) * tcp * sum
        }
        Protocol::Simultaneous => {
            let sum: f64 = (1..=m).map(|i| 1.0 / omega(i)).sum();
            1.0 + omega(0) * sum
        }
    };
    Ok(s)
}

/// Speedup for `m` identical children from the homogeneous closed forms.
///
/// For sequential distribution, `sigma = z t_cm / (omega t_cp)` and the
/// geometric factor `(1 - (1 - sigma)^m) / sigma` tends to `m` as
/// `sigma -> 0`; the limit is used for free links.
pub fn dlt_speedup_homogeneous(
    m: usize,
    omega0: f64,
    omega: f64,
    z: f64,
    intensities: Intensities,
    protocol: Protocol,
) -> Result<f64, SpeedupError> {
    let net = homogeneous_network(m, omega0, omega, z, intensities)?;
    ensure_feasible(&net, protocol)?;
    if m == 0 {
        return Ok(1.0);
    }
    let tcp = intensities.t_cp();
    let tcm = intensities.t_cm();
    let n = m as f64;
    let s = match protocol {
        Protocol::Sequential => {
            let sigma = z * tcm / (omega * tcp);
            1.0 + (omega0 / omega) * geometric_factor(sigma, m)
        }
        Protocol::Staggered => 1.0 + omega0 * tcp / (omega * tcp + z * tcm) * n,
        Protocol::Simultaneous => 1.0 + omega0 / omega * n,
    };
    Ok(s)
}

/// `(1 - (1 - sigma)^m) / sigma`, with value `m` at `sigma = 0`.
fn geometric_factor(sigma: f64, m: usize) -> f64 {
    if sigma == 0.0 {
        m as f64
    } else if sigma < 1.0 {
        // stable for tiny sigma: 1 - (1-s)^m = -expm1(m ln(1-s))
        -(m as f64 * (-sigma).ln_1p()).exp_m1() / sigma
    } else {
        (1.0 - (1.0 - sigma).powi(m as i32)) / sigma
    }
}

/// Overall speedup `1 / ((1 - f) + f / s)`. An infinite `s` yields the
/// serial bound `1 / (1 - f)`.
pub fn amdahl_overall(f: f64, s_parallel: f64) -> f64 {
    if s_parallel.is_infinite() {
        return 1.0 / (1.0 - f);
    }
    1.0 / ((1.0 - f) + f / s_parallel)
}

/// Execution time `(1 - f) t_s + (f / s) t_s`.
pub fn amdahl_execution_time(f: f64, s: f64, t_s: f64) -> f64 {
    (1.0 - f) * t_s + (f / s) * t_s
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpeedupRow {
    pub f: f64,
    pub one_minus_f: f64,
    pub f_over_sp: f64,
    pub s_overall: f64,
}

/// Amdahl-integrated speedup sampled over a grid of parallel fractions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeedupCurve {
    pub protocol: Protocol,
    pub mode: Option<ProcessingMode>,
    pub s_dlt: f64,
    pub rows: Vec<SpeedupRow>,
}

impl SpeedupCurve {
    /// Build a curve from a known parallel-facility speedup.
    pub fn from_speedup(
        protocol: Protocol,
        s_dlt: f64,
        f_grid: &[f64],
    ) -> Result<Self, SpeedupError> {
        let mut grid = f_grid.to_vec();
        if let Some(&bad) = grid.iter().find(|f| !(0.0..=1.0).contains(*f)) {
            return Err(SpeedupError::FractionOutOfRange(bad));
        }
        grid.sort_by(f64::total_cmp);
        let rows = grid
            .into_iter()
            .map(|f| SpeedupRow {
                f,
                one_minus_f: 1.0 - f,
                f_over_sp: f / s_dlt,
                s_overall: amdahl_overall(f, s_dlt),
            })
            .collect();
        Ok(Self {
            protocol,
            mode: None,
            s_dlt,
            rows,
        })
    }

    pub fn with_mode(mut self, mode: ProcessingMode) -> Self {
        self.mode = Some(mode);
        self
    }
}

/// Sweep `f` for one scenario network.
pub fn sweep_f(
    net: &StarNetwork,
    protocol: Protocol,
    f_grid: &[f64],
) -> Result<SpeedupCurve, SpeedupError> {
    let s = dlt_speedup(net, protocol)?;
    SpeedupCurve::from_speedup(protocol, s, f_grid)
}

/// Evenly spaced grid `start, start + step, ..., stop` (inclusive).
pub fn f_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, SpeedupError> {
    let ok = step > 0.0 && (0.0..=1.0).contains(&start) && (start..=1.0).contains(&stop);
    if !ok {
        return Err(SpeedupError::BadGrid(format!("{start}:{stop}:{step}")));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    // snap to 12 decimals so 0:1:0.1 yields exactly 0.3 rather than 0.30000000000000004
    Ok((0..=n)
        .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

/// Parse `start:stop:step`.
pub fn parse_f_grid(spec: &str) -> Result<Vec<f64>, SpeedupError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || SpeedupError::BadGrid(spec.to_owned());
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<Vec<_>, _>>()?;
    f_grid(nums[0], nums[1], nums[2]).map_err(|_| bad())
}

/// `0.0, 0.1, ..., 1.0`.
pub fn default_f_grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_scenario, Processor};
    use crate::presets;

    fn round3(x: f64) -> f64 {
        (x * 1000.0).round() / 1000.0
    }

    #[test]
    fn preset_speedups() {
        let het = presets::het_reconstructed();
        let cloud = presets::cloud();
        assert_eq!(
            round3(dlt_speedup(&het, Protocol::Simultaneous).unwrap()),
            2.519
        );
        let comb = build_scenario(&het, &cloud, ProcessingMode::Combined);
        assert_eq!(
            round3(dlt_speedup(&comb, Protocol::Sequential).unwrap()),
            8.643
        );
        let homo_comb = build_scenario(&presets::homo(), &cloud, ProcessingMode::Combined);
        let s = dlt_speedup(&homo_comb, Protocol::Staggered).unwrap();
        assert!((s - 13.507).abs() <= 0.002, "{s}");
    }

    #[test]
    fn root_only_speedup_is_one() {
        let net = StarNetwork::root_only(
            Processor::new("P0", 4.0).unwrap(),
            Intensities::new(2.0, 1.0).unwrap(),
        );
        for p in Protocol::ALL {
            assert_eq!(dlt_speedup(&net, p).unwrap(), 1.0);
        }
    }

    #[test]
    fn homogeneous_closed_forms() {
        let i = Intensities::new(2.0, 1.0).unwrap();
        let seq = dlt_speedup_homogeneous(4, 3.0, 3.0, 0.1, i, Protocol::Sequential).unwrap();
        assert!((seq - 4.900).abs() <= 0.002, "{seq}");
        let sim = dlt_speedup_homogeneous(4, 3.0, 3.0, 0.1, i, Protocol::Simultaneous).unwrap();
        assert_eq!(sim, 5.0);
        let stag = dlt_speedup_homogeneous(4, 3.0, 3.0, 0.1, i, Protocol::Staggered).unwrap();
        assert!((stag - (1.0 + 4.0 * 6.0 / 6.1)).abs() < 1e-12);
        assert!((stag - 4.936).abs() <= 0.002);
        let free = dlt_speedup_homogeneous(4, 3.0, 3.0, 0.0, i, Protocol::Sequential).unwrap();
        assert_eq!(free, 5.0);
    }

    #[test]
    fn geometric_factor_limit_is_continuous() {
        for m in 1..8 {
            let at_zero = geometric_factor(0.0, m);
            let near = geometric_factor(1e-13, m);
            assert!((at_zero - near).abs() < 1e-9);
        }
        assert_eq!(geometric_factor(1.0, 1), 1.0);
    }

    #[test]
    fn amdahl_examples() {
        assert_eq!(amdahl_overall(0.0, 7.0), 1.0);
        assert_eq!(round3(amdahl_overall(0.5, 11.0)), 1.833);
        assert!((amdahl_overall(0.9, f64::INFINITY) - 10.0).abs() < 1e-12);
        assert!((amdahl_overall(1.0, 7.667) - 7.667).abs() < 1e-12);
        assert!((amdahl_execution_time(0.9, f64::INFINITY, 10.0) - 1.0).abs() < 1e-12);
        assert_eq!(amdahl_execution_time(0.3, 1.0, 4.0), 4.0);
        assert_eq!(amdahl_execution_time(0.5, 2.0, 1.0), 0.75);
    }

    #[test]
    fn sweep_rows() {
        let net = build_scenario(&presets::homo(), &presets::cloud(), ProcessingMode::Cloud);
        let curve = sweep_f(&net, Protocol::Sequential, &default_f_grid()).unwrap();
        assert_eq!(curve.rows.len(), 11);
        assert_eq!(round3(curve.rows[5].s_overall), 1.833);
        assert_eq!(curve.rows[0].s_overall, 1.0);
        assert!((curve.rows[10].s_overall - curve.s_dlt).abs() < 1e-12);

        let seeded = SpeedupCurve::from_speedup(Protocol::Staggered, 2.265, &[0.5]).unwrap();
        assert_eq!(round3(seeded.rows[0].s_overall), 1.387);

        let single = sweep_f(&net, Protocol::Sequential, &[0.0]).unwrap();
        let r = single.rows[0];
        assert_eq!(
            (r.f, r.one_minus_f, r.f_over_sp, r.s_overall),
            (0.0, 1.0, 0.0, 1.0)
        );

        assert!(sweep_f(&net, Protocol::Sequential, &[1.2]).is_err());
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_f_grid("0:1:0.1").unwrap(), default_f_grid());
        assert_eq!(parse_f_grid("0.5:0.5:0.1").unwrap(), vec![0.5]);
        assert!(parse_f_grid("0:2:0.1").is_err());
        assert!(parse_f_grid("0:1:0").is_err());
        assert!(parse_f_grid("0:1").is_err());
    }
}
