//! Star-network domain types, processing scenarios and feasibility checks.
//!
//! A [`StarNetwork`] is a root processor that keeps part of the load for
//! itself and hands the rest to an ordered list of children, each reached
//! over its own link. Times are expressed through inverse speeds: a node with
//! inverse computing speed `omega` processes the whole load in
//! `omega * t_cp` seconds, and a link with inverse speed `z` moves the whole
//! load in `z * t_cm` seconds.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised when constructing model values.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{field} must be positive (got {value})")]
    NotPositive { field: String, value: f64 },
    #[error("{field} must be non-negative (got {value})")]
    Negative { field: String, value: f64 },
    #[error("{field} must be finite (got {value})")]
    NotFinite { field: String, value: f64 },
    #[error("{field} must lie in [0, 1] (got {value})")]
    OutOfUnitRange { field: String, value: f64 },
    #[error("unknown {kind} `{value}` (expected one of: {expected})")]
    UnknownName {
        kind: &'static str,
        value: String,
        expected: &'static str,
    },
}

fn check_positive(field: &str, value: f64) -> Result<f64, ModelError> {
    if !value.is_finite() {
        return Err(ModelError::NotFinite {
            field: field.to_owned(),
            value,
        });
    }
    if value <= 0.0 {
        return Err(ModelError::NotPositive {
            field: field.to_owned(),
            value,
        });
    }
    Ok(value)
}

fn check_non_negative(field: &str, value: f64) -> Result<f64, ModelError> {
    if !value.is_finite() {
        return Err(ModelError::NotFinite {
            field: field.to_owned(),
            value,
        });
    }
    if value < 0.0 {
        return Err(ModelError::Negative {
            field: field.to_owned(),
            value,
        });
    }
    Ok(value)
}

/// Computation and communication intensity constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Intensities {
    t_cp: f64,
    t_cm: f64,
}

impl Intensities {
    pub fn new(t_cp: f64, t_cm: f64) -> Result<Self, ModelError> {
        Ok(Self {
            t_cp: check_positive("t_cp", t_cp)?,
            t_cm: check_non_negative("t_cm", t_cm)?,
        })
    }

    /// Seconds needed to process the whole load at unit inverse speed.
    pub fn t_cp(&self) -> f64 {
        self.t_cp
    }

    /// Seconds needed to transmit the whole load at unit inverse link speed.
    pub fn t_cm(&self) -> f64 {
        self.t_cm
    }
}

/// A computing node, described by its inverse computing speed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Processor {
    omega: f64,
    label: String,
}

impl Processor {
    pub fn new(label: impl Into<String>, omega: f64) -> Result<Self, ModelError> {
        let label = label.into();
        let omega = check_positive(&format!("{label}.omega"), omega)?;
        Ok(Self { omega, label })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Time to process the entire load on this node.
    pub fn compute_time(&self, intensities: &Intensities) -> f64 {
        self.omega * intensities.t_cp
    }
}

/// A dedicated link from the root to one child. `z = 0` is an instantaneous link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Link {
    z: f64,
}

impl Link {
    pub fn new(z: f64) -> Result<Self, ModelError> {
        Ok(Self {
            z: check_non_negative("z", z)?,
        })
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    /// Time to transmit the entire load over this link.
    pub fn transfer_time(&self, intensities: &Intensities) -> f64 {
        self.z * intensities.t_cm
    }
}

/// A child processor together with the link that feeds it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Child {
    pub processor: Processor,
    pub link: Link,
}

impl Child {
    pub fn new(processor: Processor, link: Link) -> Self {
        Self { processor, link }
    }
}

/// Root processor plus ordered children. Child `i` (1-based) is
/// `children[i - 1]`; distribution follows this order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StarNetwork {
    pub root: Processor,
    pub children: Vec<Child>,
    pub intensities: Intensities,
}

impl StarNetwork {
    pub fn new(root: Processor, children: Vec<Child>, intensities: Intensities) -> Self {
        Self {
            root,
            children,
            intensities,
        }
    }

    /// Network with no children; the root processes everything.
    pub fn root_only(root: Processor, intensities: Intensities) -> Self {
        Self::new(root, Vec::new(), intensities)
    }

    /// Number of children `m`.
    pub fn child_count(&self) -> usize {
        self.children.len()
    }

    /// Number of nodes including the root, `m + 1`.
    pub fn node_count(&self) -> usize {
        self.children.len() + 1
    }

    /// Inverse computing speed of node `index` (0 = root).
    pub fn omega(&self, index: usize) -> f64 {
        if index == 0 {
            self.root.omega
        } else {
            self.children[index - 1].processor.omega
        }
    }

    pub fn label(&self, index: usize) -> &str {
        if index == 0 {
            &self.root.label
        } else {
            &self.children[index - 1].processor.label
        }
    }

    /// `omega * t_cp` for node `index` (0 = root).
    pub fn compute_time(&self, index: usize) -> f64 {
        self.omega(index) * self.intensities.t_cp
    }

    /// `z * t_cm` for child `index` (1-based). The root has no link.
    pub fn transfer_time(&self, index: usize) -> f64 {
        debug_assert!(index >= 1, "the root has no inbound link");
        self.children[index - 1].link.z * self.intensities.t_cm
    }

    /// Time for the root to process the whole load alone.
    pub fn root_only_time(&self) -> f64 {
        self.compute_time(0)
    }
}

/// The cloud, modeled as one extra processor behind its own link.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CloudSpec {
    pub processor: Processor,
    pub link: Link,
}

impl CloudSpec {
    pub fn new(omega: f64, z: f64) -> Result<Self, ModelError> {
        Ok(Self {
            processor: Processor::new("cloud", omega)?,
            link: Link::new(z)?,
        })
    }
}

/// Where the load is processed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProcessingMode {
    Local,
    Cloud,
    Combined,
}

impl ProcessingMode {
    pub const ALL: [ProcessingMode; 3] = [Self::Local, Self::Cloud, Self::Combined];

    pub fn name(self) -> &'static str {
        match self {
            Self::Local => "local",
            Self::Cloud => "cloud",
            Self::Combined => "combined",
        }
    }
}

impl fmt::Display for ProcessingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProcessingMode {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "local" => Ok(Self::Local),
            "cloud" => Ok(Self::Cloud),
            "combined" | "comb" => Ok(Self::Combined),
            _ => Err(ModelError::UnknownName {
                kind: "mode",
                value: s.to_owned(),
                expected: "local, cloud, combined",
            }),
        }
    }
}

/// Load distribution protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    /// The root sends to one child at a time; a child computes while receiving.
    #[serde(alias = "sequential_distribution")]
    Sequential,
    /// All links transmit at once; a child starts once its fragment has fully arrived.
    #[serde(alias = "staggered_start")]
    Staggered,
    /// All links transmit at once; every child computes from time zero.
    #[serde(alias = "simultaneous_start")]
    Simultaneous,
}

impl Protocol {
    pub const ALL: [Protocol; 3] = [Self::Sequential, Self::Staggered, Self::Simultaneous];

    pub fn name(self) -> &'static str {
        match self {
            Self::Sequential => "sequential",
            Self::Staggered => "staggered",
            Self::Simultaneous => "simultaneous",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Protocol {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "sequential" | "sequential_distribution" => Ok(Self::Sequential),
            "staggered" | "staggered_start" => Ok(Self::Staggered),
            "simultaneous" | "simultaneous_start" => Ok(Self::Simultaneous),
            _ => Err(ModelError::UnknownName {
                kind: "protocol",
                value: s.to_owned(),
                expected: "sequential, staggered, simultaneous",
            }),
        }
    }
}

/// Total load, parallelizable fraction, and an optional serial reference time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Workload {
    total: f64,
    f: f64,
    serial_time: Option<f64>,
}

impl Workload {
    pub fn new(total: f64, f: f64, serial_time: Option<f64>) -> Result<Self, ModelError> {
        let total = check_positive("total", total)?;
        if !(0.0..=1.0).contains(&f) {
            return Err(ModelError::OutOfUnitRange {
                field: "f".to_owned(),
                value: f,
            });
        }
        let serial_time = serial_time
            .map(|t| check_positive("serial_time", t))
            .transpose()?;
        Ok(Self {
            total,
            f,
            serial_time,
        })
    }

    /// Unit load with parallel fraction `f`.
    pub fn unit(f: f64) -> Result<Self, ModelError> {
        Self::new(1.0, f, None)
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn parallel_fraction(&self) -> f64 {
        self.f
    }

    pub fn serial_fraction(&self) -> f64 {
        1.0 - self.f
    }

    pub fn serial_time(&self) -> Option<f64> {
        self.serial_time
    }
}

/// Assemble the network for a processing mode.
///
/// `Local` returns `base` unchanged. `Cloud` keeps the root (which still
/// computes its share) and replaces all children with the cloud. `Combined`
/// inserts the cloud as the first child, ahead of the local children.
pub fn build_scenario(base: &StarNetwork, cloud: &CloudSpec, mode: ProcessingMode) -> StarNetwork {
    let cloud_child = Child::new(cloud.processor.clone(), cloud.link);
    match mode {
        ProcessingMode::Local => base.clone(),
        ProcessingMode::Cloud => {
            StarNetwork::new(base.root.clone(), vec![cloud_child], base.intensities)
        }
        ProcessingMode::Combined => {
            let mut children = Vec::with_capacity(base.children.len() + 1);
            children.push(cloud_child);
            children.extend(base.children.iter().cloned());
            StarNetwork::new(base.root.clone(), children, base.intensities)
        }
    }
}

/// Build a network whose `m` children all share `omega` and `z`.
pub fn homogeneous_network(
    m: usize,
    omega0: f64,
    omega: f64,
    z: f64,
    intensities: Intensities,
) -> Result<StarNetwork, ModelError> {
    let root = Processor::new("P0", omega0)?;
    let link = Link::new(z)?;
    let children = (1..=m)
        .map(|i| Ok(Child::new(Processor::new(format!("P{i}"), omega)?, link)))
        .collect::<Result<Vec<_>, ModelError>>()?;
    Ok(StarNetwork::new(root, children, intensities))
}

/// Which feasibility rule a child breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AssumptionRule {
    /// Sequential distribution needs `omega_i * t_cp > z_i * t_cm` so that
    /// the next child's load ratio stays positive.
    ComputeExceedsTransfer,
    /// A child that computes while receiving must not outrun its link:
    /// `z_i * t_cm <= omega_i * t_cp`.
    NoStarvation,
}

impl fmt::Display for AssumptionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ComputeExceedsTransfer => f.write_str("omega*t_cp > z*t_cm"),
            Self::NoStarvation => f.write_str("z*t_cm <= omega*t_cp"),
        }
    }
}

/// A child for which a protocol's modeling assumption fails.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionViolation {
    /// 1-based child index.
    pub child: usize,
    pub label: String,
    pub rule: AssumptionRule,
    /// `omega_i * t_cp`
    pub compute_time: f64,
    /// `z_i * t_cm`
    pub transfer_time: f64,
}

impl fmt::Display for AssumptionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "child {} ({}) violates {}: omega*t_cp = {}, z*t_cm = {}",
            self.child, self.label, self.rule, self.compute_time, self.transfer_time
        )
    }
}

/// Check the modeling assumptions a protocol relies on. An empty result
/// means the network is feasible for that protocol.
pub fn validate(net: &StarNetwork, protocol: Protocol) -> Vec<AssumptionViolation> {
    let m = net.child_count();
    let violation = |i: usize, rule| AssumptionViolation {
        child: i,
        label: net.label(i).to_owned(),
        rule,
        compute_time: net.compute_time(i),
        transfer_time: net.transfer_time(i),
    };
    match protocol {
        // The last child's ratio is never formed.
        Protocol::Sequential => (1..m)
            .filter(|&i| net.compute_time(i) <= net.transfer_time(i))
            .map(|i| violation(i, AssumptionRule::ComputeExceedsTransfer))
            .collect(),
        Protocol::Simultaneous => (1..=m)
            .filter(|&i| net.transfer_time(i) > net.compute_time(i))
            .map(|i| violation(i, AssumptionRule::NoStarvation))
            .collect(),
        Protocol::Staggered => Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn intensities() -> Intensities {
        Intensities::new(2.0, 1.0).unwrap()
    }

    #[test]
    fn rejects_bad_speeds() {
        assert!(Processor::new("p", 0.0).is_err());
        assert!(Processor::new("p", -1.0).is_err());
        assert!(Processor::new("p", f64::NAN).is_err());
        assert!(Link::new(-0.1).is_err());
        assert!(Link::new(0.0).is_ok());
        assert!(Intensities::new(0.0, 1.0).is_err());
        assert!(Intensities::new(1.0, 0.0).is_ok());
        assert!(Workload::new(1.0, 1.5, None).is_err());
        assert!(Workload::new(0.0, 0.5, None).is_err());
    }

    #[test]
    fn error_names_field() {
        let err = Processor::new("P3", -2.0).unwrap_err();
        assert_eq!(err.to_string(), "P3.omega must be positive (got -2)");
    }

    #[test]
    fn local_scenario_is_identity() {
        let base = presets::het_printed();
        let cloud = presets::cloud();
        assert_eq!(build_scenario(&base, &cloud, ProcessingMode::Local), base);
    }

    #[test]
    fn cloud_scenario_keeps_root() {
        let base = presets::het_printed();
        let net = build_scenario(&base, &presets::cloud(), ProcessingMode::Cloud);
        assert_eq!(net.root, base.root);
        assert_eq!(net.child_count(), 1);
        assert_eq!(net.omega(1), 0.3);
        assert_eq!(net.children[0].link.z(), 0.1);
    }

    #[test]
    fn combined_scenario_puts_cloud_first() {
        let base = presets::het_reconstructed();
        let cloud = presets::cloud();
        let net = build_scenario(&base, &cloud, ProcessingMode::Combined);
        assert_eq!(net.child_count(), base.child_count() + 1);
        assert_eq!(net.children[0].processor, cloud.processor);
        assert_eq!(net.children[0].link, cloud.link);
        assert_eq!(&net.children[1..], &base.children[..]);
    }

    #[test]
    fn homo_preset_is_feasible_everywhere() {
        let net = presets::homo();
        for p in Protocol::ALL {
            assert!(validate(&net, p).is_empty(), "{p}");
        }
    }

    #[test]
    fn root_only_has_no_violations() {
        let net = StarNetwork::root_only(Processor::new("P0", 1.0).unwrap(), intensities());
        for p in Protocol::ALL {
            assert!(validate(&net, p).is_empty());
        }
    }

    #[test]
    fn starving_child_is_reported() {
        // z*t_cm = omega*t_cp + 1
        let net = StarNetwork::new(
            Processor::new("P0", 1.0).unwrap(),
            vec![Child::new(
                Processor::new("P1", 1.0).unwrap(),
                Link::new(3.0).unwrap(),
            )],
            intensities(),
        );
        let v = validate(&net, Protocol::Simultaneous);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].child, 1);
        assert_eq!(v[0].rule, AssumptionRule::NoStarvation);
        assert_eq!(v[0].compute_time, 2.0);
        assert_eq!(v[0].transfer_time, 3.0);
        assert!(validate(&net, Protocol::Staggered).is_empty());
        // last child: no sequential ratio is formed from it
        assert!(validate(&net, Protocol::Sequential).is_empty());
    }

    #[test]
    fn equality_boundary_differs_by_protocol() {
        // omega*t_cp == z*t_cm on child 1 of 2
        let net = homogeneous_network(2, 1.0, 1.0, 2.0, intensities()).unwrap();
        let seq = validate(&net, Protocol::Sequential);
        assert_eq!(seq.len(), 1);
        assert_eq!(seq[0].child, 1);
        assert!(validate(&net, Protocol::Simultaneous).is_empty());
    }

    #[test]
    fn homogeneous_constructor() {
        let net = homogeneous_network(4, 3.0, 3.0, 0.1, intensities()).unwrap();
        assert_eq!(net, presets::homo());
        let empty = homogeneous_network(0, 1.0, 1.0, 0.0, intensities()).unwrap();
        assert_eq!(empty.child_count(), 0);
        assert!(homogeneous_network(2, 1.0, 0.0, 0.5, intensities()).is_err());
        let pair = homogeneous_network(2, 2.0, 4.0, 0.5, intensities()).unwrap();
        let mut swapped = pair.children.clone();
        swapped.swap(0, 1);
        let params = |c: &[Child]| {
            c.iter()
                .map(|c| (c.processor.omega(), c.link.z()))
                .collect::<Vec<_>>()
        };
        assert_eq!(params(&swapped), params(&pair.children));
    }

    #[test]
    fn names_round_trip() {
        for m in ProcessingMode::ALL {
            assert_eq!(m.name().parse::<ProcessingMode>().unwrap(), m);
        }
        for p in Protocol::ALL {
            assert_eq!(p.name().parse::<Protocol>().unwrap(), p);
        }
        assert!("mesh".parse::<Protocol>().is_err());
    }
}
