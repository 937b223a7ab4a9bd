//! Bundled parameter sets.
//!
//! Both networks use `t_cp = 2`, `t_cm = 1` and share one cloud node
//! (`omega = 0.3`, `z = 0.1`). The heterogeneous network ships in two link
//! orderings that differ only in the `z` values of children 3 and 4.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::model::{Child, CloudSpec, Intensities, Link, ModelError, Processor, StarNetwork};

fn network(omega0: f64, children: &[(f64, f64)]) -> StarNetwork {
    let intensities = Intensities::new(2.0, 1.0).expect("preset intensities are valid");
    let root = Processor::new("P0", omega0).expect("preset root is valid");
    let children = children
        .iter()
        .enumerate()
        .map(|(i, &(omega, z))| {
            Child::new(
                Processor::new(format!("P{}", i + 1), omega).expect("preset child is valid"),
                Link::new(z).expect("preset link is valid"),
            )
        })
        .collect();
    StarNetwork::new(root, children, intensities)
}

/// Heterogeneous network with links as listed in the parameter table:
/// `z = (1.5, 2.2, 5, 3)`.
pub fn het_printed() -> StarNetwork {
    network(2.0, &[(4.0, 1.5), (5.0, 2.2), (6.0, 5.0), (7.0, 3.0)])
}

/// Heterogeneous network with the last two links swapped:
/// `z = (1.5, 2.2, 3, 5)`. This ordering reproduces the sequential
/// distribution results.
pub fn het_reconstructed() -> StarNetwork {
    network(2.0, &[(4.0, 1.5), (5.0, 2.2), (6.0, 3.0), (7.0, 5.0)])
}

/// Four identical children, `omega = 3`, `z = 0.1`, root `omega0 = 3`.
pub fn homo() -> StarNetwork {
    network(3.0, &[(3.0, 0.1); 4])
}

pub fn cloud() -> CloudSpec {
    CloudSpec::new(0.3, 0.1).expect("preset cloud is valid")
}

/// Name-addressable presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    HetPrinted,
    HetReconstructed,
    Homo,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Self::HetPrinted, Self::HetReconstructed, Self::Homo];

    pub fn name(self) -> &'static str {
        match self {
            Self::HetPrinted => "het-printed",
            Self::HetReconstructed => "het-reconstructed",
            Self::Homo => "homo",
        }
    }

    pub fn network(self) -> StarNetwork {
        match self {
            Self::HetPrinted => het_printed(),
            Self::HetReconstructed => het_reconstructed(),
            Self::Homo => homo(),
        }
    }

    pub fn cloud(self) -> CloudSpec {
        cloud()
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "het-printed" => Ok(Self::HetPrinted),
            "het-reconstructed" | "het" => Ok(Self::HetReconstructed),
            "homo" => Ok(Self::Homo),
            _ => Err(ModelError::UnknownName {
                kind: "preset",
                value: s.to_owned(),
                expected: "het-printed, het-reconstructed, homo",
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orderings_differ_only_in_last_two_links() {
        let a = het_printed();
        let b = het_reconstructed();
        assert_eq!(a.root, b.root);
        for i in 0..4 {
            assert_eq!(a.children[i].processor, b.children[i].processor);
        }
        assert_eq!(a.children[2].link.z(), b.children[3].link.z());
        assert_eq!(a.children[3].link.z(), b.children[2].link.z());
    }

    #[test]
    fn lookup_by_name() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!("mesh".parse::<Preset>().is_err());
    }
}
