//! JSON scenario configuration.
//!
//! ```json
//! { "t_cp": 2, "t_cm": 1, "root": {"omega": 2},
//!   "children": [{"omega": 4, "z": 1.5}],
//!   "cloud": {"omega": 0.3, "z": 0.1},
//!   "mode": "combined", "protocol": "sequential" }
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    build_scenario, Child, CloudSpec, Intensities, Link, ModelError, ProcessingMode, Processor,
    Protocol, StarNetwork,
};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid scenario config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid scenario config: {0}")]
    Invalid(#[from] ModelError),
    #[error("mode `{0}` requires a `cloud` entry in the config")]
    MissingCloud(ProcessingMode),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeConfig {
    pub omega: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChildConfig {
    pub omega: f64,
    pub z: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CloudConfig {
    pub omega: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub t_cp: f64,
    pub t_cm: f64,
    pub root: NodeConfig,
    #[serde(default)]
    pub children: Vec<ChildConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cloud: Option<CloudConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ProcessingMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocol: Option<Protocol>,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// The local network described by `root` and `children`.
    pub fn base_network(&self) -> Result<StarNetwork, ConfigError> {
        let intensities = Intensities::new(self.t_cp, self.t_cm)?;
        let root_label = self.root.label.clone().unwrap_or_else(|| "P0".to_owned());
        let root = Processor::new(root_label, self.root.omega).map_err(|e| rename(e, "root"))?;
        let children = self
            .children
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let field = format!("children[{i}]");
                let label = c.label.clone().unwrap_or_else(|| format!("P{}", i + 1));
                let processor = Processor::new(label, c.omega).map_err(|e| rename(e, &field))?;
                let link = Link::new(c.z).map_err(|e| rename(e, &field))?;
                Ok(Child::new(processor, link))
            })
            .collect::<Result<Vec<_>, ConfigError>>()?;
        Ok(StarNetwork::new(root, children, intensities))
    }

    pub fn cloud_spec(&self) -> Result<Option<CloudSpec>, ConfigError> {
        self.cloud
            .as_ref()
            .map(|c| CloudSpec::new(c.omega, c.z).map_err(|e| rename(e, "cloud")))
            .transpose()
    }

    /// The network for `mode` (falling back to the config's own mode, then `Local`).
    pub fn scenario(&self, mode: Option<ProcessingMode>) -> Result<StarNetwork, ConfigError> {
        let mode = mode.or(self.mode).unwrap_or(ProcessingMode::Local);
        let base = self.base_network()?;
        match (mode, self.cloud_spec()?) {
            (ProcessingMode::Local, _) => Ok(base),
            (mode, Some(cloud)) => Ok(build_scenario(&base, &cloud, mode)),
            (mode, None) => Err(ConfigError::MissingCloud(mode)),
        }
    }
}

// Rewrites the field name in a model error so diagnostics point at the config path.
fn rename(err: ModelError, prefix: &str) -> ConfigError {
    let fix = |field: String| {
        let leaf = field.rsplit('.').next().unwrap_or(&field).to_owned();
        format!("{prefix}.{leaf}")
    };
    ConfigError::Invalid(match err {
        ModelError::NotPositive { field, value } => ModelError::NotPositive {
            field: fix(field),
            value,
        },
        ModelError::Negative { field, value } => ModelError::Negative {
            field: fix(field),
            value,
        },
        ModelError::NotFinite { field, value } => ModelError::NotFinite {
            field: fix(field),
            value,
        },
        other => other,
    })
}
