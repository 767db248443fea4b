//! JSON file formats.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::host::{HostGraph, Instance, MetricStatus};
use crate::network::{Network, NetworkFile};
use crate::scalar::Scalar;

pub const INSTANCE_VERSION: u32 = 1;

/// `{ "version": 1, "n": 3, "alpha": "p/q", "weights": [[...]], "metric_hint": true }`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub version: u32,
    pub n: usize,
    pub alpha: Scalar,
    pub weights: Vec<Vec<Scalar>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric_hint: Option<bool>,
}

impl From<&Instance> for InstanceFile {
    fn from(inst: &Instance) -> Self {
        let metric_hint = match inst.host.metric_status() {
            MetricStatus::Metric => Some(true),
            MetricStatus::NonMetric => Some(false),
            MetricStatus::Unchecked => None,
        };
        InstanceFile {
            version: INSTANCE_VERSION,
            n: inst.n(),
            alpha: inst.alpha_scalar(),
            weights: inst
                .host
                .rows()
                .into_iter()
                .map(|row| row.into_iter().map(Scalar::Finite).collect())
                .collect(),
            metric_hint,
        }
    }
}

impl InstanceFile {
    /// Validates the file. A metric hint is re-checked, never trusted.
    pub fn to_instance(&self) -> Result<Instance, Error> {
        if self.version != INSTANCE_VERSION {
            return Err(Error::Parse(format!("unsupported instance version {}", self.version)));
        }
        if self.weights.len() != self.n {
            return Err(Error::NodeCountMismatch { expected: self.n, got: self.weights.len() });
        }
        let mut host = HostGraph::from_scalars(self.weights.clone())?;
        if let Some(hint) = self.metric_hint {
            let report = host.check_metric();
            if hint && !report.is_metric {
                return Err(Error::NotMetric);
            }
        }
        let alpha = self.alpha.as_rational().cloned().ok_or(Error::InvalidAlpha)?;
        Instance::new(host, alpha)
    }
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T, Error> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("file types always serialize")
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    from_json(&text)
}

pub fn read_instance(path: &Path) -> Result<Instance, Error> {
    read_json::<InstanceFile>(path)?.to_instance()
}

pub fn read_network(path: &Path, n: usize) -> Result<Network, Error> {
    read_json::<NetworkFile>(path)?.into_network(n)
}
