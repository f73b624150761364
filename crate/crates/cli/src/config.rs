//! JSON run configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use dqsim_core::lcu::RoMode;
use dqsim_core::qnet::{NetworkTopology, TopologySpec};
use dqsim_core::ts::TsMode;
use dqsim_core::{Error, OperatorSum, QubitPartition, Result, TermSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    Dpf,
    Dts,
    Dqsp,
    Dqpe,
    Dgrover,
}

impl Protocol {
    pub fn as_str(self) -> &'static str {
        match self {
            Protocol::Dpf => "dpf",
            Protocol::Dts => "dts",
            Protocol::Dqsp => "dqsp",
            Protocol::Dqpe => "dqpe",
            Protocol::Dgrover => "dgrover",
        }
    }
}

/// An integer or the string `"auto"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AutoOr {
    Fixed(usize),
    Auto(AutoTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoTag {
    Auto,
}

impl Default for AutoOr {
    fn default() -> Self {
        AutoOr::Auto(AutoTag::Auto)
    }
}

impl AutoOr {
    pub fn fixed(self) -> Option<usize> {
        match self {
            AutoOr::Fixed(v) => Some(v),
            AutoOr::Auto(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub protocol: Protocol,
    #[serde(default)]
    pub hamiltonian: Vec<TermSpec>,
    /// Qubit groups, one per node.
    #[serde(default)]
    pub partition: Vec<Vec<usize>>,
    /// Star over the partition's nodes when absent.
    #[serde(default)]
    pub topology: Option<TopologySpec>,
    #[serde(default)]
    pub t: Option<f64>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    /// Product-formula order.
    #[serde(default)]
    pub p: Option<usize>,
    /// Trotter steps.
    #[serde(default)]
    pub r: AutoOr,
    /// Taylor truncation order.
    #[serde(default, rename = "K")]
    pub k: AutoOr,
    #[serde(default)]
    pub ro_mode: RoMode,
    #[serde(default)]
    pub kappa: Option<f64>,
    /// Phase sidecar to read, or to write after solving when missing.
    #[serde(default)]
    pub sidecar: Option<PathBuf>,
    /// Eigenphase `θ` of the phase-estimation test unitary.
    #[serde(default)]
    pub theta: Option<f64>,
    #[serde(default)]
    pub k_bits: Option<usize>,
    #[serde(default)]
    pub gamma: Option<usize>,
    #[serde(default)]
    pub n_per_node: Option<usize>,
    #[serde(default)]
    pub marked: Option<usize>,
    #[serde(default)]
    pub iterations: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }

    pub fn require<T: Copy>(&self, field: &str, v: Option<T>) -> Result<T> {
        v.ok_or_else(|| Error::Config(format!("{} config needs \"{field}\"", self.protocol.as_str())))
    }

    pub fn operator(&self) -> Result<OperatorSum> {
        if self.hamiltonian.is_empty() {
            return Err(Error::Config("config needs a non-empty \"hamiltonian\"".into()));
        }
        OperatorSum::from_specs(&self.hamiltonian)
    }

    /// Explicit groups, or one node holding every qubit.
    pub fn qubit_partition(&self, n: usize) -> Result<QubitPartition> {
        if self.partition.is_empty() {
            return Ok(QubitPartition::single(n));
        }
        let part = QubitPartition::from_groups(&self.partition)?;
        if part.qubit_count() != n {
            return Err(Error::Config(format!(
                "partition covers {} qubits but the Hamiltonian has {n}",
                part.qubit_count()
            )));
        }
        Ok(part)
    }

    pub fn network(&self, gamma: usize) -> Result<NetworkTopology> {
        match &self.topology {
            None => Ok(NetworkTopology::star(gamma)),
            Some(spec) => {
                if spec.gamma != gamma {
                    return Err(Error::Config(format!(
                        "topology has Γ = {} but the partition has {gamma} nodes",
                        spec.gamma
                    )));
                }
                NetworkTopology::from_spec(spec)
            }
        }
    }

    pub fn ts_mode(&self) -> TsMode {
        match self.ro_mode {
            RoMode::Direct => TsMode::Direct,
            RoMode::Strict => TsMode::Strict,
        }
    }
}
