//! Experiment configuration (TOML) and its resolved form.

use std::path::{Path, PathBuf};

use coherence_core::circuit::omega::SamplingPlan;
use coherence_core::circuit::sampler::EdgeGrabSampler;
use coherence_core::circuit::topology::Topology;
use coherence_core::estimate::KernelMethod;
use coherence_core::quantum::metrics::DEFAULT_CLASSIFY_TOLERANCE;
use coherence_core::sim::NoiseModel;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{as_config, HarnessError, Result};

/// Device connectivity: a named preset or an explicit edge list.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologySpec {
    /// `star5`, `grid20` or `line_<n>`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub edges: Vec<(usize, usize)>,
}

impl TopologySpec {
    pub fn preset(name: &str) -> Self {
        Self {
            preset: Some(name.into()),
            ..Self::default()
        }
    }

    pub fn resolve(&self) -> Result<Topology> {
        match (&self.preset, self.n) {
            (Some(name), None) if self.edges.is_empty() => Topology::preset(name).map_err(as_config),
            (None, Some(n)) => Topology::new(n, self.edges.iter().copied()).map_err(as_config),
            _ => Err(HarnessError::Config(
                "topology needs either `preset` alone or `n` with optional `edges`".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdealMode {
    /// Noiseless distributions from the statevector.
    #[default]
    Exact,
    /// Noiseless distributions estimated from `n_meas` simulated shots.
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelChoice {
    #[default]
    Auto,
    Sparse,
    Dense,
    Transform,
}

impl From<KernelChoice> for KernelMethod {
    fn from(k: KernelChoice) -> Self {
        match k {
            KernelChoice::Auto => KernelMethod::Auto,
            KernelChoice::Sparse => KernelMethod::Sparse,
            KernelChoice::Dense => KernelMethod::DensePairs,
            KernelChoice::Transform => KernelMethod::Transform,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementOptions {
    /// Store exact outcome distributions instead of sampling shots.
    #[serde(default)]
    pub exact: bool,
    #[serde(default)]
    pub ideal: IdealMode,
}

impl Default for MeasurementOptions {
    fn default() -> Self {
        Self {
            exact: false,
            ideal: IdealMode::Exact,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisOptions {
    #[serde(default)]
    pub kernel: KernelChoice,
    #[serde(default = "default_replicas")]
    pub bootstrap_replicas: usize,
    #[serde(default = "default_tolerance")]
    pub classify_tolerance: f64,
}

fn default_replicas() -> usize {
    coherence_core::estimate::fit::DEFAULT_BOOTSTRAP_REPLICAS
}

fn default_tolerance() -> f64 {
    DEFAULT_CLASSIFY_TOLERANCE
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            kernel: KernelChoice::Auto,
            bootstrap_replicas: default_replicas(),
            classify_tolerance: default_tolerance(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleOptions {
    /// Circuits per depth for the exact purity/fidelity averages.
    #[serde(default = "default_oracle_circuits")]
    pub circuits: usize,
    /// Sampled layers averaged into the effective per-layer noise channel.
    #[serde(default = "default_layer_samples")]
    pub layer_samples: usize,
    /// Circuit bodies per depth for the scrambling table; 0 disables it.
    #[serde(default = "default_scrambling_samples")]
    pub scrambling_samples: usize,
}

fn default_oracle_circuits() -> usize {
    50
}

fn default_layer_samples() -> usize {
    200
}

fn default_scrambling_samples() -> usize {
    200
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            circuits: default_oracle_circuits(),
            layer_samples: default_layer_samples(),
            scrambling_samples: default_scrambling_samples(),
        }
    }
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("run")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub topology: TopologySpec,
    /// Physical qubits to use, in order; all qubits when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubits: Option<Vec<usize>>,
    pub plan: SamplingPlan,
    #[serde(default)]
    pub noise: NoiseModel,
    #[serde(default)]
    pub measurement: MeasurementOptions,
    #[serde(default)]
    pub analysis: AnalysisOptions,
    #[serde(default)]
    pub oracle: OracleOptions,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            HarnessError::Config(msg) => HarnessError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// SHA-256 of the canonical JSON form, ignoring `output_dir`.
    pub fn hash(&self) -> String {
        let mut value = serde_json::to_value(self).expect("config serializes");
        if let Some(map) = value.as_object_mut() {
            map.remove("output_dir");
        }
        let canonical = serde_json::to_vec(&value).expect("value serializes");
        hex::encode(Sha256::digest(canonical))
    }

    pub fn resolve(self) -> Result<Resolved> {
        let device = self.topology.resolve()?;
        let topology = match &self.qubits {
            Some(q) => device.induced(q).map_err(as_config)?,
            None => device,
        };
        if topology.n() == 0 {
            return Err(HarnessError::Config("the register has no qubits".into()));
        }
        self.plan.validate_for(topology.n()).map_err(as_config)?;
        self.noise.validate(topology.n()).map_err(as_config)?;
        let tol = self.analysis.classify_tolerance;
        if !(tol >= 0.0) {
            return Err(HarnessError::Config(format!("analysis.classify_tolerance = {tol} must be >= 0")));
        }
        let sampler = EdgeGrabSampler::new(&topology, self.plan.xi).map_err(as_config)?;
        let hash = self.hash();
        Ok(Resolved {
            config: self,
            topology,
            sampler,
            hash,
        })
    }
}

/// A validated configuration with its derived objects.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: ExperimentConfig,
    pub topology: Topology,
    pub sampler: EdgeGrabSampler,
    pub hash: String,
}

impl Resolved {
    pub fn n(&self) -> usize {
        self.topology.n()
    }

    pub fn out_dir(&self) -> &Path {
        &self.config.output_dir
    }

    /// Warnings about sampler clamping and unchecked noise assumptions.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.sampler.clamped() {
            w.push(format!(
                "two-qubit density xi = {} is not reachable on this topology; achieved density is {:.4}",
                self.config.plan.xi,
                self.sampler.achieved_density()
            ));
        }
        w.extend(self.config.noise.assumption_warnings());
        w
    }
}
