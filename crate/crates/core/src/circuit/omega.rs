//! Sampling plans and randomly dressed layered circuits.

use serde::{Deserialize, Serialize};

use super::layer::Layer;
use super::sampler::{sample_single_qubit_layer, EdgeGrabSampler};
use crate::error::{CoreError, Result};
use crate::seed::{rng_for, Stream};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingPlan {
    pub depths: Vec<u32>,
    pub n_circuits: usize,
    pub n_w: usize,
    pub n_meas: u64,
    /// Median-of-means group count.
    pub k: usize,
    /// Two-qubit gate density.
    pub xi: f64,
    pub master_seed: u64,
    /// Enumerate every local-Clifford `W` (`n_w` must be `24ⁿ`) instead of sampling.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub exhaustive_w: bool,
}

impl SamplingPlan {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(CoreError::InvalidCircuit(msg));
        if self.depths.is_empty() {
            return bad("plan.depths is empty".into());
        }
        if self.depths.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!("plan.depths must be strictly increasing, got {:?}", self.depths));
        }
        for (name, v) in [("n_circuits", self.n_circuits), ("n_w", self.n_w), ("k", self.k)] {
            if v == 0 {
                return bad(format!("plan.{name} must be at least 1"));
            }
        }
        if self.n_meas == 0 {
            return bad("plan.n_meas must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.xi) {
            return bad(format!("plan.xi = {} is outside [0, 1]", self.xi));
        }
        if self.k > self.n_circuits * self.n_w {
            return bad(format!(
                "plan.k = {} exceeds the {} (circuit, W) pairs per depth",
                self.k,
                self.n_circuits * self.n_w
            ));
        }
        Ok(())
    }

    /// [`validate`](Self::validate) plus the checks that depend on the register size.
    pub fn validate_for(&self, n: usize) -> Result<()> {
        self.validate()?;
        if self.exhaustive_w {
            let full = exhaustive_w_count(n);
            if full != Some(self.n_w) {
                return Err(CoreError::InvalidCircuit(format!(
                    "plan.exhaustive_w needs n_w = 24^{n}, got n_w = {}",
                    self.n_w
                )));
            }
        }
        Ok(())
    }

    /// Records per depth.
    pub fn variants_per_depth(&self) -> usize {
        self.n_circuits * self.n_w
    }
}

/// `24ⁿ`, or `None` past four qubits.
pub fn exhaustive_w_count(n: usize) -> Option<usize> {
    (n <= 4).then(|| 24usize.pow(n as u32))
}

/// The `w_id`-th local-Clifford layer in base-24 order, qubit 0 most significant.
pub fn enumerated_w_layer(n: usize, w_id: usize) -> Result<Layer> {
    match exhaustive_w_count(n) {
        Some(total) if w_id < total => {}
        _ => return Err(CoreError::InvalidCircuit(format!("no enumerated W layer {w_id} on {n} qubits"))),
    }
    let mut idx = vec![0u8; n];
    let mut rest = w_id;
    for q in (0..n).rev() {
        idx[q] = (rest % 24) as u8;
        rest /= 24;
    }
    Layer::single_qubit(&idx)
}

/// `W · L_m ⋯ L_1 · V` for one `(m, circuit_id, w_id)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaCircuit {
    pub n: usize,
    pub m: u32,
    pub circuit_id: usize,
    pub w_id: usize,
    /// Master seed the circuit was derived from.
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
    pub v_layer: Layer,
    pub layers: Vec<Layer>,
    pub w_layer: Layer,
}

impl OmegaCircuit {
    pub fn validate(&self) -> Result<()> {
        if self.layers.len() != self.m as usize {
            return Err(CoreError::InvalidCircuit(format!(
                "depth {} but {} layers",
                self.m,
                self.layers.len()
            )));
        }
        self.v_layer.validate_single_qubit_cover(self.n)?;
        self.w_layer.validate_single_qubit_cover(self.n)?;
        for l in &self.layers {
            l.validate(self.n)?;
        }
        Ok(())
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("circuit serializes")
    }

    /// Parses one record and checks its invariants.
    pub fn from_json_line(line: &str) -> Result<Self> {
        let c: Self =
            serde_json::from_str(line).map_err(|e| CoreError::InvalidCircuit(format!("malformed circuit record: {e}")))?;
        c.validate()?;
        Ok(c)
    }

    pub fn key(&self) -> (u32, usize, usize) {
        (self.m, self.circuit_id, self.w_id)
    }
}

/// Samples the circuit for `(m, circuit_id, w_id)`. `V` and the body depend
/// only on `(master_seed, m, circuit_id)`, so every `W` of a circuit shares them.
pub fn sample_omega_circuit(
    plan: &SamplingPlan,
    sampler: &EdgeGrabSampler,
    m: u32,
    circuit_id: usize,
    w_id: usize,
) -> Result<OmegaCircuit> {
    if !plan.depths.contains(&m) {
        return Err(CoreError::InvalidCircuit(format!("depth {m} is not in the plan")));
    }
    let n = sampler.topology().n();
    let mut body_rng = rng_for(plan.master_seed, Stream::CircuitBody, &[m as u64, circuit_id as u64]);
    let v_layer = sample_single_qubit_layer(n, &mut body_rng);
    let layers = (0..m).map(|_| sampler.sample(&mut body_rng)).collect();
    let w_layer = if plan.exhaustive_w {
        enumerated_w_layer(n, w_id)?
    } else {
        let mut w_rng = rng_for(
            plan.master_seed,
            Stream::MeasurementLayer,
            &[m as u64, circuit_id as u64, w_id as u64],
        );
        sample_single_qubit_layer(n, &mut w_rng)
    };
    Ok(OmegaCircuit {
        n,
        m,
        circuit_id,
        w_id,
        seed: plan.master_seed,
        config_hash: None,
        v_layer,
        layers,
        w_layer,
    })
}

/// Every circuit of the plan, ordered by depth, then circuit, then `W`.
pub fn sample_plan(plan: &SamplingPlan, sampler: &EdgeGrabSampler) -> Result<Vec<OmegaCircuit>> {
    plan.validate_for(sampler.topology().n())?;
    let mut out = Vec::with_capacity(plan.depths.len() * plan.variants_per_depth());
    for &m in &plan.depths {
        for cid in 0..plan.n_circuits {
            for wid in 0..plan.n_w {
                out.push(sample_omega_circuit(plan, sampler, m, cid, wid)?);
            }
        }
    }
    Ok(out)
}
