//! Exact reference values for a configuration: channel metrics of the
//! effective per-layer noise, exact per-depth purity/fidelity averages, and
//! the scrambling table. Used to check what the estimators report.

use std::path::Path;

use coherence_core::circuit::ideal::{body_unitary, ideal_state, layers_unitary};
use coherence_core::circuit::omega::{sample_omega_circuit, SamplingPlan};
use coherence_core::estimate::{fit_decay, DecayFit, EstimateKind};
use coherence_core::linalg::{c, CMatrix};
use coherence_core::quantum::channel::{ChannelDocument, Ptm, QuantumChannel};
use coherence_core::quantum::design::scrambling_score;
use coherence_core::quantum::metrics::{pauli_unitarity_bounds, ChannelMetrics, CoherenceRegion};
use coherence_core::quantum::pauli::{all_paulis, pauli_matrix, PauliString};
use coherence_core::quantum::twirl::{pauli_twirl_exact, MAX_EXACT_TWIRL_QUBITS};
use coherence_core::seed::{derive_seed, rng_for, Stream};
use coherence_core::sim::{noisy_layer_apply, simulate_circuit, DensityMatrix};
use coherence_core::{CoreError, MAX_PTM_QUBITS};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Resolved;
use crate::error::{HarnessError, Result};
use crate::manifest::check_hash;
use crate::pipeline::{load_estimates, MAX_SIMULATION_QUBITS};
use crate::store;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelOracle {
    pub metrics: ChannelMetrics,
    pub bound_lower: f64,
    pub bound_upper: f64,
    pub region: CoherenceRegion,
    /// The exact Pauli twirl of the channel and its verdict.
    pub twirled: ChannelMetrics,
    pub twirled_region: CoherenceRegion,
}

pub fn channel_oracle(ch: &QuantumChannel, tol: f64) -> Result<ChannelOracle> {
    let metrics = ChannelMetrics::of(ch)?;
    let iv = pauli_unitarity_bounds(metrics.avg_fidelity, ch.n())?;
    let twirled = ChannelMetrics::of(&pauli_twirl_exact(ch)?.to_channel()?)?;
    let tw_iv = pauli_unitarity_bounds(twirled.avg_fidelity, ch.n())?;
    Ok(ChannelOracle {
        metrics,
        bound_lower: iv.lower,
        bound_upper: iv.upper,
        region: iv.classify(metrics.unitarity, tol),
        twirled,
        twirled_region: tw_iv.classify(twirled.unitarity, tol),
    })
}

pub fn channel_oracle_from_file(path: &Path, tol: f64) -> Result<ChannelOracle> {
    let doc: ChannelDocument = store::read_json(path)?;
    let ch = doc.to_channel().map_err(|e| HarnessError::Data(format!("{}: {e}", path.display())))?;
    channel_oracle(&ch, tol)
}

/// Average over sampled layers `L` of the noise map `Ẽ_L ∘ U_L†`, where `Ẽ_L`
/// is the simulated noisy layer, built column by column in the Pauli basis.
pub fn effective_layer_channel(run: &Resolved, samples: usize) -> Result<QuantumChannel> {
    let n = run.n();
    if n > MAX_EXACT_TWIRL_QUBITS {
        return Err(CoreError::CapExceeded {
            what: "effective layer channel",
            n,
            cap: MAX_EXACT_TWIRL_QUBITS,
        }
        .into());
    }
    if samples == 0 {
        return Err(HarnessError::Config("oracle.layer_samples must be at least 1".into()));
    }
    let noise = run.config.noise.compile(n)?;
    let d = 1usize << n;
    let dd = d * d;
    let paulis = all_paulis(n).map(|p| pauli_matrix(&p)).collect::<std::result::Result<Vec<_>, _>>()?;
    let eye = CMatrix::identity(d, d);
    let seed = run.config.plan.master_seed;
    let sum = (0..samples)
        .into_par_iter()
        .map(|s| -> Result<Ptm> {
            let mut rng = rng_for(seed, Stream::Oracle, &[0, s as u64]);
            let layer = run.sampler.sample(&mut rng);
            let u = layers_unitary(n, [&layer])?;
            // Outputs on the states 𝟙/d and (𝟙 + P_b)/d, pulled back through the ideal layer.
            let outputs = paulis
                .iter()
                .enumerate()
                .map(|(b, p)| {
                    let state = if b == 0 { eye.clone() } else { &eye + p } * c(1.0 / d as f64, 0.0);
                    let mut rho = DensityMatrix::from_matrix(u.adjoint() * state * &u)?;
                    noisy_layer_apply(&mut rho, &layer, &noise)?;
                    Ok(rho.into_matrix())
                })
                .collect::<Result<Vec<_>>>()?;
            let scale = c(d as f64, 0.0);
            let mut ptm = Ptm::zeros(dd, dd);
            for b in 0..dd {
                let image = if b == 0 { &outputs[0] * scale } else { (&outputs[b] - &outputs[0]) * scale };
                for (a, pa) in paulis.iter().enumerate() {
                    ptm[(a, b)] = (pa * &image).trace().re / d as f64;
                }
            }
            Ok(ptm)
        })
        .try_reduce(|| Ptm::zeros(dd, dd), |a, b| Ok(a + b))?;
    Ok(QuantumChannel::from_ptm(n, &(sum / samples as f64))?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DepthOracle {
    pub m: u32,
    /// Mean of `tr ρ_m²` over the circuits.
    pub purity: f64,
    /// Mean of `⟨ψ_m|ρ_m|ψ_m⟩`.
    pub fidelity: f64,
    pub circuits: usize,
}

/// Exact averages over the first `circuits` planned bodies at every depth.
/// Uses the same circuits as the experiment, so the values pair with its estimates.
pub fn depth_oracle(run: &Resolved, circuits: usize) -> Result<Vec<DepthOracle>> {
    let n = run.n();
    if n > MAX_SIMULATION_QUBITS {
        return Err(CoreError::CapExceeded {
            what: "depth oracle",
            n,
            cap: MAX_SIMULATION_QUBITS,
        }
        .into());
    }
    if circuits == 0 {
        return Err(HarnessError::Config("oracle.circuits must be at least 1".into()));
    }
    let noise = run.config.noise.compile(n)?;
    let plan = &run.config.plan;
    plan.depths
        .iter()
        .map(|&m| {
            let vals = (0..circuits)
                .into_par_iter()
                .map(|cid| -> Result<(f64, f64)> {
                    let circ = sample_omega_circuit(plan, &run.sampler, m, cid, 0)?;
                    let rho = simulate_circuit(&circ, &noise)?;
                    let psi = ideal_state(&circ)?;
                    Ok((rho.purity(), rho.overlap(&psi)))
                })
                .collect::<Result<Vec<_>>>()?;
            let k = vals.len() as f64;
            Ok(DepthOracle {
                m,
                purity: vals.iter().map(|v| v.0).sum::<f64>() / k,
                fidelity: vals.iter().map(|v| v.1).sum::<f64>() / k,
                circuits: vals.len(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScramblingRow {
    pub m: u32,
    pub pauli: String,
    pub pauli_prime: String,
    pub score: f64,
    /// `score − 4⁻ⁿ`.
    pub excess: f64,
    pub samples: usize,
}

fn single_site(n: usize, q: usize, ch: char) -> String {
    (0..n).map(|i| if i == q { ch } else { 'I' }).collect()
}

/// Scrambling scores of the body ensemble at every planned depth, for a
/// local-to-local and a local-to-far Pauli pair.
pub fn scrambling_table(run: &Resolved, samples: usize) -> Result<Vec<ScramblingRow>> {
    let n = run.n();
    if n > MAX_PTM_QUBITS {
        return Err(CoreError::CapExceeded {
            what: "scrambling table",
            n,
            cap: MAX_PTM_QUBITS,
        }
        .into());
    }
    let plan = SamplingPlan {
        n_circuits: samples,
        n_w: 1,
        k: 1,
        exhaustive_w: false,
        master_seed: derive_seed(run.config.plan.master_seed, Stream::Scrambling, &[]),
        ..run.config.plan.clone()
    };
    let pairs = [
        (single_site(n, 0, 'Z'), single_site(n, 0, 'Z')),
        (single_site(n, 0, 'Z'), single_site(n, n - 1, 'X')),
    ];
    let mut rows = Vec::new();
    for &m in &plan.depths {
        let unitaries = (0..samples)
            .into_par_iter()
            .map(|cid| Ok(body_unitary(&sample_omega_circuit(&plan, &run.sampler, m, cid, 0)?)?))
            .collect::<Result<Vec<_>>>()?;
        for (p, q) in &pairs {
            let s = scrambling_score(&unitaries, &PauliString::from_label(p)?, &PauliString::from_label(q)?)?;
            rows.push(ScramblingRow {
                m,
                pauli: p.clone(),
                pauli_prime: q.clone(),
                score: s.score,
                excess: s.excess,
                samples: s.samples,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub m: u32,
    pub kind: EstimateKind,
    pub oracle: f64,
    pub estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub config_hash: String,
    pub n: usize,
    pub layer_channel: Option<ChannelOracle>,
    pub depths: Vec<DepthOracle>,
    pub purity_fit: Option<DecayFit>,
    pub fidelity_fit: Option<DecayFit>,
    /// Oracle values beside the pipeline's estimates, when those exist.
    pub comparison: Vec<Comparison>,
    pub scrambling: Vec<ScramblingRow>,
    pub warnings: Vec<String>,
}

/// Every oracle that fits under its cap; the rest are skipped with a warning.
pub fn oracle(run: &Resolved) -> Result<OracleReport> {
    let opts = &run.config.oracle;
    let n = run.n();
    let mut warnings = run.warnings();
    let mut skip = |what: &str, e: HarnessError| -> Result<()> {
        match e {
            HarnessError::Core(ref c) if c.is_cap() => {
                warnings.push(format!("{what} skipped: {e}"));
                Ok(())
            }
            other => Err(other),
        }
    };

    let layer_channel = match effective_layer_channel(run, opts.layer_samples)
        .and_then(|ch| channel_oracle(&ch, run.config.analysis.classify_tolerance))
    {
        Ok(o) => Some(o),
        Err(e) => {
            skip("layer channel", e)?;
            None
        }
    };
    let depths = match depth_oracle(run, opts.circuits) {
        Ok(d) => d,
        Err(e) => {
            skip("depth averages", e)?;
            Vec::new()
        }
    };
    let scrambling = if opts.scrambling_samples == 0 {
        Vec::new()
    } else {
        match scrambling_table(run, opts.scrambling_samples) {
            Ok(t) => t,
            Err(e) => {
                skip("scrambling table", e)?;
                Vec::new()
            }
        }
    };

    let fit_kind = |kind: EstimateKind, warnings: &mut Vec<String>| -> Option<DecayFit> {
        let pts: Vec<(u32, f64)> = depths
            .iter()
            .map(|d| (d.m, if kind == EstimateKind::Purity { d.purity } else { d.fidelity }))
            .collect();
        if pts.is_empty() {
            return None;
        }
        fit_decay(&pts, n, kind)
            .map_err(|e| warnings.push(format!("oracle {kind} fit: {e}")))
            .ok()
    };
    let purity_fit = fit_kind(EstimateKind::Purity, &mut warnings);
    let fidelity_fit = fit_kind(EstimateKind::Fidelity, &mut warnings);

    let dir = run.out_dir();
    let mut comparison = Vec::new();
    if store::path(dir, store::ESTIMATES).exists() {
        for r in load_estimates(dir, &run.hash)? {
            if let Some(d) = depths.iter().find(|d| d.m == r.estimate.m) {
                let oracle = match r.estimate.kind {
                    EstimateKind::Purity => d.purity,
                    EstimateKind::Fidelity => d.fidelity,
                };
                comparison.push(Comparison {
                    m: d.m,
                    kind: r.estimate.kind,
                    oracle,
                    estimate: r.estimate.value,
                });
            }
        }
    }

    let report = OracleReport {
        config_hash: run.hash.clone(),
        n,
        layer_channel,
        depths,
        purity_fit,
        fidelity_fit,
        comparison,
        scrambling,
        warnings,
    };
    let path = store::path(dir, store::ORACLE);
    if path.exists() {
        // Never overwrite an oracle computed for another configuration.
        let old: OracleReport = store::read_json(&path)?;
        check_hash(&path, &run.hash, Some(&old.config_hash))?;
    }
    store::write_json(&path, &report)?;
    Ok(report)
}
