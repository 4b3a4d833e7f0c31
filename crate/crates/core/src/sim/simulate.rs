//! Noisy evaluation of dressed circuits.

use super::density::DensityMatrix;
use super::noise::{CompiledLayerNoise, CompiledNoise, CompiledSpam};
use crate::circuit::clifford::clifford1;
use crate::circuit::layer::{Gate, Layer};
use crate::circuit::omega::OmegaCircuit;
use crate::error::{CoreError, Result};
use crate::estimate::table::ProbabilityTable;

fn check_n(rho: &DensityMatrix, noise: &CompiledNoise) -> Result<()> {
    if rho.n() != noise.n() {
        return Err(CoreError::QubitMismatch {
            left: rho.n(),
            right: noise.n(),
        });
    }
    Ok(())
}

fn apply_gates_with_gate_noise(rho: &mut DensityMatrix, layer: &Layer, noise: &CompiledNoise) -> Result<()> {
    layer.validate(rho.n())?;
    for g in layer.gates() {
        match *g {
            Gate::Clifford1 { qubit, index } => {
                if index != 0 {
                    rho.apply_unitary(clifford1(index).matrix(), &[qubit])?;
                }
                if noise.pol_1q < 1.0 {
                    rho.depolarize(noise.pol_1q, &[qubit])?;
                }
            }
            Gate::Cz { a, b } => {
                rho.apply_cz(a, b)?;
                if noise.pol_2q < 1.0 {
                    rho.depolarize(noise.pol_2q, &[a, b])?;
                }
            }
        }
    }
    Ok(())
}

/// One body layer: ideal gates, per-gate depolarizing, per-qubit decoherence
/// for the layer duration, then the model's extra layer noise.
pub fn noisy_layer_apply(rho: &mut DensityMatrix, layer: &Layer, noise: &CompiledNoise) -> Result<()> {
    check_n(rho, noise)?;
    apply_gates_with_gate_noise(rho, layer, noise)?;
    let idle = if layer.has_two_qubit_gate() { &noise.idle_2q } else { &noise.idle_1q };
    for (q, kraus) in idle.iter().enumerate() {
        if let Some(k) = kraus {
            rho.apply_kraus(k, &[q])?;
        }
    }
    for ln in &noise.layer_noise {
        match ln {
            CompiledLayerNoise::Global(p) => rho.depolarize_global(*p),
            CompiledLayerNoise::Local { qubits, kraus } => rho.apply_kraus(kraus, qubits)?,
        }
    }
    Ok(())
}

/// `ρ_m`: ideal `V`, the SPAM channel, then `m` noisy body layers.
pub fn simulate_circuit(circuit: &OmegaCircuit, noise: &CompiledNoise) -> Result<DensityMatrix> {
    let mut rho = DensityMatrix::zero_state(circuit.n)?;
    check_n(&rho, noise)?;
    circuit.v_layer.validate(circuit.n)?;
    for g in circuit.v_layer.gates() {
        if let Gate::Clifford1 { qubit, index } = *g {
            if index != 0 {
                rho.apply_unitary(clifford1(index).matrix(), &[qubit])?;
            }
        }
    }
    match &noise.spam {
        CompiledSpam::None => {}
        CompiledSpam::Depolarizing(p) => {
            for q in 0..circuit.n {
                rho.depolarize(*p, &[q])?;
            }
        }
        CompiledSpam::PerQubit(k) => {
            for q in 0..circuit.n {
                rho.apply_kraus(k, &[q])?;
            }
        }
        CompiledSpam::Global(k) => {
            let all: Vec<usize> = (0..circuit.n).collect();
            rho.apply_kraus(k, &all)?;
        }
    }
    for layer in &circuit.layers {
        noisy_layer_apply(&mut rho, layer, noise)?;
    }
    Ok(rho)
}

/// Outcome distribution after the noisy `W` layer and readout confusion.
pub fn measurement_distribution(rho: &DensityMatrix, w_layer: &Layer, noise: &CompiledNoise) -> Result<ProbabilityTable> {
    check_n(rho, noise)?;
    let n = rho.n();
    let mut after = rho.clone();
    apply_gates_with_gate_noise(&mut after, w_layer, noise)?;
    let mut probs = after.diagonal();
    if let Some((eps0, eps1)) = &noise.readout {
        for q in 0..n {
            let bit = 1usize << (n - 1 - q);
            for i in 0..probs.len() {
                if i & bit == 0 {
                    let (p0, p1) = (probs[i], probs[i | bit]);
                    probs[i] = (1.0 - eps0[q]) * p0 + eps1[q] * p1;
                    probs[i | bit] = eps0[q] * p0 + (1.0 - eps1[q]) * p1;
                }
            }
        }
    }
    let total: f64 = probs.iter().sum();
    if total > 0.0 && (total - 1.0).abs() > 1e-15 {
        probs.iter_mut().for_each(|p| *p /= total);
    }
    ProbabilityTable::from_dense(n, &probs, 0)
}

/// Noisy distribution of a full dressed circuit.
pub fn noisy_probabilities(circuit: &OmegaCircuit, noise: &CompiledNoise) -> Result<ProbabilityTable> {
    let rho = simulate_circuit(circuit, noise)?;
    measurement_distribution(&rho, &circuit.w_layer, noise)
}
