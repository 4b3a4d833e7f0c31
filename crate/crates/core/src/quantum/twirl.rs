//! Pauli channels and Pauli twirling, exact and with a finite sample of Paulis.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::channel::{Ptm, QuantumChannel};
use super::pauli::{all_paulis, symplectic_product, PauliString};
use crate::error::{check_cap, CoreError, Result};
use crate::MAX_PTM_QUBITS;

/// Largest register for the exact `4ⁿ`-term twirl.
pub const MAX_EXACT_TWIRL_QUBITS: usize = 4;

const PROB_TOLERANCE: f64 = 1e-9;

/// `ρ ↦ Σ_a α_a P_a ρ P_a`, with `alphas` in transfer-matrix order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliChannel {
    n: usize,
    alphas: Vec<f64>,
}

fn sign(a: &PauliString, b: &PauliString) -> f64 {
    if symplectic_product(a, b).expect("same register") == 0 {
        1.0
    } else {
        -1.0
    }
}

impl PauliChannel {
    pub fn new(n: usize, alphas: Vec<f64>) -> Result<Self> {
        check_cap("PauliChannel", n, MAX_PTM_QUBITS)?;
        if alphas.len() != 1 << (2 * n) {
            return Err(CoreError::LengthMismatch {
                left: alphas.len(),
                right: 1 << (2 * n),
            });
        }
        if let Some(a) = alphas.iter().find(|a| !a.is_finite() || **a < -PROB_TOLERANCE) {
            return Err(CoreError::InvalidChannel(format!("Pauli probability {a} is negative")));
        }
        let total: f64 = alphas.iter().sum();
        if total > 1.0 + PROB_TOLERANCE {
            return Err(CoreError::InvalidChannel(format!("Pauli probabilities sum to {total} > 1")));
        }
        Ok(Self { n, alphas })
    }

    /// Inverts `λ_a = Σ_b (−1)^⟨a,b⟩ α_b`: `α_a = 4⁻ⁿ Σ_b (−1)^⟨a,b⟩ λ_b`.
    pub fn from_eigenvalues(n: usize, eigenvalues: &[f64]) -> Result<Self> {
        check_cap("PauliChannel", n, MAX_PTM_QUBITS)?;
        if eigenvalues.len() != 1 << (2 * n) {
            return Err(CoreError::LengthMismatch {
                left: eigenvalues.len(),
                right: 1 << (2 * n),
            });
        }
        let alphas = signed_transform(n, eigenvalues)
            .into_iter()
            .map(|v| v / (1u64 << (2 * n)) as f64)
            .collect();
        Self::new(n, alphas)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn alpha(&self, p: &PauliString) -> f64 {
        self.alphas[p.index()]
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        (self.alphas.iter().sum::<f64>() - 1.0).abs() <= tol
    }

    /// Diagonal of the transfer matrix.
    pub fn eigenvalues(&self) -> Vec<f64> {
        signed_transform(self.n, &self.alphas)
    }

    pub fn ptm(&self) -> Ptm {
        Ptm::from_diagonal(&nalgebra::DVector::from_vec(self.eigenvalues()))
    }

    pub fn to_channel(&self) -> Result<QuantumChannel> {
        QuantumChannel::from_pauli_probabilities(self.n, &self.alphas)
    }

    /// `F_ent = α_I`.
    pub fn entanglement_fidelity(&self) -> f64 {
        self.alphas[0]
    }

    /// `F̄ = (2ⁿ α_I + 1)/(2ⁿ + 1)`.
    pub fn average_gate_fidelity(&self) -> f64 {
        let d = (1u64 << self.n) as f64;
        (d * self.alphas[0] + 1.0) / (d + 1.0)
    }

    /// `(4ⁿ Σα² − (Σα)²)/(4ⁿ − 1)`, which is `(4ⁿΣα² − 1)/(4ⁿ − 1)` when trace preserving.
    pub fn unitarity(&self) -> f64 {
        let dd = (1u64 << (2 * self.n)) as f64;
        let sq: f64 = self.alphas.iter().map(|a| a * a).sum();
        let s: f64 = self.alphas.iter().sum();
        (dd * sq - s * s) / (dd - 1.0)
    }
}

/// `out_a = Σ_b (−1)^⟨a,b⟩ v_b`.
fn signed_transform(n: usize, v: &[f64]) -> Vec<f64> {
    let paulis: Vec<PauliString> = all_paulis(n).collect();
    paulis
        .iter()
        .map(|a| paulis.iter().zip(v).map(|(b, &x)| sign(a, b) * x).sum())
        .collect()
}

/// Full Pauli twirl: `α_a = 4⁻ⁿ Σ_K |tr(P_a K)|²`, the diagonal of the χ matrix.
pub fn pauli_twirl_exact(ch: &QuantumChannel) -> Result<PauliChannel> {
    check_cap("pauli_twirl_exact", ch.n(), MAX_EXACT_TWIRL_QUBITS)?;
    let n = ch.n();
    let dd = (1u64 << (2 * n)) as f64;
    let alphas = all_paulis(n)
        .map(|p| ch.kraus().iter().map(|k| p.trace_product(k).norm_sqr()).sum::<f64>() / dd)
        .collect();
    PauliChannel::new(n, alphas)
}

/// Twirl over an explicit list of Paulis: `ρ ↦ (1/N) Σ_q P_q 𝓔(P_q ρ P_q) P_q`.
pub fn pauli_twirl_over(ch: &QuantumChannel, paulis: &[PauliString]) -> Result<QuantumChannel> {
    check_cap("pauli_twirl_over", ch.n(), MAX_PTM_QUBITS)?;
    if paulis.is_empty() {
        return Err(CoreError::Empty("twirl Pauli set"));
    }
    if let Some(p) = paulis.iter().find(|p| p.n() != ch.n()) {
        return Err(CoreError::QubitMismatch {
            left: p.n(),
            right: ch.n(),
        });
    }
    let scale = 1.0 / (paulis.len() as f64).sqrt();
    let mut kraus = Vec::with_capacity(paulis.len() * ch.kraus().len());
    for p in paulis {
        for k in ch.kraus() {
            kraus.push(p.conjugate(k).map(|z| z * scale));
        }
    }
    QuantumChannel::new(ch.n(), kraus)
}

/// Twirl over `samples` distinct Paulis drawn uniformly without repetition.
pub fn pauli_twirl_sampled<R: Rng + ?Sized>(
    ch: &QuantumChannel,
    samples: usize,
    rng: &mut R,
) -> Result<QuantumChannel> {
    check_cap("pauli_twirl_sampled", ch.n(), MAX_PTM_QUBITS)?;
    let total = 1usize << (2 * ch.n());
    if samples == 0 || samples > total {
        return Err(CoreError::OutOfRange {
            name: "twirl sample count",
            value: samples as f64,
            lo: 1.0,
            hi: total as f64,
        });
    }
    let mut idx = rand::seq::index::sample(rng, total, samples).into_vec();
    idx.sort_unstable();
    let paulis: Vec<PauliString> = idx.into_iter().map(|i| PauliString::from_index(ch.n(), i)).collect();
    pauli_twirl_over(ch, &paulis)
}

/// Factor by which twirling over `paulis` scales transfer-matrix entry `(a, b)`:
/// `(1/N) Σ_q (−1)^{⟨q,a⟩ + ⟨q,b⟩}`.
pub fn twirl_entry_factor(paulis: &[PauliString], a: &PauliString, b: &PauliString) -> f64 {
    paulis.iter().map(|q| sign(q, a) * sign(q, b)).sum::<f64>() / paulis.len() as f64
}
