//! Fidelity and unitarity functionals, and the Pauli-noise unitarity interval.

use serde::{Deserialize, Serialize};

use super::channel::{kraus_trace_weight, QuantumChannel};
use crate::error::{check_cap, CoreError, Result};
use crate::linalg::{identity, CMatrix};
use crate::MAX_PTM_QUBITS;

/// Default slack when comparing a unitarity against the Pauli interval.
pub const DEFAULT_CLASSIFY_TOLERANCE: f64 = 1e-9;

/// `F_ent = 4⁻ⁿ Σ_K |tr K|²`, equal to `4⁻ⁿ tr(PTM)`.
pub fn entanglement_fidelity(ch: &QuantumChannel) -> f64 {
    kraus_trace_weight(ch) / (1u64 << (2 * ch.n())) as f64
}

/// `F̄ = (tr PTM + 2ⁿ) / (2ⁿ(2ⁿ+1))`.
pub fn average_gate_fidelity(ch: &QuantumChannel) -> f64 {
    let d = ch.dim() as f64;
    let tr_ptm = kraus_trace_weight(ch);
    (tr_ptm + d) / (d * (d + 1.0))
}

/// `f̄ = (2ⁿF̄ − 1)/(2ⁿ − 1)`.
pub fn polarization_from_fidelity(avg_fidelity: f64, n: usize) -> f64 {
    let d = (1u64 << n) as f64;
    (d * avg_fidelity - 1.0) / (d - 1.0)
}

/// `F̄ = ((2ⁿ − 1)f̄ + 1)/2ⁿ`.
pub fn fidelity_from_polarization(polarization: f64, n: usize) -> f64 {
    let d = (1u64 << n) as f64;
    ((d - 1.0) * polarization + 1.0) / d
}

/// Unitarity via the transfer matrix: `tr(NᵀN)/(4ⁿ−1)` with `N` the PTM
/// minus its identity-input column.
pub fn unitarity_exact(ch: &QuantumChannel) -> Result<f64> {
    let ptm = ch.ptm()?;
    let dd = ptm.nrows();
    let mut acc = 0.0;
    for b in 1..dd {
        for a in 0..dd {
            acc += ptm[(a, b)] * ptm[(a, b)];
        }
    }
    Ok(acc / (dd as f64 - 1.0))
}

/// Unitarity from its definition: `2ⁿ/(2ⁿ−1) · E_ψ ‖𝓔(ψ − 𝟙/2ⁿ)‖²` averaged
/// over all `n`-qubit stabilizer states, which form an exact 2-design.
pub fn unitarity_definitional(ch: &QuantumChannel) -> Result<f64> {
    let n = ch.n();
    let states = super::design::stabilizer_states(n)?;
    let d = ch.dim() as f64;
    let shift = identity(ch.dim()).map(|z| z / d);
    let total: f64 = states
        .iter()
        .map(|psi| {
            let proj: CMatrix = psi * psi.adjoint();
            let out = ch.apply(&(proj - &shift));
            out.iter().map(|z| z.norm_sqr()).sum::<f64>()
        })
        .sum();
    Ok(d / (d - 1.0) * total / states.len() as f64)
}

/// Average gate fidelity from its definition, averaged over stabilizer states.
pub fn average_gate_fidelity_definitional(ch: &QuantumChannel) -> Result<f64> {
    let states = super::design::stabilizer_states(ch.n())?;
    let total: f64 = states
        .iter()
        .map(|psi| {
            let out = ch.apply(&(psi * psi.adjoint()));
            (psi.adjoint() * out * psi)[(0, 0)].re
        })
        .sum();
    Ok(total / states.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelMetrics {
    pub n: usize,
    pub avg_fidelity: f64,
    pub polarization: f64,
    pub infidelity: f64,
    pub unitarity: f64,
    pub ent_fidelity: f64,
}

impl ChannelMetrics {
    pub fn of(ch: &QuantumChannel) -> Result<Self> {
        check_cap("ChannelMetrics", ch.n(), MAX_PTM_QUBITS)?;
        let avg_fidelity = average_gate_fidelity(ch);
        Ok(Self {
            n: ch.n(),
            avg_fidelity,
            polarization: polarization_from_fidelity(avg_fidelity, ch.n()),
            infidelity: 1.0 - avg_fidelity,
            unitarity: unitarity_exact(ch)?,
            ent_fidelity: entanglement_fidelity(ch),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CoherenceRegion {
    /// Below `f̄²`: no Markovian channel has this (ū, F̄) pair.
    Impossible,
    PauliConsistent,
    /// Above the Pauli upper bound: the noise has a coherent part.
    Coherent,
}

impl std::fmt::Display for CoherenceRegion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CoherenceRegion::Impossible => "IMPOSSIBLE",
            CoherenceRegion::PauliConsistent => "PAULI_CONSISTENT",
            CoherenceRegion::Coherent => "COHERENT",
        })
    }
}

/// Range of unitarities a Pauli channel with a given average fidelity can have.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliBoundInterval {
    pub lower: f64,
    pub upper: f64,
}

impl PauliBoundInterval {
    pub fn classify(&self, unitarity: f64, tol: f64) -> CoherenceRegion {
        if unitarity < self.lower - tol {
            CoherenceRegion::Impossible
        } else if unitarity > self.upper + tol {
            CoherenceRegion::Coherent
        } else {
            CoherenceRegion::PauliConsistent
        }
    }

    pub fn contains(&self, unitarity: f64, tol: f64) -> bool {
        self.classify(unitarity, tol) == CoherenceRegion::PauliConsistent
    }
}

/// `[f̄², f̄² + (4ⁿ−2)/(2ⁿ−1)² · r̄²]`, clamped to `[0, 1]`.
pub fn pauli_unitarity_bounds(avg_fidelity: f64, n: usize) -> Result<PauliBoundInterval> {
    if n == 0 || n > 31 {
        return Err(CoreError::OutOfRange {
            name: "n",
            value: n as f64,
            lo: 1.0,
            hi: 31.0,
        });
    }
    let d = (1u64 << n) as f64;
    let lo = 1.0 / (d + 1.0);
    if !avg_fidelity.is_finite() || avg_fidelity < lo - 1e-12 || avg_fidelity > 1.0 + 1e-12 {
        return Err(CoreError::OutOfRange {
            name: "average gate fidelity",
            value: avg_fidelity,
            lo,
            hi: 1.0,
        });
    }
    let f = polarization_from_fidelity(avg_fidelity, n);
    let r = 1.0 - avg_fidelity;
    let lower = f * f;
    let upper = lower + (d * d - 2.0) / ((d - 1.0) * (d - 1.0)) * r * r;
    Ok(PauliBoundInterval {
        lower: lower.clamp(0.0, 1.0),
        upper: upper.clamp(0.0, 1.0),
    })
}

pub fn classify_coherence(
    unitarity: f64,
    avg_fidelity: f64,
    n: usize,
    tol: f64,
) -> Result<CoherenceRegion> {
    Ok(pauli_unitarity_bounds(avg_fidelity, n)?.classify(unitarity, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, mat2, ONE, ZERO};
    use crate::quantum::channel::{depolarizing_channel, random_channel};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_metrics() {
        let m = ChannelMetrics::of(&QuantumChannel::identity(2)).unwrap();
        assert!((m.avg_fidelity - 1.0).abs() < 1e-12);
        assert!((m.unitarity - 1.0).abs() < 1e-12);
        assert!((m.ent_fidelity - 1.0).abs() < 1e-12);
        assert!(m.infidelity.abs() < 1e-12);
    }

    #[test]
    fn depolarizing_fidelities() {
        let ch = depolarizing_channel(0.9, 1).unwrap();
        assert!((entanglement_fidelity(&ch) - 0.925).abs() < 1e-12);
        // Choi overlap with the maximally entangled state
        let choi = ch.choi().unwrap();
        let phi = nalgebra::DVector::from_fn(4, |k, _| if k == 0 || k == 3 { c(0.5f64.sqrt(), 0.0) } else { ZERO });
        let overlap = (phi.adjoint() * choi * &phi)[(0, 0)].re;
        assert!((overlap - 0.925).abs() < 1e-12);
        assert!((average_gate_fidelity(&ch) - 0.95).abs() < 1e-12);
        assert!((average_gate_fidelity_definitional(&ch).unwrap() - 0.95).abs() < 1e-12);
        let ptm_trace = ch.ptm().unwrap().trace() / 4.0;
        assert!((ptm_trace - 0.925).abs() < 1e-12);

        let full = depolarizing_channel(0.0, 1).unwrap();
        assert!((entanglement_fidelity(&full) - 0.25).abs() < 1e-12);
        assert!((average_gate_fidelity(&full) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn unitarity_of_depolarizing_is_p_squared() {
        for &p in &[0.0, 0.3, 0.9, 1.0] {
            for n in 1..=2 {
                let u = unitarity_exact(&depolarizing_channel(p, n).unwrap()).unwrap();
                assert!((u - p * p).abs() < 1e-12, "p={p} n={n} u={u}");
            }
        }
    }

    #[test]
    fn unitary_channels_have_unit_unitarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = crate::linalg::random_unitary(4, &mut rng);
        let ch = QuantumChannel::unitary(u).unwrap();
        assert!((unitarity_exact(&ch).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unitarity_routes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in 1..=2 {
            for rank in 1..=3 {
                let ch = random_channel(n, rank, &mut rng);
                let a = unitarity_exact(&ch).unwrap();
                let b = unitarity_definitional(&ch).unwrap();
                assert!((a - b).abs() < 1e-10, "n={n} {a} vs {b}");
            }
        }
        // trace-decreasing
        let k = mat2(ONE, ZERO, ZERO, c(0.5, 0.0));
        let ch = QuantumChannel::new(1, vec![k]).unwrap();
        let a = unitarity_exact(&ch).unwrap();
        let b = unitarity_definitional(&ch).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn bounds_examples() {
        let iv = pauli_unitarity_bounds(1.0, 3).unwrap();
        assert_eq!((iv.lower, iv.upper), (1.0, 1.0));
        let iv = pauli_unitarity_bounds(0.99, 1).unwrap();
        assert!((iv.lower - 0.9604).abs() < 1e-12);
        assert!((iv.upper - 0.9606).abs() < 1e-12);
        assert!(pauli_unitarity_bounds(0.2, 1).is_err());
        assert!(pauli_unitarity_bounds(1.01, 1).is_err());
    }

    #[test]
    fn classification_examples() {
        let tol = DEFAULT_CLASSIFY_TOLERANCE;
        let f = polarization_from_fidelity(0.97, 2);
        assert_eq!(classify_coherence(f * f, 0.97, 2, tol).unwrap(), CoherenceRegion::PauliConsistent);
        assert_eq!(classify_coherence(1.0, 0.9, 1, tol).unwrap(), CoherenceRegion::Coherent);
        assert_eq!(classify_coherence(0.5, 0.99, 1, tol).unwrap(), CoherenceRegion::Impossible);
        assert_eq!(classify_coherence(1.0, 1.0, 1, tol).unwrap(), CoherenceRegion::PauliConsistent);
    }

    #[test]
    fn fidelity_polarization_inverse() {
        for n in 1..=4 {
            let f = 0.93;
            let back = polarization_from_fidelity(fidelity_from_polarization(f, n), n);
            assert!((back - f).abs() < 1e-14);
        }
    }
}
