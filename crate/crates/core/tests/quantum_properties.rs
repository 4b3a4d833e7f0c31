use coherence_core::linalg::{random_unitary, CMatrix};
use coherence_core::quantum::channel::{depolarizing_channel, random_channel, QuantumChannel};
use coherence_core::quantum::design::{local_clifford_fidelity_sum, stabilizer_states};
use coherence_core::quantum::metrics::{
    average_gate_fidelity, entanglement_fidelity, pauli_unitarity_bounds, polarization_from_fidelity,
    unitarity_definitional, unitarity_exact,
};
use coherence_core::quantum::twirl::{pauli_twirl_exact, PauliChannel};
use coherence_core::circuit::clifford::clifford1_table;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_unital(n: usize, terms: usize, rng: &mut ChaCha8Rng) -> QuantumChannel {
    let weights: Vec<f64> = (0..terms).map(|_| rng.random::<f64>()).collect();
    let total: f64 = weights.iter().sum();
    let kraus = weights
        .iter()
        .map(|w| random_unitary(1 << n, rng).map(|z| z * (w / total).sqrt()))
        .collect();
    QuantumChannel::new(n, kraus).unwrap()
}

fn random_pauli_channel(n: usize, rng: &mut ChaCha8Rng) -> PauliChannel {
    let raw: Vec<f64> = (0..1usize << (2 * n)).map(|_| rng.random::<f64>().powi(3)).collect();
    let s: f64 = raw.iter().sum();
    PauliChannel::new(n, raw.iter().map(|a| a / s).collect()).unwrap()
}

#[test]
fn unitarity_dominates_squared_polarization() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..1000 {
        let n = 1 + i % 3;
        let ch = random_channel(n, 1 + i % 4, &mut rng);
        let u = unitarity_exact(&ch).unwrap();
        let f = polarization_from_fidelity(average_gate_fidelity(&ch), n);
        assert!(u >= f * f - 1e-12, "channel {i}: u={u} f²={}", f * f);
    }
}

#[test]
fn unitarity_routes_agree_up_to_three_qubits() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for n in 1..=3 {
        for rank in [1, 2, 4] {
            let ch = random_channel(n, rank, &mut rng);
            let a = unitarity_exact(&ch).unwrap();
            let b = unitarity_definitional(&ch).unwrap();
            assert!((a - b).abs() < 1e-9, "n={n} rank={rank}: {a} vs {b}");
        }
    }
}

/// Products of single-qubit stabilizer states are not a 2-design on n ≥ 2, so
/// the definitional average must run over the full stabilizer set.
#[test]
fn product_states_are_not_a_two_design() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let ch = random_channel(2, 2, &mut rng);
    let singles = stabilizer_states(1).unwrap();
    let d = 4.0;
    let shift = CMatrix::identity(4, 4).map(|z| z / d);
    let mut total = 0.0;
    for a in &singles {
        for b in &singles {
            let psi = a.kronecker(b);
            let out = ch.apply(&(&psi * psi.adjoint() - &shift));
            total += out.iter().map(|z| z.norm_sqr()).sum::<f64>();
        }
    }
    let product_avg = d / (d - 1.0) * total / 36.0;
    assert!((product_avg - unitarity_exact(&ch).unwrap()).abs() > 1e-6);
}

#[test]
fn clifford_orbit_fidelity_single_qubit() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let ch = random_channel(1, 3, &mut rng);
    let mut acc = 0.0;
    for g in clifford1_table() {
        let psi = g.matrix().columns(0, 1).into_owned();
        let out = ch.apply(&(&psi * psi.adjoint()));
        acc += (psi.adjoint() * out * &psi)[(0, 0)].re;
    }
    assert!((acc / 24.0 - average_gate_fidelity(&ch)).abs() < 1e-12);
}

#[test]
fn pauli_channels_sit_inside_the_interval() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for n in 1..=3 {
        for _ in 0..100 {
            let pc = random_pauli_channel(n, &mut rng);
            let u = unitarity_exact(&pc.to_channel().unwrap()).unwrap();
            let iv = pauli_unitarity_bounds(pc.average_gate_fidelity(), n).unwrap();
            assert!(u >= iv.lower - 1e-12 && u <= iv.upper + 1e-12, "n={n} u={u} {iv:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn twirl_preserves_fidelity_and_matches_formula(seed in any::<u64>(), n in 1usize..=2, rank in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ch = random_channel(n, rank, &mut rng);
        let pc = pauli_twirl_exact(&ch).unwrap();
        prop_assert!((average_gate_fidelity(&ch) - pc.average_gate_fidelity()).abs() < 1e-9);
        let dd = (1u64 << (2 * n)) as f64;
        let sq: f64 = pc.alphas().iter().map(|a| a * a).sum();
        let u = unitarity_exact(&pc.to_channel().unwrap()).unwrap();
        prop_assert!((u - (dd * sq - 1.0) / (dd - 1.0)).abs() < 1e-9);
    }

    #[test]
    fn depolarizing_scales_unitarity_of_unital_noise(seed in any::<u64>(), n in 1usize..=2, p in 0.0f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_unital(n, 3, &mut rng);
        let dep = depolarizing_channel(p, n).unwrap();
        let composed = x.then(&dep).unwrap();
        let lhs = unitarity_exact(&composed).unwrap();
        prop_assert!((lhs - p * p * unitarity_exact(&x).unwrap()).abs() < 1e-9);
        let a = x.then(&dep).unwrap();
        let b = dep.then(&x).unwrap();
        prop_assert!((a.ptm().unwrap() - b.ptm().unwrap()).abs().max() < 1e-9);
    }

    #[test]
    fn local_clifford_identity(seed in any::<u64>(), n in 1usize..=2, y in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ch = random_channel(n, 2, &mut rng);
        let y = y % (1 << n);
        let s = local_clifford_fidelity_sum(&ch, y).unwrap();
        prop_assert!((s - entanglement_fidelity(&ch)).abs() < 1e-9);
    }

    #[test]
    fn ptm_trace_gives_entanglement_fidelity(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ch = random_channel(n, 2, &mut rng);
        let dd = (1u64 << (2 * n)) as f64;
        prop_assert!((ch.ptm().unwrap().trace() / dd - entanglement_fidelity(&ch)).abs() < 1e-12);
    }
}
