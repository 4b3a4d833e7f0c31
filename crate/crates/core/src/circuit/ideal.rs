//! Noiseless statevector evaluation of circuits.

use num_complex::Complex64;

use super::clifford::clifford1;
use super::layer::{Gate, Layer};
use super::omega::OmegaCircuit;
use crate::error::{check_cap, Result};
use crate::estimate::table::ProbabilityTable;
use crate::linalg::{CMatrix, ONE, ZERO};
use crate::{MAX_DENSE_QUBITS, MAX_STATEVECTOR_QUBITS};

/// Applies a 2×2 unitary to qubit `q` of a state (or every column of a matrix).
pub(crate) fn apply_1q_columns(state: &mut CMatrix, n: usize, q: usize, u: &CMatrix) {
    let bit = 1usize << (n - 1 - q);
    let (u00, u01, u10, u11) = (u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]);
    for col in 0..state.ncols() {
        for i in 0..state.nrows() {
            if i & bit == 0 {
                let (a, b) = (state[(i, col)], state[(i | bit, col)]);
                state[(i, col)] = u00 * a + u01 * b;
                state[(i | bit, col)] = u10 * a + u11 * b;
            }
        }
    }
}

pub(crate) fn apply_cz_columns(state: &mut CMatrix, n: usize, a: usize, b: usize) {
    let mask = (1usize << (n - 1 - a)) | (1usize << (n - 1 - b));
    for col in 0..state.ncols() {
        for i in 0..state.nrows() {
            if i & mask == mask {
                state[(i, col)] = -state[(i, col)];
            }
        }
    }
}

/// Left-multiplies `state` by the unitary of `layer`.
pub fn apply_layer_columns(state: &mut CMatrix, n: usize, layer: &Layer) {
    for g in layer.gates() {
        match *g {
            Gate::Clifford1 { qubit, index } => {
                if index != 0 {
                    apply_1q_columns(state, n, qubit, clifford1(index).matrix());
                }
            }
            Gate::Cz { a, b } => apply_cz_columns(state, n, a, b),
        }
    }
}

/// Dense unitary of a sequence of layers, first layer applied first.
pub fn layers_unitary<'a>(n: usize, layers: impl IntoIterator<Item = &'a Layer>) -> Result<CMatrix> {
    check_cap("layers_unitary", n, MAX_DENSE_QUBITS)?;
    let mut u = CMatrix::identity(1 << n, 1 << n);
    for l in layers {
        apply_layer_columns(&mut u, n, l);
    }
    Ok(u)
}

/// `L_m ⋯ L_1`, without the dressing layers.
pub fn body_unitary(circuit: &OmegaCircuit) -> Result<CMatrix> {
    layers_unitary(circuit.n, &circuit.layers)
}

/// `W · L_m ⋯ L_1 · V`.
pub fn full_unitary(circuit: &OmegaCircuit) -> Result<CMatrix> {
    layers_unitary(
        circuit.n,
        std::iter::once(&circuit.v_layer)
            .chain(&circuit.layers)
            .chain(std::iter::once(&circuit.w_layer)),
    )
}

/// `L_m ⋯ L_1 V |0…0⟩` as a `2ⁿ×1` column.
pub fn ideal_state(circuit: &OmegaCircuit) -> Result<CMatrix> {
    check_cap("ideal_state", circuit.n, MAX_STATEVECTOR_QUBITS)?;
    let mut psi = CMatrix::from_element(1 << circuit.n, 1, ZERO);
    psi[(0, 0)] = ONE;
    apply_layer_columns(&mut psi, circuit.n, &circuit.v_layer);
    for l in &circuit.layers {
        apply_layer_columns(&mut psi, circuit.n, l);
    }
    Ok(psi)
}

/// Exact outcome distribution `|⟨s|W C V|0⟩|²` as an exact table.
pub fn ideal_probabilities(circuit: &OmegaCircuit) -> Result<ProbabilityTable> {
    let mut psi = ideal_state(circuit)?;
    apply_layer_columns(&mut psi, circuit.n, &circuit.w_layer);
    let probs: Vec<f64> = psi.iter().map(Complex64::norm_sqr).collect();
    ProbabilityTable::from_dense(circuit.n, &probs, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::clifford::{clifford1_index_of, hadamard};
    use crate::circuit::omega::{sample_omega_circuit, SamplingPlan};
    use crate::circuit::sampler::EdgeGrabSampler;
    use crate::circuit::topology::Topology;
    use crate::linalg::{identity, kron, max_abs_diff, mat2};

    fn bare(n: usize, v: Layer, layers: Vec<Layer>, w: Layer) -> OmegaCircuit {
        OmegaCircuit {
            n,
            m: layers.len() as u32,
            circuit_id: 0,
            w_id: 0,
            seed: 0,
            config_hash: None,
            v_layer: v,
            layers,
            w_layer: w,
        }
    }

    #[test]
    fn identity_circuit_is_point_mass() {
        let c = bare(3, Layer::identity(3), vec![Layer::identity(3)], Layer::identity(3));
        let q = ideal_probabilities(&c).unwrap();
        assert!((q.get(0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hadamard_gives_uniform() {
        let h = clifford1_index_of(&hadamard()).unwrap();
        let c = bare(1, Layer::single_qubit(&[h]).unwrap(), vec![], Layer::identity(1));
        let q = ideal_probabilities(&c).unwrap();
        assert!((q.get(0) - 0.5).abs() < 1e-15 && (q.get(1) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn matches_matrix_chain_oracle() {
        let plan = SamplingPlan {
            depths: vec![4],
            n_circuits: 5,
            n_w: 1,
            n_meas: 1,
            k: 1,
            xi: 1.0,
            master_seed: 3,
            exhaustive_w: false,
        };
        let s = EdgeGrabSampler::new(&Topology::line(2).unwrap(), 1.0).unwrap();
        let one = mat2(ONE, ZERO, ZERO, ZERO);
        let cz = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![ONE, ONE, ONE, -ONE]));
        let layer_matrix = |l: &Layer| -> CMatrix {
            let mut per_q = [identity(2), identity(2)];
            let mut m = identity(4);
            for g in l.gates() {
                match *g {
                    Gate::Clifford1 { qubit, index } => per_q[qubit] = clifford1(index).matrix().clone(),
                    Gate::Cz { .. } => m = cz.clone(),
                }
            }
            kron(&per_q[0], &per_q[1]) * m
        };
        for cid in 0..5 {
            let c = sample_omega_circuit(&plan, &s, 4, cid, 0).unwrap();
            let mut u = layer_matrix(&c.v_layer);
            for l in &c.layers {
                u = layer_matrix(l) * u;
            }
            u = layer_matrix(&c.w_layer) * u;
            assert!(max_abs_diff(&u, &full_unitary(&c).unwrap()) < 1e-12);
            let rho0 = kron(&one, &one);
            let out = &u * rho0 * u.adjoint();
            let q = ideal_probabilities(&c).unwrap();
            for s in 0..4 {
                assert!((q.get(s as u64) - out[(s, s)].re).abs() < 1e-12);
            }
            assert!((q.total() - 1.0).abs() < 1e-12);
        }
    }
}
