//! Exact 2-design averages and the scrambling diagnostic.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::channel::QuantumChannel;
use super::pauli::PauliString;
use crate::circuit::clifford::clifford1_table;
use crate::error::{check_cap, CoreError, Result};
use crate::linalg::{c, CMatrix, ZERO};
use crate::MAX_PTM_QUBITS;

/// Largest register for stabilizer-state enumeration (36 720 states at n = 4).
pub const MAX_STABILIZER_QUBITS: usize = 4;

fn state_key(v: &CMatrix) -> Vec<(i64, i64)> {
    let canon = crate::linalg::canonical_phase(v);
    canon
        .iter()
        .map(|z| ((z.re * 1e8).round() as i64, (z.im * 1e8).round() as i64))
        .collect()
}

/// All `n`-qubit stabilizer states as `2ⁿ×1` columns, found as the orbit of
/// `|0…0⟩` under H, S and CZ. Deterministic order (breadth first).
pub fn stabilizer_states(n: usize) -> Result<Vec<CMatrix>> {
    check_cap("stabilizer_states", n, MAX_STABILIZER_QUBITS)?;
    let d = 1usize << n;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut start = CMatrix::from_element(d, 1, ZERO);
    start[(0, 0)] = c(1.0, 0.0);

    let apply_h = |v: &CMatrix, q: usize| -> CMatrix {
        let bit = 1usize << (n - 1 - q);
        let mut out = v.clone();
        for i in 0..d {
            if i & bit == 0 {
                let (a, b) = (v[(i, 0)], v[(i | bit, 0)]);
                out[(i, 0)] = (a + b) * h;
                out[(i | bit, 0)] = (a - b) * h;
            }
        }
        out
    };
    let apply_s = |v: &CMatrix, q: usize| -> CMatrix {
        let bit = 1usize << (n - 1 - q);
        let mut out = v.clone();
        for i in 0..d {
            if i & bit != 0 {
                out[(i, 0)] *= c(0.0, 1.0);
            }
        }
        out
    };
    let apply_cz = |v: &CMatrix, a: usize, b: usize| -> CMatrix {
        let mask = (1usize << (n - 1 - a)) | (1usize << (n - 1 - b));
        let mut out = v.clone();
        for i in 0..d {
            if i & mask == mask {
                out[(i, 0)] = -out[(i, 0)];
            }
        }
        out
    };

    let mut seen = HashSet::new();
    seen.insert(state_key(&start));
    let mut states = vec![start];
    let mut head = 0;
    while head < states.len() {
        let v = states[head].clone();
        head += 1;
        let mut next = Vec::new();
        for q in 0..n {
            next.push(apply_h(&v, q));
            next.push(apply_s(&v, q));
        }
        for a in 0..n {
            for b in a + 1..n {
                next.push(apply_cz(&v, a, b));
            }
        }
        for w in next {
            if seen.insert(state_key(&w)) {
                states.push(w);
            }
        }
    }
    Ok(states)
}

/// Every `n`-fold tensor product of single-qubit Cliffords, `24ⁿ` matrices.
pub fn local_clifford_layers(n: usize) -> Result<Vec<CMatrix>> {
    check_cap("local_clifford_layers", n, 3)?;
    let table = clifford1_table();
    let mut out = vec![CMatrix::identity(1, 1)];
    for _ in 0..n {
        out = out
            .iter()
            .flat_map(|acc| table.iter().map(move |g| acc.kronecker(g.matrix())))
            .collect();
    }
    Ok(out)
}

/// `Σ_x (−2)^{−h(x,y)} ⟨x| E_U[U† 𝓧(U|y⟩⟨y|U†) U] |x⟩` over all local Cliffords
/// `U`; equals `F_ent(𝓧)` for every reference string `y`.
pub fn local_clifford_fidelity_sum(ch: &QuantumChannel, y: usize) -> Result<f64> {
    let n = ch.n();
    let d = ch.dim();
    if y >= d {
        return Err(CoreError::InvalidBits(format!("basis index {y} for n={n}")));
    }
    let layers = local_clifford_layers(n)?;
    let mut avg = vec![0.0; d];
    for u in &layers {
        let col = u.column(y).into_owned();
        let out = ch.apply(&(&col * col.adjoint()));
        let back = u.adjoint() * out * u;
        for (x, a) in avg.iter_mut().enumerate() {
            *a += back[(x, x)].re;
        }
    }
    let weight = |x: usize| (-0.5f64).powi((x ^ y).count_ones() as i32);
    Ok((0..d).map(|x| weight(x) * avg[x]).sum::<f64>() / layers.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScramblingScore {
    pub score: f64,
    /// `score − 4⁻ⁿ`.
    pub excess: f64,
    pub samples: usize,
}

/// Mean of `|tr(P C P′ C†)|²/4ⁿ` over the given circuit unitaries `C`.
pub fn scrambling_score<'a, I>(unitaries: I, p: &PauliString, p_prime: &PauliString) -> Result<ScramblingScore>
where
    I: IntoIterator<Item = &'a CMatrix>,
{
    check_cap("scrambling_score", p.n(), MAX_PTM_QUBITS)?;
    if p.n() != p_prime.n() {
        return Err(CoreError::QubitMismatch {
            left: p.n(),
            right: p_prime.n(),
        });
    }
    if p.is_identity() || p_prime.is_identity() {
        return Err(CoreError::InvalidData("scrambling score needs non-identity Paulis".into()));
    }
    let d = 1usize << p.n();
    let dd = (d * d) as f64;
    let mut total = 0.0;
    let mut samples = 0;
    for u in unitaries {
        if u.shape() != (d, d) {
            return Err(CoreError::InvalidData(format!("circuit unitary shape {:?}", u.shape())));
        }
        let inner = p_prime.right_mul(u) * u.adjoint();
        total += p.trace_product(&inner).norm_sqr() / dd;
        samples += 1;
    }
    if samples == 0 {
        return Err(CoreError::Empty("scrambling ensemble"));
    }
    let score = total / samples as f64;
    Ok(ScramblingScore {
        score,
        excess: score - 1.0 / dd,
        samples,
    })
}
