//! Dense density matrices with local operator application.

use num_complex::Complex64;

use crate::error::{check_cap, CoreError, Result};
use crate::linalg::{trace, CMatrix, ONE, ZERO};
use crate::MAX_DENSE_QUBITS;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    rho: CMatrix,
}

/// Index bookkeeping for an operator on a subset of qubits.
struct Support {
    mask: usize,
    /// `offsets[l]` places local index `l` (first listed qubit most significant) into a full index.
    offsets: Vec<usize>,
}

impl Support {
    fn new(n: usize, qubits: &[usize]) -> Result<Self> {
        for (i, &q) in qubits.iter().enumerate() {
            if q >= n || qubits[..i].contains(&q) {
                return Err(CoreError::InvalidCircuit(format!("bad qubit list {qubits:?} for n={n}")));
            }
        }
        let k = qubits.len();
        let bits: Vec<usize> = qubits.iter().map(|&q| 1usize << (n - 1 - q)).collect();
        let offsets = (0..1usize << k)
            .map(|l| {
                (0..k)
                    .filter(|&j| (l >> (k - 1 - j)) & 1 == 1)
                    .map(|j| bits[j])
                    .sum()
            })
            .collect();
        Ok(Self {
            mask: bits.iter().sum(),
            offsets,
        })
    }

    fn bases(&self, dim: usize) -> impl Iterator<Item = usize> + '_ {
        (0..dim).filter(move |i| i & self.mask == 0)
    }
}

impl DensityMatrix {
    /// `|0…0⟩⟨0…0|`.
    pub fn zero_state(n: usize) -> Result<Self> {
        check_cap("DensityMatrix", n, MAX_DENSE_QUBITS)?;
        let d = 1usize << n;
        let mut rho = CMatrix::from_element(d, d, ZERO);
        rho[(0, 0)] = ONE;
        Ok(Self { n, rho })
    }

    /// Wraps a matrix after checking shape, Hermiticity, unit trace and
    /// positivity within `1e-9`.
    pub fn from_matrix(rho: CMatrix) -> Result<Self> {
        let d = rho.nrows();
        if !d.is_power_of_two() || rho.ncols() != d {
            return Err(CoreError::InvalidData(format!("density matrix shape {:?}", rho.shape())));
        }
        let n = d.trailing_zeros() as usize;
        check_cap("DensityMatrix", n, MAX_DENSE_QUBITS)?;
        if crate::linalg::max_abs_diff(&rho, &rho.adjoint()) > 1e-9 {
            return Err(CoreError::InvalidData("density matrix is not Hermitian".into()));
        }
        let tr = trace(&rho);
        if (tr - ONE).norm() > 1e-9 {
            return Err(CoreError::InvalidData(format!("density matrix trace {tr}")));
        }
        let min = crate::linalg::min_hermitian_eigenvalue(&rho);
        if min < -1e-9 {
            return Err(CoreError::InvalidData(format!("density matrix eigenvalue {min} < 0")));
        }
        Ok(Self { n, rho })
    }

    /// `|ψ⟩⟨ψ|` for a normalized column.
    pub fn pure(psi: &CMatrix) -> Result<Self> {
        Self::from_matrix(psi * psi.adjoint())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    pub fn into_matrix(self) -> CMatrix {
        self.rho
    }

    pub fn trace(&self) -> f64 {
        trace(&self.rho).re
    }

    pub fn purity(&self) -> f64 {
        self.rho.iter().map(Complex64::norm_sqr).sum()
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn overlap(&self, psi: &CMatrix) -> f64 {
        (psi.adjoint() * &self.rho * psi)[(0, 0)].re
    }

    /// Computational-basis populations, tiny negative round-off clipped to 0.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rho.nrows()).map(|i| self.rho[(i, i)].re.max(0.0)).collect()
    }

    /// `ρ ← op ρ` with `op` acting on `qubits`.
    fn left_mul(&mut self, op: &CMatrix, s: &Support) {
        let d = self.rho.nrows();
        let k = s.offsets.len();
        let mut v = vec![ZERO; k];
        for c in 0..d {
            for r0 in s.bases(d) {
                for (l, &off) in s.offsets.iter().enumerate() {
                    v[l] = self.rho[(r0 | off, c)];
                }
                for (l, &off) in s.offsets.iter().enumerate() {
                    self.rho[(r0 | off, c)] = (0..k).map(|j| op[(l, j)] * v[j]).sum();
                }
            }
        }
    }

    /// `ρ ← ρ op†` with `op` acting on `qubits`.
    fn right_mul_adjoint(&mut self, op: &CMatrix, s: &Support) {
        let d = self.rho.nrows();
        let k = s.offsets.len();
        let mut v = vec![ZERO; k];
        for c0 in s.bases(d) {
            for r in 0..d {
                for (l, &off) in s.offsets.iter().enumerate() {
                    v[l] = self.rho[(r, c0 | off)];
                }
                for (l, &off) in s.offsets.iter().enumerate() {
                    self.rho[(r, c0 | off)] = (0..k).map(|j| v[j] * op[(l, j)].conj()).sum();
                }
            }
        }
    }

    /// `ρ ← U ρ U†` for a unitary on `qubits`.
    pub fn apply_unitary(&mut self, u: &CMatrix, qubits: &[usize]) -> Result<()> {
        let s = Support::new(self.n, qubits)?;
        check_local_shape(u, qubits.len())?;
        self.left_mul(u, &s);
        self.right_mul_adjoint(u, &s);
        Ok(())
    }

    /// `ρ ← Σ K ρ K†` for Kraus operators on `qubits`.
    pub fn apply_kraus(&mut self, kraus: &[CMatrix], qubits: &[usize]) -> Result<()> {
        let s = Support::new(self.n, qubits)?;
        for k in kraus {
            check_local_shape(k, qubits.len())?;
        }
        match kraus {
            [] => Err(CoreError::InvalidChannel("no Kraus operators".into())),
            [single] => {
                self.left_mul(single, &s);
                self.right_mul_adjoint(single, &s);
                Ok(())
            }
            _ => {
                let mut acc = CMatrix::from_element(self.rho.nrows(), self.rho.ncols(), ZERO);
                for k in kraus {
                    let mut term = self.clone();
                    term.left_mul(k, &s);
                    term.right_mul_adjoint(k, &s);
                    acc += term.rho;
                }
                self.rho = acc;
                Ok(())
            }
        }
    }

    /// CZ as a diagonal sign on rows and columns.
    pub fn apply_cz(&mut self, a: usize, b: usize) -> Result<()> {
        let s = Support::new(self.n, &[a, b])?;
        let d = self.rho.nrows();
        let sign = |i: usize| if i & s.mask == s.mask { -1.0 } else { 1.0 };
        for c in 0..d {
            for r in 0..d {
                let f = sign(r) * sign(c);
                if f < 0.0 {
                    self.rho[(r, c)] = -self.rho[(r, c)];
                }
            }
        }
        Ok(())
    }

    /// Local depolarizing: `ρ ← pρ + (1−p) tr_S(ρ) ⊗ 𝟙_S/2^k` on qubits `S`.
    pub fn depolarize(&mut self, p: f64, qubits: &[usize]) -> Result<()> {
        let s = Support::new(self.n, qubits)?;
        let d = self.rho.nrows();
        let k = s.offsets.len();
        let mix = (1.0 - p) / k as f64;
        for c0 in s.bases(d) {
            for r0 in s.bases(d) {
                let t: Complex64 = s.offsets.iter().map(|&o| self.rho[(r0 | o, c0 | o)]).sum();
                for &o1 in &s.offsets {
                    for &o2 in &s.offsets {
                        let z = &mut self.rho[(r0 | o1, c0 | o2)];
                        *z *= p;
                        if o1 == o2 {
                            *z += t * mix;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Global depolarizing: `ρ ← pρ + (1−p) tr(ρ) 𝟙/2ⁿ`.
    pub fn depolarize_global(&mut self, p: f64) {
        let d = self.rho.nrows();
        let t = trace(&self.rho);
        self.rho *= Complex64::new(p, 0.0);
        for i in 0..d {
            self.rho[(i, i)] += t * ((1.0 - p) / d as f64);
        }
    }
}

fn check_local_shape(op: &CMatrix, k: usize) -> Result<()> {
    if op.shape() != (1 << k, 1 << k) {
        return Err(CoreError::InvalidChannel(format!(
            "operator shape {:?} does not act on {k} qubits",
            op.shape()
        )));
    }
    Ok(())
}
