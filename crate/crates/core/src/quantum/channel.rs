//! Completely positive maps in Kraus form with a lazily derived Pauli transfer
//! matrix.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::pauli::{all_paulis, PauliString};
use crate::error::{check_cap, CoreError, Result};
use crate::linalg::{identity, trace, CMatrix, ZERO};
use crate::{MAX_DENSE_QUBITS, MAX_PTM_QUBITS};

/// Real `4ⁿ×4ⁿ` Pauli transfer matrix, `𝓔_ab = 2⁻ⁿ tr[P_a 𝓔(P_b)]`.
pub type Ptm = DMatrix<f64>;

/// Tolerance for `Σ K†K ≼ 𝟙` and for negative Choi eigenvalues.
pub const CP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct QuantumChannel {
    n: usize,
    kraus: Vec<CMatrix>,
    ptm: OnceLock<Ptm>,
}

impl PartialEq for QuantumChannel {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.kraus == other.kraus
    }
}

impl QuantumChannel {
    /// Validates shapes and the trace-non-increasing condition.
    pub fn new(n: usize, kraus: Vec<CMatrix>) -> Result<Self> {
        check_cap("QuantumChannel", n, MAX_DENSE_QUBITS)?;
        let dim = 1usize << n;
        if kraus.is_empty() {
            return Err(CoreError::InvalidChannel("no Kraus operators".into()));
        }
        for (i, k) in kraus.iter().enumerate() {
            if k.shape() != (dim, dim) {
                return Err(CoreError::InvalidChannel(format!(
                    "Kraus operator {i} has shape {:?}, expected ({dim}, {dim})",
                    k.shape()
                )));
            }
            if k.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(CoreError::InvalidChannel(format!("Kraus operator {i} is not finite")));
            }
        }
        let ch = Self::new_unchecked(n, kraus);
        let top = crate::linalg::max_hermitian_eigenvalue(&ch.kraus_gram());
        if top > 1.0 + CP_TOLERANCE {
            return Err(CoreError::InvalidChannel(format!(
                "Σ K†K has eigenvalue {top} > 1; map increases trace"
            )));
        }
        Ok(ch)
    }

    pub(crate) fn new_unchecked(n: usize, kraus: Vec<CMatrix>) -> Self {
        Self {
            n,
            kraus,
            ptm: OnceLock::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::new_unchecked(n, vec![identity(1 << n)])
    }

    /// Single-Kraus channel `ρ ↦ UρU†`; `u` must be unitary.
    pub fn unitary(u: CMatrix) -> Result<Self> {
        let dim = u.nrows();
        if !dim.is_power_of_two() || u.ncols() != dim {
            return Err(CoreError::InvalidChannel(format!("unitary has shape {:?}", u.shape())));
        }
        let n = dim.trailing_zeros() as usize;
        let gram = u.adjoint() * &u;
        if crate::linalg::max_abs_diff(&gram, &identity(dim)) > 1e-9 {
            return Err(CoreError::InvalidChannel("matrix is not unitary".into()));
        }
        Self::new(n, vec![u])
    }

    /// Pauli channel `ρ ↦ Σ α_a P_a ρ P_a` from probabilities in transfer-matrix order.
    pub fn from_pauli_probabilities(n: usize, alphas: &[f64]) -> Result<Self> {
        check_cap("Pauli channel", n, MAX_PTM_QUBITS)?;
        if alphas.len() != 1 << (2 * n) {
            return Err(CoreError::LengthMismatch {
                left: alphas.len(),
                right: 1 << (2 * n),
            });
        }
        let mut kraus = Vec::new();
        for (p, &a) in all_paulis(n).zip(alphas) {
            if a < -CP_TOLERANCE {
                return Err(CoreError::InvalidChannel(format!("negative Pauli probability {a}")));
            }
            if a > 0.0 {
                let m = super::pauli::pauli_matrix(&p)?;
                kraus.push(m.map(|z| z * a.sqrt()));
            }
        }
        if kraus.is_empty() {
            kraus.push(CMatrix::from_element(1 << n, 1 << n, ZERO));
        }
        Self::new(n, kraus)
    }

    /// Builds a channel from its transfer matrix. Rejects maps whose Choi matrix
    /// has an eigenvalue below `-1e-9`; Kraus operators come from the Choi
    /// eigendecomposition.
    pub fn from_ptm(n: usize, ptm: &Ptm) -> Result<Self> {
        check_cap("from_ptm", n, MAX_PTM_QUBITS)?;
        let d = 1usize << n;
        if ptm.shape() != (d * d, d * d) {
            return Err(CoreError::InvalidChannel(format!("PTM shape {:?}", ptm.shape())));
        }
        let choi = choi_from_ptm(n, ptm)?;
        let eig = choi.clone().symmetric_eigen();
        let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        if min < -CP_TOLERANCE {
            return Err(CoreError::InvalidChannel(format!(
                "Choi matrix has eigenvalue {min} < -{CP_TOLERANCE}; map is not completely positive"
            )));
        }
        let mut kraus = Vec::new();
        for (k, &lam) in eig.eigenvalues.iter().enumerate() {
            if lam <= CP_TOLERANCE {
                continue;
            }
            // Choi = (1/d) Σ_{ij} |i⟩⟨j| ⊗ E(|i⟩⟨j|) and eigenvector v gives
            // K_{out,in} = sqrt(d·λ) v[in·d + out].
            let v = eig.eigenvectors.column(k);
            let scale = (d as f64 * lam).sqrt();
            let kr = CMatrix::from_fn(d, d, |out, inp| v[inp * d + out] * scale);
            kraus.push(kr);
        }
        if kraus.is_empty() {
            kraus.push(CMatrix::from_element(d, d, ZERO));
        }
        let ch = Self::new(n, kraus)?;
        let _ = ch.ptm.set(ptm.clone());
        Ok(ch)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    /// `Σ K†K`.
    pub fn kraus_gram(&self) -> CMatrix {
        let d = self.dim();
        self.kraus
            .iter()
            .fold(CMatrix::from_element(d, d, ZERO), |acc, k| acc + k.adjoint() * k)
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        crate::linalg::max_abs_diff(&self.kraus_gram(), &identity(self.dim())) <= tol
    }

    pub fn is_unital(&self, tol: f64) -> bool {
        let out = self.apply(&identity(self.dim()));
        crate::linalg::max_abs_diff(&out, &identity(self.dim())) <= tol
    }

    /// `𝓔(ρ) = Σ K ρ K†`.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let d = self.dim();
        self.kraus
            .iter()
            .fold(CMatrix::from_element(d, d, ZERO), |acc, k| acc + k * rho * k.adjoint())
    }

    /// Adjoint map `𝓔†(·) = Σ K† · K`.
    pub fn adjoint(&self) -> Self {
        Self::new_unchecked(self.n, self.kraus.iter().map(|k| k.adjoint()).collect())
    }

    /// `next ∘ self`: apply `self` first.
    pub fn then(&self, next: &QuantumChannel) -> Result<Self> {
        if self.n != next.n {
            return Err(CoreError::QubitMismatch {
                left: self.n,
                right: next.n,
            });
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() * next.kraus.len());
        for b in &next.kraus {
            for a in &self.kraus {
                kraus.push(b * a);
            }
        }
        Ok(Self::new_unchecked(self.n, prune_zero_kraus(kraus)))
    }

    /// `self ⊗ other`, with `self` on the leading qubits.
    pub fn tensor(&self, other: &QuantumChannel) -> Result<Self> {
        check_cap("QuantumChannel", self.n + other.n, MAX_DENSE_QUBITS)?;
        let mut kraus = Vec::new();
        for a in &self.kraus {
            for b in &other.kraus {
                kraus.push(a.kronecker(b));
            }
        }
        Ok(Self::new_unchecked(self.n + other.n, kraus))
    }

    /// Embeds this channel on `qubits` of an `n_total`-qubit register; the
    /// channel's qubit `j` acts on register qubit `qubits[j]`.
    pub fn embed(&self, n_total: usize, qubits: &[usize]) -> Result<Self> {
        check_cap("QuantumChannel", n_total, MAX_DENSE_QUBITS)?;
        if qubits.len() != self.n {
            return Err(CoreError::QubitMismatch {
                left: qubits.len(),
                right: self.n,
            });
        }
        let kraus = self
            .kraus
            .iter()
            .map(|k| embed_operator(k, qubits, n_total))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new_unchecked(n_total, kraus))
    }

    /// Mixture `Σ w_i 𝓔_i` with nonnegative weights summing to at most one.
    pub fn mixture(parts: &[(f64, &QuantumChannel)]) -> Result<Self> {
        let n = parts.first().ok_or(CoreError::Empty("mixture"))?.1.n;
        let mut kraus = Vec::new();
        for (w, ch) in parts {
            if ch.n != n {
                return Err(CoreError::QubitMismatch { left: n, right: ch.n });
            }
            if *w < 0.0 {
                return Err(CoreError::InvalidChannel(format!("negative mixture weight {w}")));
            }
            let s = w.sqrt();
            kraus.extend(ch.kraus.iter().map(|k| k.map(|z| z * s)));
        }
        Self::new(n, prune_zero_kraus(kraus))
    }

    /// Pauli transfer matrix, computed once and cached.
    pub fn ptm(&self) -> Result<&Ptm> {
        check_cap("channel_to_ptm", self.n, MAX_PTM_QUBITS)?;
        Ok(self.ptm.get_or_init(|| compute_ptm(self)))
    }

    /// Choi state `(𝟙⊗𝓔)(|Ψ⟩⟨Ψ|)` with `|Ψ⟩ = Σ|ii⟩/√d`, index `(in·d + out)`.
    pub fn choi(&self) -> Result<CMatrix> {
        check_cap("choi", self.n, MAX_PTM_QUBITS)?;
        let d = self.dim();
        let mut choi = CMatrix::from_element(d * d, d * d, ZERO);
        for k in &self.kraus {
            // column vector v[in·d + out] = K_{out,in}
            let v: Vec<Complex64> = (0..d * d).map(|idx| k[(idx % d, idx / d)]).collect();
            for r in 0..d * d {
                for c in 0..d * d {
                    choi[(r, c)] += v[r] * v[c].conj();
                }
            }
        }
        Ok(choi.map(|z| z / d as f64))
    }
}

fn prune_zero_kraus(kraus: Vec<CMatrix>) -> Vec<CMatrix> {
    let d = kraus.first().map(|k| k.nrows()).unwrap_or(1);
    let kept: Vec<CMatrix> = kraus
        .into_iter()
        .filter(|k| k.iter().any(|z| z.norm() > 1e-15))
        .collect();
    if kept.is_empty() {
        vec![CMatrix::from_element(d, d, ZERO)]
    } else {
        kept
    }
}

fn compute_ptm(ch: &QuantumChannel) -> Ptm {
    let n = ch.n;
    let d = ch.dim();
    let size = d * d;
    let paulis: Vec<PauliString> = all_paulis(n).collect();
    let mut ptm = Ptm::zeros(size, size);
    for (b, pb) in paulis.iter().enumerate() {
        let mut out = CMatrix::from_element(d, d, ZERO);
        for k in &ch.kraus {
            out += k * pb.left_mul(&k.adjoint());
        }
        for (a, pa) in paulis.iter().enumerate() {
            let t = pa.trace_product(&out);
            debug_assert!(t.im.abs() < 1e-8 * d as f64, "PTM entry not real: {t}");
            ptm[(a, b)] = t.re / d as f64;
        }
    }
    ptm
}

fn choi_from_ptm(n: usize, ptm: &Ptm) -> Result<CMatrix> {
    let d = 1usize << n;
    let paulis: Vec<CMatrix> = all_paulis(n)
        .map(|p| super::pauli::pauli_matrix(&p))
        .collect::<Result<_>>()?;
    let mut choi = CMatrix::from_element(d * d, d * d, ZERO);
    for i in 0..d {
        for j in 0..d {
            // E(|i⟩⟨j|) = (1/d) Σ_ab E_ab tr(P_b |i⟩⟨j|) P_a
            let mut out = CMatrix::from_element(d, d, ZERO);
            for (b, pb) in paulis.iter().enumerate() {
                let coeff = pb[(j, i)];
                if coeff.norm() == 0.0 {
                    continue;
                }
                for (a, pa) in paulis.iter().enumerate() {
                    let e = ptm[(a, b)];
                    if e != 0.0 {
                        out += pa.map(|z| z * coeff * e / d as f64);
                    }
                }
            }
            for o1 in 0..d {
                for o2 in 0..d {
                    choi[(i * d + o1, j * d + o2)] = out[(o1, o2)] / d as f64;
                }
            }
        }
    }
    Ok(choi)
}

/// Embeds a `2^k×2^k` operator acting on `qubits` into an `n`-qubit register.
pub fn embed_operator(op: &CMatrix, qubits: &[usize], n: usize) -> Result<CMatrix> {
    let k = qubits.len();
    if op.nrows() != 1 << k || op.ncols() != 1 << k {
        return Err(CoreError::InvalidChannel(format!(
            "operator shape {:?} does not match {k} qubits",
            op.shape()
        )));
    }
    for (i, &q) in qubits.iter().enumerate() {
        if q >= n || qubits[..i].contains(&q) {
            return Err(CoreError::InvalidCircuit(format!("bad qubit list {qubits:?} for n={n}")));
        }
    }
    let dim = 1usize << n;
    let bitpos: Vec<usize> = qubits.iter().map(|&q| n - 1 - q).collect();
    let mask: usize = bitpos.iter().map(|b| 1usize << b).sum();
    let local = |full: usize| -> usize {
        bitpos
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | ((full >> b) & 1))
    };
    let mut out = CMatrix::from_element(dim, dim, ZERO);
    for col in 0..dim {
        let lc = local(col);
        let rest = col & !mask;
        for lr in 0..(1usize << k) {
            let v = op[(lr, lc)];
            if v == ZERO {
                continue;
            }
            let mut row = rest;
            for (j, &b) in bitpos.iter().enumerate() {
                if (lr >> (k - 1 - j)) & 1 == 1 {
                    row |= 1 << b;
                }
            }
            out[(row, col)] = v;
        }
    }
    Ok(out)
}

/// Global depolarizing channel `ρ ↦ pρ + (1-p) tr(ρ) 𝟙/2ⁿ`.
///
/// `p` may go down to `-1/(4ⁿ-1)` and stay completely positive.
pub fn depolarizing_channel(p: f64, n: usize) -> Result<QuantumChannel> {
    check_cap("depolarizing_channel", n, MAX_PTM_QUBITS)?;
    let dd = (1usize << (2 * n)) as f64;
    let lo = -1.0 / (dd - 1.0);
    if !(lo - 1e-12..=1.0 + 1e-12).contains(&p) {
        return Err(CoreError::OutOfRange {
            name: "polarization",
            value: p,
            lo,
            hi: 1.0,
        });
    }
    let mut alphas = vec![(1.0 - p) / dd; 1 << (2 * n)];
    alphas[0] = (1.0 + (dd - 1.0) * p) / dd;
    QuantumChannel::from_pauli_probabilities(n, &alphas)
}

/// Serialized channel: `n` plus Kraus matrices as rows of `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ChannelDocument {
    pub n: usize,
    pub kraus: Vec<Vec<Vec<[f64; 2]>>>,
}

impl ChannelDocument {
    pub fn from_channel(ch: &QuantumChannel) -> Self {
        let kraus = ch
            .kraus
            .iter()
            .map(|k| {
                (0..k.nrows())
                    .map(|r| (0..k.ncols()).map(|c| [k[(r, c)].re, k[(r, c)].im]).collect())
                    .collect()
            })
            .collect();
        Self { n: ch.n, kraus }
    }

    pub fn to_channel(&self) -> Result<QuantumChannel> {
        check_cap("QuantumChannel", self.n, MAX_DENSE_QUBITS)?;
        let d = 1usize << self.n;
        let mut mats = Vec::with_capacity(self.kraus.len());
        for (i, rows) in self.kraus.iter().enumerate() {
            if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                return Err(CoreError::InvalidChannel(format!(
                    "Kraus operator {i} is not {d}x{d}"
                )));
            }
            mats.push(CMatrix::from_fn(d, d, |r, c| {
                Complex64::new(rows[r][c][0], rows[r][c][1])
            }));
        }
        QuantumChannel::new(self.n, mats)
    }
}

/// Random channel with `rank` Kraus operators from a Haar-random isometry.
/// The result is trace preserving and, generically, neither unital nor Pauli.
pub fn random_channel<R: rand::Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> QuantumChannel {
    let d = 1usize << n;
    let u = crate::linalg::random_unitary(d * rank, rng);
    let kraus = (0..rank)
        .map(|k| CMatrix::from_fn(d, d, |r, c| u[(k * d + r, c)]))
        .collect();
    QuantumChannel::new_unchecked(n, kraus)
}

/// Sum of `|tr K|²`, i.e. `4ⁿ F_ent`, without forming the transfer matrix.
pub fn kraus_trace_weight(ch: &QuantumChannel) -> f64 {
    ch.kraus.iter().map(|k| trace(k).norm_sqr()).sum()
}
