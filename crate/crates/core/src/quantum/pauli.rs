//! Hermitian Pauli strings in symplectic bit form.
//!
//! A Pauli string on `n` qubits is a `2n`-bit string `a₁a₂…a₂ₙ` where the pair
//! `(a₂ⱼ₋₁, a₂ⱼ)` holds the X and Z exponents of qubit `j`. The operator is
//! `i^{#Y} · ∏ⱼ Xⱼ^{x} Zⱼ^{z}`; the `i^{#Y}` factor (`aᵀΥa` counts the qubits
//! carrying both exponents) makes every string Hermitian, so `11` is `Y`.
//!
//! Enumeration order for transfer matrices and Pauli channels: the per-qubit
//! code is `I=0, X=1, Z=2, Y=3` and qubit 0 is the most significant base-4
//! digit, which makes the transfer matrix of `A⊗B` the Kronecker product of
//! the factors' transfer matrices.

use std::fmt;

use num_complex::Complex64;

use crate::error::{check_cap, CoreError, Result};
use crate::linalg::{CMatrix, ZERO};
use crate::MAX_DENSE_QUBITS;

/// Largest register a `PauliString` can describe.
pub const MAX_PAULI_QUBITS: usize = 32;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n: usize,
    /// Bit `q` is the X exponent on qubit `q`.
    x: u64,
    /// Bit `q` is the Z exponent on qubit `q`.
    z: u64,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_PAULI_QUBITS);
        Self { n, x: 0, z: 0 }
    }

    pub fn from_masks(n: usize, x: u64, z: u64) -> Result<Self> {
        check_cap("Pauli string", n, MAX_PAULI_QUBITS)?;
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        if x & !full != 0 || z & !full != 0 {
            return Err(CoreError::InvalidBits(format!("masks {x:#b}/{z:#b} exceed {n} qubits")));
        }
        Ok(Self { n, x, z })
    }

    /// Parses the interleaved `2n`-bit form, e.g. `"1001"` is `X⊗Z`.
    pub fn from_bits(bits: &str) -> Result<Self> {
        if !bits.len().is_multiple_of(2) || bits.is_empty() {
            return Err(CoreError::InvalidBits(bits.to_string()));
        }
        let n = bits.len() / 2;
        check_cap("Pauli string", n, MAX_PAULI_QUBITS)?;
        let (mut x, mut z) = (0u64, 0u64);
        for (k, ch) in bits.chars().enumerate() {
            let bit = match ch {
                '0' => 0,
                '1' => 1,
                _ => return Err(CoreError::InvalidBits(bits.to_string())),
            };
            let q = k / 2;
            if k % 2 == 0 {
                x |= bit << q;
            } else {
                z |= bit << q;
            }
        }
        Ok(Self { n, x, z })
    }

    /// Parses a label such as `"XIZ"` (qubit 0 first). `Y` sets both exponents.
    pub fn from_label(label: &str) -> Result<Self> {
        let n = label.chars().count();
        check_cap("Pauli string", n, MAX_PAULI_QUBITS)?;
        let (mut x, mut z) = (0u64, 0u64);
        for (q, ch) in label.chars().enumerate() {
            match ch {
                'I' => {}
                'X' => x |= 1 << q,
                'Z' => z |= 1 << q,
                'Y' => {
                    x |= 1 << q;
                    z |= 1 << q
                }
                _ => return Err(CoreError::InvalidBits(label.to_string())),
            }
        }
        Ok(Self { n, x, z })
    }

    /// Inverse of [`PauliString::index`].
    pub fn from_index(n: usize, index: usize) -> Self {
        assert!(n <= MAX_PAULI_QUBITS);
        let (mut x, mut z) = (0u64, 0u64);
        for q in 0..n {
            let code = (index >> (2 * (n - 1 - q))) & 3;
            x |= ((code & 1) as u64) << q;
            z |= (((code >> 1) & 1) as u64) << q;
        }
        Self { n, x, z }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    /// Position in the transfer-matrix ordering.
    pub fn index(&self) -> usize {
        let mut idx = 0usize;
        for q in 0..self.n {
            let code = ((self.x >> q) & 1) | (((self.z >> q) & 1) << 1);
            idx = (idx << 2) | code as usize;
        }
        idx
    }

    /// The interleaved `2n`-bit form.
    pub fn bits(&self) -> String {
        let mut s = String::with_capacity(2 * self.n);
        for q in 0..self.n {
            s.push(if (self.x >> q) & 1 == 1 { '1' } else { '0' });
            s.push(if (self.z >> q) & 1 == 1 { '1' } else { '0' });
        }
        s
    }

    pub fn label(&self) -> String {
        (0..self.n)
            .map(|q| match ((self.x >> q) & 1, (self.z >> q) & 1) {
                (0, 0) => 'I',
                (1, 0) => 'X',
                (0, 1) => 'Z',
                _ => 'Y',
            })
            .collect()
    }

    /// X mask in computational-basis bit positions (qubit `q` ↔ bit `n-1-q`).
    fn basis_x(&self) -> usize {
        reverse_low_bits(self.x, self.n) as usize
    }

    fn basis_z(&self) -> usize {
        reverse_low_bits(self.z, self.n) as usize
    }

    /// Action on a basis state: `P|k⟩ = phase · |k'⟩`.
    #[inline]
    pub fn apply_to_basis(&self, k: usize) -> (Complex64, usize) {
        let bx = self.basis_x();
        let bz = self.basis_z();
        let ny = (self.x & self.z).count_ones();
        let sign = if (k & bz).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        (i_pow(ny) * sign, k ^ bx)
    }

    /// Phases `ph[j]` and flip mask `fx` with `P|j⟩ = ph[j] |j ⊕ fx⟩`.
    pub(crate) fn monomial(&self) -> (Vec<Complex64>, usize) {
        let dim = 1usize << self.n;
        let bz = self.basis_z();
        let base = i_pow((self.x & self.z).count_ones());
        let ph = (0..dim)
            .map(|j| if (j & bz).count_ones() % 2 == 1 { -base } else { base })
            .collect();
        (ph, self.basis_x())
    }

    /// `tr[P · m]` in `O(2ⁿ)`.
    pub fn trace_product(&self, m: &CMatrix) -> Complex64 {
        let (ph, fx) = self.monomial();
        ph.iter()
            .enumerate()
            .map(|(j, p)| p * m[(j, j ^ fx)])
            .sum()
    }

    /// `P · m`.
    pub fn left_mul(&self, m: &CMatrix) -> CMatrix {
        let (ph, fx) = self.monomial();
        let dim = m.nrows();
        let mut out = CMatrix::from_element(dim, m.ncols(), ZERO);
        for j in 0..dim {
            let k = j ^ fx;
            for col in 0..m.ncols() {
                out[(k, col)] = ph[j] * m[(j, col)];
            }
        }
        out
    }

    /// `m · P`.
    pub fn right_mul(&self, m: &CMatrix) -> CMatrix {
        let (ph, fx) = self.monomial();
        let dim = m.ncols();
        let mut out = CMatrix::from_element(m.nrows(), dim, ZERO);
        // (mP)_{r,j} = Σ_k m_{r,k} P_{k,j} = m_{r, j⊕fx} ph[j]
        for r in 0..m.nrows() {
            for j in 0..dim {
                out[(r, j)] = m[(r, j ^ fx)] * ph[j];
            }
        }
        out
    }

    /// `P · m · P`.
    pub fn conjugate(&self, m: &CMatrix) -> CMatrix {
        self.right_mul(&self.left_mul(m))
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({})", self.label())
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn reverse_low_bits(v: u64, n: usize) -> u64 {
    if n == 0 {
        0
    } else {
        v.reverse_bits() >> (64 - n)
    }
}

fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `⟨a,b⟩ mod 2`; zero exactly when `P_a` and `P_b` commute.
pub fn symplectic_product(a: &PauliString, b: &PauliString) -> Result<u8> {
    if a.n != b.n {
        return Err(CoreError::LengthMismatch {
            left: 2 * a.n,
            right: 2 * b.n,
        });
    }
    Ok((((a.x & b.z) ^ (a.z & b.x)).count_ones() % 2) as u8)
}

/// Dense `2ⁿ×2ⁿ` matrix of the Hermitian Pauli operator.
pub fn pauli_matrix(a: &PauliString) -> Result<CMatrix> {
    check_cap("pauli_matrix", a.n, MAX_DENSE_QUBITS)?;
    let dim = 1usize << a.n;
    let mut m = CMatrix::from_element(dim, dim, ZERO);
    for j in 0..dim {
        let (ph, k) = a.apply_to_basis(j);
        m[(k, j)] = ph;
    }
    Ok(m)
}

/// All `4ⁿ` Pauli strings in transfer-matrix order.
pub fn all_paulis(n: usize) -> impl Iterator<Item = PauliString> {
    (0..1usize << (2 * n)).map(move |i| PauliString::from_index(n, i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, max_abs_diff, mat2, trace, I, ONE};

    fn commutator_vanishes(a: &CMatrix, b: &CMatrix) -> bool {
        max_abs_diff(&(a * b), &(b * a)) < 1e-12
    }

    #[test]
    fn x_and_z_anticommute() {
        let x = PauliString::from_bits("10").unwrap();
        let z = PauliString::from_bits("01").unwrap();
        assert_eq!(symplectic_product(&x, &z).unwrap(), 1);
    }

    #[test]
    fn identity_commutes_with_everything() {
        let id = PauliString::from_bits("0000").unwrap();
        for p in all_paulis(2) {
            assert_eq!(symplectic_product(&p, &id).unwrap(), 0);
        }
    }

    #[test]
    fn xz_commutes_with_zx_by_explicit_commutator() {
        let a = PauliString::from_bits("1001").unwrap();
        let b = PauliString::from_bits("0110").unwrap();
        assert_eq!(a.label(), "XZ");
        assert_eq!(b.label(), "ZX");
        let ma = pauli_matrix(&a).unwrap();
        let mb = pauli_matrix(&b).unwrap();
        assert!(commutator_vanishes(&ma, &mb));
        assert_eq!(symplectic_product(&a, &b).unwrap(), 0);
    }

    #[test]
    fn mismatched_lengths_error() {
        let a = PauliString::from_bits("10").unwrap();
        let b = PauliString::from_bits("1001").unwrap();
        assert!(symplectic_product(&a, &b).is_err());
    }

    #[test]
    fn symplectic_product_matches_matrix_commutation_n2() {
        for a in all_paulis(2) {
            for b in all_paulis(2) {
                let comm = commutator_vanishes(&pauli_matrix(&a).unwrap(), &pauli_matrix(&b).unwrap());
                assert_eq!(symplectic_product(&a, &b).unwrap() == 0, comm, "{a} {b}");
            }
        }
    }

    #[test]
    fn single_qubit_matrices() {
        let id = pauli_matrix(&PauliString::from_bits("00").unwrap()).unwrap();
        assert!(max_abs_diff(&id, &identity(2)) < 1e-15);
        let x = pauli_matrix(&PauliString::from_bits("10").unwrap()).unwrap();
        assert!(max_abs_diff(&x, &mat2(0.0.into(), ONE, ONE, 0.0.into())) < 1e-15);
        // "11": i·X·Z by direct multiplication is Y.
        let y = pauli_matrix(&PauliString::from_bits("11").unwrap()).unwrap();
        let xm = mat2(0.0.into(), ONE, ONE, 0.0.into());
        let zm = mat2(ONE, 0.0.into(), 0.0.into(), -ONE);
        let ixz = (&xm * &zm).map(|v| v * I);
        assert!(max_abs_diff(&y, &ixz) < 1e-15);
        assert!(max_abs_diff(&y, &y.adjoint()) < 1e-15);
        assert!(trace(&y).norm() < 1e-15);
        assert!(max_abs_diff(&y, &mat2(0.0.into(), -I, I, 0.0.into())) < 1e-15);
    }

    #[test]
    fn all_paulis_are_hermitian_involutions() {
        for p in all_paulis(3) {
            let m = pauli_matrix(&p).unwrap();
            assert!(max_abs_diff(&m, &m.adjoint()) < 1e-15);
            assert!(max_abs_diff(&(&m * &m), &identity(8)) < 1e-15);
        }
    }

    #[test]
    fn tensor_order_and_index() {
        let p = PauliString::from_label("XZ").unwrap();
        let x = pauli_matrix(&PauliString::from_label("X").unwrap()).unwrap();
        let z = pauli_matrix(&PauliString::from_label("Z").unwrap()).unwrap();
        assert!(max_abs_diff(&pauli_matrix(&p).unwrap(), &x.kronecker(&z)) < 1e-15);
        for (i, q) in all_paulis(3).enumerate() {
            assert_eq!(q.index(), i);
            assert_eq!(PauliString::from_bits(&q.bits()).unwrap(), q);
        }
    }

    #[test]
    fn fast_products_match_dense() {
        let mut m = CMatrix::from_fn(4, 4, |r, c| Complex64::new(r as f64 + 0.5, c as f64 - 1.0));
        m[(1, 2)] = Complex64::new(0.3, 0.7);
        for p in all_paulis(2) {
            let pm = pauli_matrix(&p).unwrap();
            assert!(max_abs_diff(&p.left_mul(&m), &(&pm * &m)) < 1e-13);
            assert!(max_abs_diff(&p.right_mul(&m), &(&m * &pm)) < 1e-13);
            assert!((p.trace_product(&m) - trace(&(&pm * &m))).norm() < 1e-13);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let big = PauliString::identity(13);
        assert!(matches!(pauli_matrix(&big), Err(CoreError::CapExceeded { .. })));
    }
}
