//! Small dense complex linear-algebra helpers on top of `nalgebra`.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Builds a 2×2 matrix from row-major entries.
pub fn mat2(a: Complex64, b: Complex64, cc: Complex64, d: Complex64) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[a, b, cc, d])
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Smallest eigenvalue of a Hermitian matrix (the anti-Hermitian part is dropped).
pub fn min_hermitian_eigenvalue(m: &CMatrix) -> f64 {
    let h = (m + m.adjoint()).map(|z| z * 0.5);
    h.symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn max_hermitian_eigenvalue(m: &CMatrix) -> f64 {
    let h = (m + m.adjoint()).map(|z| z * 0.5);
    h.symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// True when `a` equals `b` up to a global phase, within `tol` entrywise.
pub fn equal_up_to_phase(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
    if a.shape() != b.shape() {
        return false;
    }
    // Phase from the largest entry of b.
    let (idx, _) = b
        .iter()
        .enumerate()
        .fold((0, 0.0), |acc, (i, z)| if z.norm() > acc.1 { (i, z.norm()) } else { acc });
    let bz = b[idx];
    let az = a[idx];
    if bz.norm() < tol || az.norm() < tol {
        return false;
    }
    let phase = az / bz;
    if (phase.norm() - 1.0).abs() > tol {
        return false;
    }
    a.iter().zip(b.iter()).all(|(x, y)| (x - y * phase).norm() <= tol)
}

/// Multiplies by a unit phase so that the first entry (row-major) with modulus
/// above `1e-9` becomes real and positive.
pub fn canonical_phase(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    for r in 0..n {
        for col in 0..m.ncols() {
            let z = m[(r, col)];
            if z.norm() > 1e-9 {
                let ph = z.conj() / z.norm();
                return m.map(|w| w * ph);
            }
        }
    }
    m.clone()
}

/// Random `dim`×`dim` matrix with standard complex Gaussian entries.
pub fn random_ginibre<R: rand::Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    use rand_distr::{Distribution, StandardNormal};
    CMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        c(re, im)
    })
}

/// Haar-random unitary via QR of a Ginibre matrix with phase correction.
pub fn random_unitary<R: rand::Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = random_ginibre(dim, rng);
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let mut out = q.clone();
    for j in 0..dim {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for i in 0..dim {
            out[(i, j)] = q[(i, j)] * ph;
        }
    }
    out
}

/// Random full-rank density matrix (Ginibre ensemble, normalized).
pub fn random_density<R: rand::Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = random_ginibre(dim, rng);
    let rho = &g * g.adjoint();
    let t = trace(&rho);
    rho.map(|z| z / t)
}
