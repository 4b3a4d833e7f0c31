//! Hamming-weighted cross-correlation kernels.
//!
//! Purity: `2ⁿ Σ_{s,s'} (−2)^{−h(s,s')} P̂(s)P̂(s')`. For shot tables the
//! `s = s'` terms use the unbiased square and the `s ≠ s'` products are scaled
//! by `N/(N−1)`, since multinomial frequencies give `E[P̂(s)P̂(s')] = (1 − 1/N)P(s)P(s')`.
//! Fidelity: the same sum over `P̂(s)Q̂(s')`.
//!
//! Three evaluation paths give the same number: the sparse pair sum over the
//! support, the dense pair sum over all outcomes, and a tensor-product
//! transform. The weight factorizes per qubit as `[[1, −½], [−½, 1]]`, so
//! `Σ w P Q = ⟨P, M^{⊗n} Q⟩` costs `O(n 2ⁿ)` instead of `O(4ⁿ)`.

use super::table::{unbiased_square, ProbabilityTable};
use crate::error::{CoreError, Result};

/// Largest register for the dense paths.
pub const MAX_DENSE_KERNEL_QUBITS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct KernelStats {
    /// Unordered `s ≠ s'` pairs visited.
    pub offdiag_pairs: u64,
    pub diag_terms: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KernelMethod {
    /// Sparse pairs for small supports, transform otherwise.
    #[default]
    Auto,
    Sparse,
    DensePairs,
    Transform,
}

fn weights(n: usize) -> Vec<f64> {
    (0..=n).map(|h| (-0.5f64).powi(h as i32)).collect()
}

fn diag_term(p: f64, n_meas: u64) -> Result<f64> {
    if n_meas == 0 {
        Ok(p * p)
    } else {
        unbiased_square(p, n_meas)
    }
}

fn offdiag_factor(n_meas: u64) -> f64 {
    if n_meas == 0 {
        1.0
    } else {
        n_meas as f64 / (n_meas as f64 - 1.0)
    }
}

fn scale(n: usize) -> f64 {
    (1u64 << n) as f64
}

/// Number of unordered off-diagonal pairs a pairwise evaluation visits.
pub fn pair_count(support: usize) -> u64 {
    let s = support as u64;
    s * s.saturating_sub(1) / 2
}

fn prefer_sparse(n: usize, support: usize) -> bool {
    let pairs = (support as f64).powi(2);
    pairs <= 64.0 * n as f64 * scale(n) || n > MAX_DENSE_KERNEL_QUBITS
}

pub fn purity_kernel(table: &ProbabilityTable, method: KernelMethod) -> Result<f64> {
    match method {
        KernelMethod::Sparse => Ok(purity_kernel_sparse(table)?.0),
        KernelMethod::DensePairs => Ok(purity_kernel_dense_pairs(table)?.0),
        KernelMethod::Transform => purity_kernel_transform(table),
        KernelMethod::Auto => {
            if prefer_sparse(table.n(), table.support_len()) {
                Ok(purity_kernel_sparse(table)?.0)
            } else {
                purity_kernel_transform(table)
            }
        }
    }
}

pub fn purity_kernel_sparse(table: &ProbabilityTable) -> Result<(f64, KernelStats)> {
    let w = weights(table.n());
    let e = table.entries();
    let mut stats = KernelStats::default();
    let mut diag = 0.0;
    let mut off = 0.0;
    for (i, &(si, pi)) in e.iter().enumerate() {
        diag += diag_term(pi, table.n_meas())?;
        stats.diag_terms += 1;
        for &(sj, pj) in &e[i + 1..] {
            off += w[(si ^ sj).count_ones() as usize] * pi * pj;
            stats.offdiag_pairs += 1;
        }
    }
    Ok((scale(table.n()) * (diag + 2.0 * offdiag_factor(table.n_meas()) * off), stats))
}

pub fn purity_kernel_dense_pairs(table: &ProbabilityTable) -> Result<(f64, KernelStats)> {
    check_dense(table.n())?;
    let w = weights(table.n());
    let p = table.to_dense();
    let mut stats = KernelStats::default();
    let mut diag = 0.0;
    let mut off = 0.0;
    for i in 0..p.len() {
        diag += diag_term(p[i], table.n_meas())?;
        stats.diag_terms += 1;
        for j in i + 1..p.len() {
            off += w[(i ^ j).count_ones() as usize] * p[i] * p[j];
            stats.offdiag_pairs += 1;
        }
    }
    Ok((scale(table.n()) * (diag + 2.0 * offdiag_factor(table.n_meas()) * off), stats))
}

fn check_dense(n: usize) -> Result<()> {
    if n > MAX_DENSE_KERNEL_QUBITS {
        Err(CoreError::CapExceeded {
            what: "dense kernel",
            n,
            cap: MAX_DENSE_KERNEL_QUBITS,
        })
    } else {
        Ok(())
    }
}

/// In place `v ← M^{⊗n} v` with `M = [[1, −½], [−½, 1]]`.
fn apply_weight_transform(v: &mut [f64]) {
    let mut h = 1;
    while h < v.len() {
        for block in v.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x - 0.5 * y;
                *b = y - 0.5 * x;
            }
        }
        h *= 2;
    }
}

pub fn purity_kernel_transform(table: &ProbabilityTable) -> Result<f64> {
    check_dense(table.n())?;
    let p = table.to_dense();
    let mut mp = p.clone();
    apply_weight_transform(&mut mp);
    let full: f64 = p.iter().zip(&mp).map(|(a, b)| a * b).sum();
    let (mut raw_diag, mut diag) = (0.0, 0.0);
    for &(_, pi) in table.entries() {
        raw_diag += pi * pi;
        diag += diag_term(pi, table.n_meas())?;
    }
    Ok(scale(table.n()) * (diag + offdiag_factor(table.n_meas()) * (full - raw_diag)))
}

fn check_pair(p: &ProbabilityTable, q: &ProbabilityTable) -> Result<()> {
    if p.n() != q.n() {
        return Err(CoreError::QubitMismatch {
            left: p.n(),
            right: q.n(),
        });
    }
    Ok(())
}

pub fn fidelity_kernel(p: &ProbabilityTable, q: &ProbabilityTable, method: KernelMethod) -> Result<f64> {
    check_pair(p, q)?;
    match method {
        KernelMethod::Sparse | KernelMethod::DensePairs => fidelity_kernel_sparse(p, q),
        KernelMethod::Transform => fidelity_kernel_transform(p, q),
        KernelMethod::Auto => {
            let work = (p.support_len() as f64) * (q.support_len() as f64);
            if work <= 64.0 * p.n() as f64 * scale(p.n()) || p.n() > MAX_DENSE_KERNEL_QUBITS {
                fidelity_kernel_sparse(p, q)
            } else {
                fidelity_kernel_transform(p, q)
            }
        }
    }
}

pub fn fidelity_kernel_sparse(p: &ProbabilityTable, q: &ProbabilityTable) -> Result<f64> {
    check_pair(p, q)?;
    let w = weights(p.n());
    let mut acc = 0.0;
    for &(si, pi) in p.entries() {
        for &(sj, qj) in q.entries() {
            acc += w[(si ^ sj).count_ones() as usize] * pi * qj;
        }
    }
    Ok(scale(p.n()) * acc)
}

pub fn fidelity_kernel_transform(p: &ProbabilityTable, q: &ProbabilityTable) -> Result<f64> {
    check_pair(p, q)?;
    check_dense(p.n())?;
    let pd = p.to_dense();
    let mut mq = q.to_dense();
    apply_weight_transform(&mut mq);
    Ok(scale(p.n()) * pd.iter().zip(&mq).map(|(a, b)| a * b).sum::<f64>())
}
