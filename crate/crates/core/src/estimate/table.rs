//! Sparse outcome distributions and bit-string helpers.

use crate::error::{CoreError, Result};

/// Largest register whose outcomes fit a table (bit strings index a `u64`).
pub const MAX_TABLE_QUBITS: usize = 26;

const VALUE_TOLERANCE: f64 = 1e-9;

/// Estimated (or exact) probabilities over computational-basis outcomes.
/// Absent outcomes have probability zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTable {
    n: usize,
    /// Sorted by outcome index, no duplicates, no zero values.
    entries: Vec<(u64, f64)>,
    /// Shots behind the estimate; 0 marks an exact distribution.
    n_meas: u64,
}

impl ProbabilityTable {
    pub fn from_sparse(n: usize, mut entries: Vec<(u64, f64)>, n_meas: u64) -> Result<Self> {
        if n == 0 || n > MAX_TABLE_QUBITS {
            return Err(CoreError::CapExceeded {
                what: "ProbabilityTable",
                n,
                cap: MAX_TABLE_QUBITS,
            });
        }
        let dim = 1u64 << n;
        entries.sort_unstable_by_key(|e| e.0);
        let mut merged: Vec<(u64, f64)> = Vec::with_capacity(entries.len());
        for (idx, p) in entries {
            if idx >= dim {
                return Err(CoreError::InvalidData(format!("outcome {idx} outside {n} qubits")));
            }
            if !p.is_finite() || !(-VALUE_TOLERANCE..=1.0 + VALUE_TOLERANCE).contains(&p) {
                return Err(CoreError::InvalidData(format!("probability {p} outside [0, 1]")));
            }
            let p = p.clamp(0.0, 1.0);
            match merged.last_mut() {
                Some(last) if last.0 == idx => last.1 += p,
                _ => merged.push((idx, p)),
            }
        }
        merged.retain(|e| e.1 > 0.0);
        let total: f64 = merged.iter().map(|e| e.1).sum();
        if total > 1.0 + VALUE_TOLERANCE {
            return Err(CoreError::InvalidData(format!("probabilities sum to {total} > 1")));
        }
        Ok(Self {
            n,
            entries: merged,
            n_meas,
        })
    }

    pub fn from_dense(n: usize, probs: &[f64], n_meas: u64) -> Result<Self> {
        if n > MAX_TABLE_QUBITS || probs.len() != 1usize << n {
            return Err(CoreError::LengthMismatch {
                left: probs.len(),
                right: 1usize.checked_shl(n as u32).unwrap_or(0),
            });
        }
        let entries = probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != 0.0)
            .map(|(i, &p)| (i as u64, p))
            .collect();
        Self::from_sparse(n, entries, n_meas)
    }

    /// `P̂(s) = count(s)/N`.
    pub fn from_counts(n: usize, counts: &[(u64, u64)], n_meas: u64) -> Result<Self> {
        if n_meas == 0 {
            return Err(CoreError::InvalidData("N_meas must be at least 1 for counts".into()));
        }
        let sum: u64 = counts.iter().map(|c| c.1).sum();
        if sum != n_meas {
            return Err(CoreError::InvalidData(format!("counts sum to {sum}, N_meas is {n_meas}")));
        }
        let entries = counts.iter().map(|&(i, c)| (i, c as f64 / n_meas as f64)).collect();
        Self::from_sparse(n, entries, n_meas)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_meas(&self) -> u64 {
        self.n_meas
    }

    pub fn is_exact(&self) -> bool {
        self.n_meas == 0
    }

    pub fn entries(&self) -> &[(u64, f64)] {
        &self.entries
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, idx: u64) -> f64 {
        self.entries
            .binary_search_by_key(&idx, |e| e.0)
            .map(|i| self.entries[i].1)
            .unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|e| e.1).sum()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; 1usize << self.n];
        for &(i, p) in &self.entries {
            out[i as usize] = p;
        }
        out
    }
}

/// Bit string of an outcome index; character `i` is qubit `i`.
pub fn index_to_bits(idx: u64, n: usize) -> String {
    (0..n)
        .map(|q| if (idx >> (n - 1 - q)) & 1 == 1 { '1' } else { '0' })
        .collect()
}

pub fn bits_to_index(bits: &str) -> Result<u64> {
    if bits.is_empty() || bits.len() > 64 {
        return Err(CoreError::InvalidBits(bits.to_string()));
    }
    bits.chars().try_fold(0u64, |acc, ch| match ch {
        '0' => Ok(acc << 1),
        '1' => Ok((acc << 1) | 1),
        _ => Err(CoreError::InvalidBits(bits.to_string())),
    })
}

/// Number of positions where two bit strings differ.
pub fn hamming(a: &str, b: &str) -> Result<u32> {
    if a.len() != b.len() {
        return Err(CoreError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok((bits_to_index(a)? ^ bits_to_index(b)?).count_ones())
}

/// Unbiased estimator of `P²` from `P̂` over `N` shots: `P̂(P̂N − 1)/(N − 1)`.
pub fn unbiased_square(phat: f64, n_meas: u64) -> Result<f64> {
    if n_meas < 2 {
        return Err(CoreError::InvalidData(format!("unbiased square needs N_meas >= 2, got {n_meas}")));
    }
    let n = n_meas as f64;
    let count = phat * n;
    if (count - count.round()).abs() > 1e-9 {
        return Err(CoreError::InvalidData(format!("P̂ = {phat} is not a multiple of 1/{n_meas}")));
    }
    Ok(phat * (count - 1.0) / (n - 1.0))
}
