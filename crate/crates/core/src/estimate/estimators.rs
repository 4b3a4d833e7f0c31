//! Per-depth purity and fidelity estimates with median-of-means aggregation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kernel::{fidelity_kernel, purity_kernel, KernelMethod};
use super::table::ProbabilityTable;
use crate::error::{CoreError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimateKind {
    Purity,
    Fidelity,
}

impl std::fmt::Display for EstimateKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EstimateKind::Purity => "purity",
            EstimateKind::Fidelity => "fidelity",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthEstimate {
    pub kind: EstimateKind,
    pub m: u32,
    /// Median of the group means.
    pub value: f64,
    pub groups: Vec<f64>,
    /// Kernel value of every `(circuit, W)` table, in input order.
    pub per_table: Vec<f64>,
    pub n_tables: usize,
}

/// Median; the mean of the two middle values for an even count.
pub fn median_of_means(group_means: &[f64]) -> Result<f64> {
    if group_means.is_empty() {
        return Err(CoreError::Empty("median of means"));
    }
    let mut v = group_means.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    Ok(if k % 2 == 1 { v[k / 2] } else { 0.5 * (v[k / 2 - 1] + v[k / 2]) })
}

/// Means of `k` interleaved groups: value `i` goes to group `i mod k`.
pub fn group_means(values: &[f64], k: usize) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(CoreError::Empty("estimator input"));
    }
    if k == 0 || k > values.len() {
        return Err(CoreError::InvalidData(format!(
            "cannot split {} tables into {k} groups",
            values.len()
        )));
    }
    let mut sums = vec![0.0; k];
    let mut counts = vec![0usize; k];
    for (i, v) in values.iter().enumerate() {
        sums[i % k] += v;
        counts[i % k] += 1;
    }
    Ok(sums.iter().zip(&counts).map(|(s, &c)| s / c as f64).collect())
}

/// Median of interleaved group means of `values`.
pub fn aggregate(values: &[f64], k: usize) -> Result<(f64, Vec<f64>)> {
    let groups = group_means(values, k)?;
    Ok((median_of_means(&groups)?, groups))
}

fn check_same_n(tables: &[ProbabilityTable]) -> Result<usize> {
    let n = tables.first().ok_or(CoreError::Empty("estimator input"))?.n();
    if let Some(t) = tables.iter().find(|t| t.n() != n) {
        return Err(CoreError::QubitMismatch { left: n, right: t.n() });
    }
    Ok(n)
}

/// Average purity at depth `m` from one table per `(circuit, W)` pair.
pub fn purity_estimator(m: u32, tables: &[ProbabilityTable], k: usize, method: KernelMethod) -> Result<DepthEstimate> {
    check_same_n(tables)?;
    let per_table = tables
        .par_iter()
        .map(|t| purity_kernel(t, method))
        .collect::<Result<Vec<_>>>()?;
    let (value, groups) = aggregate(&per_table, k)?;
    Ok(DepthEstimate {
        kind: EstimateKind::Purity,
        m,
        value,
        groups,
        n_tables: per_table.len(),
        per_table,
    })
}

/// Average fidelity at depth `m`; `ideal[i]` is the noiseless table paired with `tables[i]`.
pub fn fidelity_estimator(
    m: u32,
    tables: &[ProbabilityTable],
    ideal: &[ProbabilityTable],
    k: usize,
    method: KernelMethod,
) -> Result<DepthEstimate> {
    let n = check_same_n(tables)?;
    if tables.len() != ideal.len() {
        return Err(CoreError::LengthMismatch {
            left: tables.len(),
            right: ideal.len(),
        });
    }
    if let Some(t) = ideal.iter().find(|t| t.n() != n) {
        return Err(CoreError::QubitMismatch { left: n, right: t.n() });
    }
    let per_table = tables
        .par_iter()
        .zip(ideal.par_iter())
        .map(|(p, q)| fidelity_kernel(p, q, method))
        .collect::<Result<Vec<_>>>()?;
    let (value, groups) = aggregate(&per_table, k)?;
    Ok(DepthEstimate {
        kind: EstimateKind::Fidelity,
        m,
        value,
        groups,
        n_tables: per_table.len(),
        per_table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_examples() {
        assert_eq!(median_of_means(&[0.2, 0.5, 0.9]).unwrap(), 0.5);
        assert_eq!(median_of_means(&[0.2, 0.8]).unwrap(), 0.5);
        assert_eq!(median_of_means(&[0.3]).unwrap(), 0.3);
        assert!(median_of_means(&[]).is_err());
    }

    #[test]
    fn interleaved_groups() {
        let g = group_means(&[1.0, 2.0, 3.0, 4.0, 5.0], 2).unwrap();
        assert_eq!(g, vec![3.0, 3.0]);
        assert!(group_means(&[1.0], 2).is_err());
    }

    #[test]
    fn maximally_mixed_purity() {
        for n in 1..=3 {
            let d = 1usize << n;
            let t = ProbabilityTable::from_dense(n, &vec![1.0 / d as f64; d], 0).unwrap();
            let e = purity_estimator(0, &[t.clone(), t], 1, KernelMethod::Auto).unwrap();
            assert!((e.value - 1.0 / d as f64).abs() < 1e-12);
        }
    }
}
