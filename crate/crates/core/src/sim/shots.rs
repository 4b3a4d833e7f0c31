//! Shot sampling and the persisted shot-record format.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::estimate::table::{bits_to_index, index_to_bits, ProbabilityTable};

/// Outcome counts of one `(m, circuit, W)` run. `N_meas = 0` marks an exact
/// record whose distribution is stored in `probs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShotRecord {
    pub n: usize,
    pub m: u32,
    pub circuit_id: usize,
    pub w_id: usize,
    #[serde(rename = "N_meas")]
    pub n_meas: u64,
    #[serde(default)]
    pub counts: BTreeMap<String, u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probs: Option<BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
}

impl ShotRecord {
    pub fn key(&self) -> (u32, usize, usize) {
        (self.m, self.circuit_id, self.w_id)
    }

    pub fn from_counts(n: usize, key: (u32, usize, usize), counts: &[(u64, u64)]) -> Self {
        let n_meas = counts.iter().map(|c| c.1).sum();
        Self {
            n,
            m: key.0,
            circuit_id: key.1,
            w_id: key.2,
            n_meas,
            counts: counts.iter().filter(|c| c.1 > 0).map(|&(i, c)| (index_to_bits(i, n), c)).collect(),
            probs: None,
            config_hash: None,
        }
    }

    pub fn exact(key: (u32, usize, usize), table: &ProbabilityTable) -> Self {
        let n = table.n();
        Self {
            n,
            m: key.0,
            circuit_id: key.1,
            w_id: key.2,
            n_meas: 0,
            counts: BTreeMap::new(),
            probs: Some(table.entries().iter().map(|&(i, p)| (index_to_bits(i, n), p)).collect()),
            config_hash: None,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }

    pub fn from_json_line(line: &str) -> Result<Self> {
        let r: Self =
            serde_json::from_str(line).map_err(|e| CoreError::InvalidData(format!("malformed shot record: {e}")))?;
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let check_key = |k: &str| -> Result<u64> {
            if k.len() != self.n {
                return Err(CoreError::InvalidBits(format!("{k:?} has length {}, expected {}", k.len(), self.n)));
            }
            bits_to_index(k)
        };
        for k in self.counts.keys() {
            check_key(k)?;
        }
        if let Some(p) = &self.probs {
            for k in p.keys() {
                check_key(k)?;
            }
        }
        if self.n_meas == 0 {
            if self.probs.is_none() {
                return Err(CoreError::InvalidData("record with N_meas = 0 has no probs".into()));
            }
        } else {
            let sum: u64 = self.counts.values().sum();
            if sum != self.n_meas {
                return Err(CoreError::InvalidData(format!(
                    "counts of {:?} sum to {sum}, N_meas is {}",
                    self.key(),
                    self.n_meas
                )));
            }
        }
        Ok(())
    }
}

/// `P̂(s) = count(s)/N_meas`, or the stored distribution for exact records.
pub fn estimate_probabilities(record: &ShotRecord) -> Result<ProbabilityTable> {
    record.validate()?;
    if record.n_meas == 0 {
        let probs = record.probs.as_ref().expect("validated");
        let entries = probs
            .iter()
            .map(|(k, &p)| Ok((bits_to_index(k)?, p)))
            .collect::<Result<Vec<_>>>()?;
        ProbabilityTable::from_sparse(record.n, entries, 0)
    } else {
        let counts = record
            .counts
            .iter()
            .map(|(k, &c)| Ok((bits_to_index(k)?, c)))
            .collect::<Result<Vec<_>>>()?;
        ProbabilityTable::from_counts(record.n, &counts, record.n_meas)
    }
}

/// Multinomial draw of `n_meas` shots via sequential conditional binomials.
pub fn sample_shots<R: Rng + ?Sized>(dist: &ProbabilityTable, n_meas: u64, rng: &mut R) -> Result<Vec<(u64, u64)>> {
    if n_meas == 0 {
        return Err(CoreError::InvalidData("N_meas must be at least 1".into()));
    }
    let entries = dist.entries();
    if entries.is_empty() {
        return Err(CoreError::InvalidData("cannot sample an empty distribution".into()));
    }
    let mut remaining = n_meas;
    let mut mass = dist.total();
    let mut out = Vec::with_capacity(entries.len());
    for (i, &(idx, p)) in entries.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        let k = if i + 1 == entries.len() || mass <= p {
            remaining
        } else {
            let q = (p / mass).clamp(0.0, 1.0);
            Binomial::new(remaining, q)
                .map_err(|e| CoreError::InvalidData(format!("binomial({remaining}, {q}): {e}")))?
                .sample(rng)
        };
        if k > 0 {
            out.push((idx, k));
        }
        remaining -= k;
        mass -= p;
    }
    Ok(out)
}
