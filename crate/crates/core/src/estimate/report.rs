//! Turning the two decay fits into unitarity, fidelity and a coherence verdict.

use serde::{Deserialize, Serialize};

use super::estimators::{DepthEstimate, EstimateKind};
use super::fit::DecayFit;
use crate::error::{CoreError, Result};
use crate::quantum::metrics::{fidelity_from_polarization, pauli_unitarity_bounds, CoherenceRegion};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceReport {
    pub n: usize,
    /// Average layer unitarity, the purity decay rate.
    #[serde(rename = "u")]
    pub unitarity: f64,
    /// Average layer polarization, the fidelity decay rate.
    #[serde(rename = "f")]
    pub polarization: f64,
    #[serde(rename = "F")]
    pub avg_fidelity: f64,
    pub infidelity: f64,
    pub bound_lower: f64,
    pub bound_upper: f64,
    pub region: CoherenceRegion,
    pub classify_tolerance: f64,
    pub purity_fit: DecayFit,
    pub fidelity_fit: DecayFit,
    #[serde(default)]
    pub estimates: Vec<DepthEstimate>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

pub fn extract_report(
    purity_fit: &DecayFit,
    fidelity_fit: &DecayFit,
    n: usize,
    tolerance: f64,
) -> Result<CoherenceReport> {
    if purity_fit.kind != EstimateKind::Purity || fidelity_fit.kind != EstimateKind::Fidelity {
        return Err(CoreError::InvalidData("report needs a purity fit and a fidelity fit".into()));
    }
    let unitarity = purity_fit.rate;
    let polarization = fidelity_fit.rate;
    let avg_fidelity = fidelity_from_polarization(polarization, n);
    let interval = pauli_unitarity_bounds(avg_fidelity, n)?;
    Ok(CoherenceReport {
        n,
        unitarity,
        polarization,
        avg_fidelity,
        infidelity: 1.0 - avg_fidelity,
        bound_lower: interval.lower,
        bound_upper: interval.upper,
        region: interval.classify(unitarity, tolerance),
        classify_tolerance: tolerance,
        purity_fit: purity_fit.clone(),
        fidelity_fit: fidelity_fit.clone(),
        estimates: Vec::new(),
        warnings: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fit(kind: EstimateKind, rate: f64) -> DecayFit {
        DecayFit {
            kind,
            amplitude: 0.5,
            rate,
            offset: 0.5,
            residual_norm: 0.0,
            n_points: 4,
            rate_std_error: None,
            amplitude_std_error: None,
            bootstrap_replicas: 0,
        }
    }

    #[test]
    fn saturating_depolarizing_is_pauli_consistent() {
        let f = 0.95;
        let r = extract_report(&fit(EstimateKind::Purity, f * f), &fit(EstimateKind::Fidelity, f), 1, 1e-9).unwrap();
        assert_eq!(r.region, CoherenceRegion::PauliConsistent);
        assert!((r.avg_fidelity - 0.975).abs() < 1e-12);
        assert!((r.polarization - (2.0 * r.avg_fidelity - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn unit_unitarity_with_loss_is_coherent() {
        let r = extract_report(&fit(EstimateKind::Purity, 1.0), &fit(EstimateKind::Fidelity, 0.9), 1, 1e-9).unwrap();
        assert_eq!(r.region, CoherenceRegion::Coherent);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["region"], "COHERENT");
        assert!(json.get("u").is_some() && json.get("F").is_some());
    }

    #[test]
    fn swapped_fits_rejected() {
        assert!(extract_report(&fit(EstimateKind::Fidelity, 1.0), &fit(EstimateKind::Purity, 0.9), 1, 1e-9).is_err());
    }
}
