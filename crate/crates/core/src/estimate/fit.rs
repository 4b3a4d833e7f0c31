//! Exponential decay fits `y ≈ A·rateᵐ + 2⁻ⁿ` with the offset held fixed.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::estimators::{aggregate, EstimateKind};
use crate::error::{CoreError, Result};
use crate::seed::{rng_for, Stream};

pub const DEFAULT_BOOTSTRAP_REPLICAS: usize = 200;
/// Floor applied before taking logs in the initial linear regression.
const LOG_FLOOR: f64 = 1e-6;
const GRID_STEPS: usize = 1000;
const MAX_LM_ITERATIONS: usize = 500;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub kind: EstimateKind,
    pub amplitude: f64,
    pub rate: f64,
    pub offset: f64,
    pub residual_norm: f64,
    pub n_points: usize,
    #[serde(default)]
    pub rate_std_error: Option<f64>,
    #[serde(default)]
    pub amplitude_std_error: Option<f64>,
    #[serde(default)]
    pub bootstrap_replicas: usize,
}

impl DecayFit {
    pub fn predict(&self, m: u32) -> f64 {
        self.amplitude * self.rate.powi(m as i32) + self.offset
    }
}

fn sse(points: &[(u32, f64)], a: f64, r: f64) -> f64 {
    points
        .iter()
        .map(|&(m, y)| {
            let e = a * r.powi(m as i32) - y;
            e * e
        })
        .sum()
}

/// Best amplitude for a fixed rate, clamped to `[0, 1]`.
fn profile_amplitude(points: &[(u32, f64)], r: f64) -> f64 {
    let (num, den) = points.iter().fold((0.0, 0.0), |(num, den), &(m, y)| {
        let b = r.powi(m as i32);
        (num + y * b, den + b * b)
    });
    if den > 0.0 {
        (num / den).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

fn log_linear_init(points: &[(u32, f64)]) -> (f64, f64) {
    let k = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0 as f64).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.max(LOG_FLOOR).ln()).collect();
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    (intercept.exp().clamp(0.0, 1.0), slope.exp().clamp(0.0, 1.0))
}

/// Damped Gauss–Newton on `(A, r)` inside the unit box.
fn levenberg_marquardt(points: &[(u32, f64)], mut a: f64, mut r: f64) -> (f64, f64) {
    let mut cost = sse(points, a, r);
    let mut lambda = 1e-3;
    for _ in 0..MAX_LM_ITERATIONS {
        let (mut jtj, mut jtr) = ([[0.0f64; 2]; 2], [0.0f64; 2]);
        for &(m, y) in points {
            let b = r.powi(m as i32);
            let db = if m == 0 { 0.0 } else { m as f64 * r.powi(m as i32 - 1) };
            let j = [b, a * db];
            let res = a * b - y;
            for p in 0..2 {
                jtr[p] += j[p] * res;
                for q in 0..2 {
                    jtj[p][q] += j[p] * j[q];
                }
            }
        }
        let mut improved = false;
        while lambda < 1e16 {
            let m00 = jtj[0][0] * (1.0 + lambda) + 1e-300;
            let m11 = jtj[1][1] * (1.0 + lambda) + 1e-300;
            let m01 = jtj[0][1];
            let det = m00 * m11 - m01 * m01;
            if det == 0.0 || !det.is_finite() {
                lambda *= 10.0;
                continue;
            }
            let da = -(m11 * jtr[0] - m01 * jtr[1]) / det;
            let dr = -(m00 * jtr[1] - m01 * jtr[0]) / det;
            let (na, nr) = ((a + da).clamp(0.0, 1.0), (r + dr).clamp(0.0, 1.0));
            let new_cost = sse(points, na, nr);
            if new_cost < cost {
                let step = (na - a).abs() + (nr - r).abs();
                a = na;
                r = nr;
                cost = new_cost;
                lambda = (lambda / 10.0).max(1e-12);
                improved = step > 1e-16;
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    (a, r)
}

/// Least-squares fit of `value ≈ A·rateᵐ + 2⁻ⁿ` to `(m, value)` points.
pub fn fit_decay(points: &[(u32, f64)], n: usize, kind: EstimateKind) -> Result<DecayFit> {
    let mut depths: Vec<u32> = points.iter().map(|p| p.0).collect();
    depths.sort_unstable();
    depths.dedup();
    if depths.len() < 3 {
        return Err(CoreError::TooFewDepths(depths.len()));
    }
    if let Some(p) = points.iter().find(|p| !p.1.is_finite()) {
        return Err(CoreError::InvalidData(format!("non-finite value {} at depth {}", p.1, p.0)));
    }
    let offset = 0.5f64.powi(n as i32);
    let shifted: Vec<(u32, f64)> = points.iter().map(|&(m, y)| (m, y - offset)).collect();
    if shifted.iter().all(|p| p.1 <= 1e-12) {
        return Err(CoreError::SpamDominated);
    }

    let (a0, r0) = log_linear_init(&shifted);
    let mut best = (a0, r0);
    let mut best_cost = sse(&shifted, a0, r0);
    for i in 0..=GRID_STEPS {
        let r = i as f64 / GRID_STEPS as f64;
        let a = profile_amplitude(&shifted, r);
        let c = sse(&shifted, a, r);
        if c < best_cost {
            best = (a, r);
            best_cost = c;
        }
    }
    let (amplitude, rate) = levenberg_marquardt(&shifted, best.0, best.1);
    Ok(DecayFit {
        kind,
        amplitude,
        rate,
        offset,
        residual_norm: sse(&shifted, amplitude, rate).sqrt(),
        n_points: points.len(),
        rate_std_error: None,
        amplitude_std_error: None,
        bootstrap_replicas: 0,
    })
}

/// Per-table kernel values at one depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthSamples {
    pub m: u32,
    pub values: Vec<f64>,
}

fn aggregate_points(samples: &[DepthSamples], k: usize) -> Result<Vec<(u32, f64)>> {
    samples
        .iter()
        .map(|s| Ok((s.m, aggregate(&s.values, k.min(s.values.len()).max(1))?.0)))
        .collect()
}

fn std_dev(v: &[f64]) -> Option<f64> {
    if v.len() < 2 {
        return None;
    }
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    Some((v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt())
}

/// Fit of the median-of-means points plus bootstrap standard errors from
/// `replicas` refits, each resampling the per-table values within every depth.
pub fn fit_decay_bootstrap(
    samples: &[DepthSamples],
    k: usize,
    n: usize,
    kind: EstimateKind,
    replicas: usize,
    seed: u64,
) -> Result<DecayFit> {
    let mut fit = fit_decay(&aggregate_points(samples, k)?, n, kind)?;
    let kind_tag = kind as u64;
    let refits: Vec<Option<(f64, f64)>> = (0..replicas)
        .into_par_iter()
        .map(|rep| {
            let mut rng = rng_for(seed, Stream::Bootstrap, &[kind_tag, rep as u64]);
            let resampled: Vec<DepthSamples> = samples
                .iter()
                .map(|s| DepthSamples {
                    m: s.m,
                    values: (0..s.values.len())
                        .map(|_| s.values[rng.random_range(0..s.values.len())])
                        .collect(),
                })
                .collect();
            let pts = aggregate_points(&resampled, k).ok()?;
            fit_decay(&pts, n, kind).ok().map(|f| (f.amplitude, f.rate))
        })
        .collect();
    let ok: Vec<(f64, f64)> = refits.into_iter().flatten().collect();
    fit.rate_std_error = std_dev(&ok.iter().map(|p| p.1).collect::<Vec<_>>());
    fit.amplitude_std_error = std_dev(&ok.iter().map(|p| p.0).collect::<Vec<_>>());
    fit.bootstrap_replicas = ok.len();
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(a: f64, r: f64, n: usize, depths: impl Iterator<Item = u32>) -> Vec<(u32, f64)> {
        let c = 0.5f64.powi(n as i32);
        depths.map(|m| (m, a * r.powi(m as i32) + c)).collect()
    }

    #[test]
    fn recovers_noiseless_parameters() {
        let pts = synthetic(0.8, 0.81, 1, 1..=8);
        let f = fit_decay(&pts, 1, EstimateKind::Purity).unwrap();
        assert!((f.amplitude - 0.8).abs() < 1e-9, "{f:?}");
        assert!((f.rate - 0.81).abs() < 1e-9, "{f:?}");
        let pts = synthetic(0.75, 0.9, 2, 1..=8);
        let f = fit_decay(&pts, 2, EstimateKind::Fidelity).unwrap();
        assert!((f.rate - 0.9).abs() < 1e-9);
        assert!(f.residual_norm < 1e-9);
    }

    #[test]
    fn flat_unit_rate() {
        let pts = synthetic(0.5, 1.0, 1, [1, 2, 4, 8].into_iter());
        let f = fit_decay(&pts, 1, EstimateKind::Purity).unwrap();
        assert!((f.rate - 1.0).abs() < 1e-12 && (f.amplitude - 0.5).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        let pts = synthetic(0.5, 0.9, 1, 1..=2);
        assert_eq!(fit_decay(&pts, 1, EstimateKind::Purity), Err(CoreError::TooFewDepths(2)));
        let flat = vec![(1, 0.25), (2, 0.25), (3, 0.2)];
        assert_eq!(fit_decay(&flat, 2, EstimateKind::Purity), Err(CoreError::SpamDominated));
    }

    #[test]
    fn bootstrap_is_deterministic() {
        let samples: Vec<DepthSamples> = [1u32, 2, 4, 8]
            .iter()
            .map(|&m| DepthSamples {
                m,
                values: (0..10).map(|i| 0.5 + 0.4 * 0.9f64.powi(m as i32) + 0.01 * (i as f64 - 4.5)).collect(),
            })
            .collect();
        let a = fit_decay_bootstrap(&samples, 2, 1, EstimateKind::Purity, 50, 7).unwrap();
        let b = fit_decay_bootstrap(&samples, 2, 1, EstimateKind::Purity, 50, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.rate_std_error.unwrap() > 0.0);
        assert_eq!(a.bootstrap_replicas, 50);
    }
}
