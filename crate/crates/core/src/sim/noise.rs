//! Noise model configuration and its compiled Kraus form.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::linalg::{c, mat2, CMatrix, ZERO};
use crate::quantum::channel::{ChannelDocument, QuantumChannel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Noise applied together with the `V` layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpamNoise {
    /// Single-qubit depolarizing of error strength `strength` on every qubit.
    Depolarizing { strength: f64 },
    /// A 1-qubit channel applied to every qubit, or an `n`-qubit channel.
    Channel { channel: ChannelDocument },
}

/// Extra noise appended to every body layer after gate noise and decoherence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LayerNoise {
    /// `ρ ↦ pρ + (1−p)𝟙/2ⁿ` on the whole register.
    GlobalDepolarizing { p: f64 },
    /// `exp(−i angle/2 σ)` on each listed qubit.
    Rotation { axis: Axis, angle: f64, qubits: Vec<usize> },
    /// A channel on the listed qubits (in order).
    Channel { channel: ChannelDocument, qubits: Vec<usize> },
}

/// Markovian noise assignment. Depolarizing strengths are error
/// probabilities `ε` (the gate is followed by `E_{1−ε}`); times share one unit.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    #[serde(default)]
    pub depol_1q: f64,
    #[serde(default)]
    pub depol_2q: f64,
    /// Per-qubit relaxation times; empty disables relaxation, one entry applies to all.
    #[serde(default)]
    pub t1: Vec<f64>,
    /// Per-qubit dephasing times; defaults to `2·T1` when empty.
    #[serde(default)]
    pub t2: Vec<f64>,
    #[serde(default)]
    pub duration_1q: f64,
    #[serde(default)]
    pub duration_2q: f64,
    #[serde(default)]
    pub spam: Option<SpamNoise>,
    /// `P(read 1 | 0)` per qubit (one entry applies to all).
    #[serde(default)]
    pub readout_eps0: Vec<f64>,
    /// `P(read 0 | 1)` per qubit.
    #[serde(default)]
    pub readout_eps1: Vec<f64>,
    #[serde(default)]
    pub layer_noise: Vec<LayerNoise>,
}

fn per_qubit(name: &str, v: &[f64], n: usize) -> Result<Vec<f64>> {
    match v.len() {
        0 => Ok(Vec::new()),
        1 => Ok(vec![v[0]; n]),
        len if len == n => Ok(v.to_vec()),
        len => Err(CoreError::InvalidNoiseModel(format!("{name} has {len} entries for {n} qubits"))),
    }
}

fn unit(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(CoreError::InvalidNoiseModel(format!("{name} = {v} is outside [0, 1]")))
    }
}

fn check_qubits(name: &str, qubits: &[usize], n: usize) -> Result<()> {
    for (i, &q) in qubits.iter().enumerate() {
        if q >= n || qubits[..i].contains(&q) {
            return Err(CoreError::InvalidNoiseModel(format!("{name}: bad qubit list {qubits:?} for n={n}")));
        }
    }
    Ok(())
}

/// Amplitude damping with `γ = 1 − e^{−t/T1}` followed by pure dephasing
/// `λ = e^{−t(1/T2 − 1/(2T1))}`, so coherences decay as `e^{−t/T2}`.
/// Infinite times switch the corresponding process off.
pub fn decoherence_channel(t1: f64, t2: f64, duration: f64) -> Result<QuantumChannel> {
    if !(duration >= 0.0) {
        return Err(CoreError::InvalidNoiseModel(format!("duration {duration} < 0")));
    }
    if !(t1 > 0.0) || !(t2 > 0.0) {
        return Err(CoreError::InvalidNoiseModel(format!("T1 = {t1}, T2 = {t2} must be positive")));
    }
    if t2 > 2.0 * t1 * (1.0 + 1e-12) {
        return Err(CoreError::InvalidNoiseModel(format!("T2 = {t2} exceeds 2·T1 = {}", 2.0 * t1)));
    }
    let (gamma, lambda) = if duration.is_infinite() {
        (1.0, 0.0)
    } else {
        let gamma = 1.0 - (-duration / t1).exp();
        let rate = (1.0 / t2 - 0.5 / t1).max(0.0);
        (gamma, (-duration * rate).exp())
    };
    let amp = QuantumChannel::new(
        1,
        vec![
            mat2(c(1.0, 0.0), ZERO, ZERO, c((1.0 - gamma).sqrt(), 0.0)),
            mat2(ZERO, c(gamma.sqrt(), 0.0), ZERO, ZERO),
        ],
    )?;
    let keep = ((1.0 + lambda) / 2.0).sqrt();
    let flip = ((1.0 - lambda) / 2.0).sqrt();
    let dephase = QuantumChannel::new(
        1,
        vec![
            mat2(c(keep, 0.0), ZERO, ZERO, c(keep, 0.0)),
            mat2(c(flip, 0.0), ZERO, ZERO, c(-flip, 0.0)),
        ],
    )?;
    amp.then(&dephase)
}

fn rotation_matrix(axis: Axis, angle: f64) -> CMatrix {
    let (co, si) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    match axis {
        Axis::X => mat2(c(co, 0.0), c(0.0, -si), c(0.0, -si), c(co, 0.0)),
        Axis::Y => mat2(c(co, 0.0), c(-si, 0.0), c(si, 0.0), c(co, 0.0)),
        Axis::Z => mat2(c(co, -si), ZERO, ZERO, c(co, si)),
    }
}

#[derive(Debug, Clone)]
pub(crate) enum CompiledLayerNoise {
    Global(f64),
    Local { qubits: Vec<usize>, kraus: Vec<CMatrix> },
}

#[derive(Debug, Clone)]
pub(crate) enum CompiledSpam {
    None,
    Depolarizing(f64),
    PerQubit(Vec<CMatrix>),
    Global(Vec<CMatrix>),
}

/// Noise model resolved for an `n`-qubit register.
#[derive(Debug, Clone)]
pub struct CompiledNoise {
    pub(crate) n: usize,
    /// Polarization after single-qubit gates, `1 − ε₁`.
    pub(crate) pol_1q: f64,
    pub(crate) pol_2q: f64,
    /// Per-qubit decoherence Kraus sets for layers without / with a CZ.
    pub(crate) idle_1q: Vec<Option<Vec<CMatrix>>>,
    pub(crate) idle_2q: Vec<Option<Vec<CMatrix>>>,
    pub(crate) spam: CompiledSpam,
    pub(crate) layer_noise: Vec<CompiledLayerNoise>,
    pub(crate) readout: Option<(Vec<f64>, Vec<f64>)>,
}

impl CompiledNoise {
    pub fn n(&self) -> usize {
        self.n
    }
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self::default()
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        self.compile(n).map(|_| ())
    }

    /// Checks every field against an `n`-qubit register and prebuilds Kraus sets.
    pub fn compile(&self, n: usize) -> Result<CompiledNoise> {
        unit("depol_1q", self.depol_1q)?;
        unit("depol_2q", self.depol_2q)?;
        for (name, d) in [("duration_1q", self.duration_1q), ("duration_2q", self.duration_2q)] {
            if !(d >= 0.0) || !d.is_finite() {
                return Err(CoreError::InvalidNoiseModel(format!("{name} = {d} must be finite and >= 0")));
            }
        }
        let t1 = per_qubit("t1", &self.t1, n)?;
        let mut t2 = per_qubit("t2", &self.t2, n)?;
        if t1.is_empty() && !t2.is_empty() {
            return Err(CoreError::InvalidNoiseModel("t2 given without t1".into()));
        }
        if t2.is_empty() {
            t2 = t1.iter().map(|t| 2.0 * t).collect();
        }
        let idle = |duration: f64| -> Result<Vec<Option<Vec<CMatrix>>>> {
            (0..n)
                .map(|q| {
                    if t1.is_empty() || duration == 0.0 {
                        Ok(None)
                    } else {
                        decoherence_channel(t1[q], t2[q], duration)
                            .map(|ch| Some(ch.kraus().to_vec()))
                            .map_err(|e| CoreError::InvalidNoiseModel(format!("qubit {q}: {e}")))
                    }
                })
                .collect()
        };
        let idle_1q = idle(self.duration_1q)?;
        let idle_2q = idle(self.duration_2q)?;

        let spam = match &self.spam {
            None => CompiledSpam::None,
            Some(SpamNoise::Depolarizing { strength }) => {
                unit("spam.strength", *strength)?;
                CompiledSpam::Depolarizing(1.0 - strength)
            }
            Some(SpamNoise::Channel { channel }) => {
                let ch = channel.to_channel()?;
                if ch.n() == 1 {
                    CompiledSpam::PerQubit(ch.kraus().to_vec())
                } else if ch.n() == n {
                    CompiledSpam::Global(ch.kraus().to_vec())
                } else {
                    return Err(CoreError::InvalidNoiseModel(format!(
                        "spam channel acts on {} qubits; expected 1 or {n}",
                        ch.n()
                    )));
                }
            }
        };

        let mut layer_noise = Vec::new();
        for (i, ln) in self.layer_noise.iter().enumerate() {
            match ln {
                LayerNoise::GlobalDepolarizing { p } => {
                    unit("layer_noise.p", *p)?;
                    layer_noise.push(CompiledLayerNoise::Global(*p));
                }
                LayerNoise::Rotation { axis, angle, qubits } => {
                    check_qubits(&format!("layer_noise[{i}]"), qubits, n)?;
                    let u = rotation_matrix(*axis, *angle);
                    for &q in qubits {
                        layer_noise.push(CompiledLayerNoise::Local {
                            qubits: vec![q],
                            kraus: vec![u.clone()],
                        });
                    }
                }
                LayerNoise::Channel { channel, qubits } => {
                    check_qubits(&format!("layer_noise[{i}]"), qubits, n)?;
                    let ch = channel.to_channel()?;
                    if ch.n() != qubits.len() {
                        return Err(CoreError::InvalidNoiseModel(format!(
                            "layer_noise[{i}]: {}-qubit channel on {} qubits",
                            ch.n(),
                            qubits.len()
                        )));
                    }
                    layer_noise.push(CompiledLayerNoise::Local {
                        qubits: qubits.clone(),
                        kraus: ch.kraus().to_vec(),
                    });
                }
            }
        }

        let eps0 = per_qubit("readout_eps0", &self.readout_eps0, n)?;
        let eps1 = per_qubit("readout_eps1", &self.readout_eps1, n)?;
        for (q, &e) in eps0.iter().chain(&eps1).enumerate() {
            unit(&format!("readout flip probability #{q}"), e)?;
        }
        let readout = if eps0.is_empty() && eps1.is_empty() {
            None
        } else {
            let fill = |v: Vec<f64>| if v.is_empty() { vec![0.0; n] } else { v };
            Some((fill(eps0), fill(eps1)))
        };

        Ok(CompiledNoise {
            n,
            pol_1q: 1.0 - self.depol_1q,
            pol_2q: 1.0 - self.depol_2q,
            idle_1q,
            idle_2q,
            spam,
            layer_noise,
            readout,
        })
    }

    /// Reasons the body-layer noise is not unital and trace preserving, which
    /// the fixed-offset decay model assumes.
    pub fn assumption_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.t1.is_empty() && (self.duration_1q > 0.0 || self.duration_2q > 0.0) {
            out.push("T1 relaxation makes the layer noise non-unital; fitted rates may be biased".into());
        }
        for (i, ln) in self.layer_noise.iter().enumerate() {
            if let LayerNoise::Channel { channel, .. } = ln {
                if let Ok(ch) = channel.to_channel() {
                    if !ch.is_trace_preserving(1e-9) {
                        out.push(format!("layer_noise[{i}] is not trace preserving"));
                    }
                    if !ch.is_unital(1e-9) {
                        out.push(format!("layer_noise[{i}] is not unital"));
                    }
                }
            }
        }
        out
    }

    /// The per-layer channel `layer_noise` alone, as one `n`-qubit channel.
    pub fn layer_noise_channel(&self, n: usize) -> Result<QuantumChannel> {
        let compiled = self.compile(n)?;
        let mut ch = QuantumChannel::identity(n);
        for ln in &compiled.layer_noise {
            let next = match ln {
                CompiledLayerNoise::Global(p) => crate::quantum::channel::depolarizing_channel(*p, n)?,
                CompiledLayerNoise::Local { qubits, kraus } => {
                    QuantumChannel::new(qubits.len(), kraus.clone())?.embed(n, qubits)?
                }
            };
            ch = ch.then(&next)?;
        }
        Ok(ch)
    }
}
