//! Dense density-matrix simulation under a Markovian noise model.

pub mod density;
pub mod noise;
pub mod shots;
pub mod simulate;

pub use density::DensityMatrix;
pub use noise::{decoherence_channel, Axis, CompiledNoise, LayerNoise, NoiseModel, SpamNoise};
pub use shots::{estimate_probabilities, sample_shots, ShotRecord};
pub use simulate::{measurement_distribution, noisy_layer_apply, noisy_probabilities, simulate_circuit};
