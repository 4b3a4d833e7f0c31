//! Device topology, the single-qubit Clifford table, edge-grab layer sampling
//! and randomly dressed layered circuits.

pub mod clifford;
pub mod ideal;
pub mod layer;
pub mod omega;
pub mod sampler;
pub mod topology;

pub use clifford::{clifford1, clifford1_table, Clifford1, NUM_CLIFFORD1};
pub use ideal::{body_unitary, full_unitary, ideal_probabilities, ideal_state};
pub use layer::{Gate, Layer};
pub use omega::{sample_omega_circuit, sample_plan, OmegaCircuit, SamplingPlan};
pub use sampler::EdgeGrabSampler;
pub use topology::Topology;
