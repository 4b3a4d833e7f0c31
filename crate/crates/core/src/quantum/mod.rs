//! Exact channel algebra and the brute-force oracles behind the estimators.

pub mod channel;
pub mod design;
pub mod metrics;
pub mod pauli;
pub mod twirl;

pub use channel::{depolarizing_channel, ChannelDocument, Ptm, QuantumChannel};
pub use metrics::{
    average_gate_fidelity, classify_coherence, entanglement_fidelity, pauli_unitarity_bounds,
    unitarity_exact, ChannelMetrics, CoherenceRegion, PauliBoundInterval,
};
pub use pauli::{all_paulis, pauli_matrix, symplectic_product, PauliString};
pub use twirl::{pauli_twirl_exact, pauli_twirl_sampled, PauliChannel};
