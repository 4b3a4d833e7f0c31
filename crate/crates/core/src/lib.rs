//! Noise-coherence toolkit core.
//!
//! The crate is split along the data flow of a randomized-measurement
//! unitarity experiment:
//!
//! * [`quantum`] is exact channel algebra over dense matrices: Pauli strings,
//!   Kraus channels, Pauli transfer matrices, fidelity/unitarity functionals,
//!   Pauli twirls and the Pauli-noise unitarity interval. It doubles as the
//!   brute-force oracle for everything the estimators infer statistically.
//! * [`circuit`] holds the device topology, the 24-element single-qubit
//!   Clifford table, edge-grab layer sampling and the random layered circuits
//!   dressed with randomizing layers `V` (prepended) and `W` (appended).
//! * [`sim`] is a dense density-matrix simulator with a configurable
//!   Markovian noise model and multinomial shot sampling.
//! * [`estimate`] turns outcome distributions into purity and fidelity
//!   estimates, fits exponential decays and classifies the noise against the
//!   Pauli unitarity interval.
//!
//! Bit-string convention everywhere: character `i` of a bit string is the
//! value of qubit `i`, so qubit 0 is the leftmost character and the most
//! significant bit of the computational-basis index.

pub mod circuit;
pub mod error;
pub mod estimate;
pub mod linalg;
pub mod quantum;
pub mod seed;
pub mod sim;

pub use error::{CoreError, Result};

/// Largest register for Kraus, dense-unitary and density-matrix operations.
pub const MAX_DENSE_QUBITS: usize = 12;
/// Largest register for noiseless statevector evaluation.
pub const MAX_STATEVECTOR_QUBITS: usize = 20;
/// Largest register for 4ⁿ×4ⁿ operations (PTM, χ diagonal, twirls, 2-design averages).
pub const MAX_PTM_QUBITS: usize = 6;
