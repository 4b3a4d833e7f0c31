//! Gates and layers.

use serde::{Deserialize, Serialize};

use super::clifford::NUM_CLIFFORD1;
use super::topology::Topology;
use crate::error::{CoreError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GateDoc", into = "GateDoc")]
pub enum Gate {
    /// Single-qubit Clifford by table index.
    Clifford1 { qubit: usize, index: u8 },
    Cz { a: usize, b: usize },
}

#[derive(Serialize, Deserialize)]
struct GateDoc {
    kind: String,
    qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    clifford_index: Option<u8>,
}

impl TryFrom<GateDoc> for Gate {
    type Error = CoreError;
    fn try_from(doc: GateDoc) -> Result<Self> {
        match (doc.kind.as_str(), doc.qubits.as_slice(), doc.clifford_index) {
            ("CLIFFORD1", &[q], Some(i)) if (i as usize) < NUM_CLIFFORD1 => Ok(Gate::Clifford1 { qubit: q, index: i }),
            ("CLIFFORD1", _, _) => Err(CoreError::InvalidCircuit(format!(
                "CLIFFORD1 needs one qubit and an index below {NUM_CLIFFORD1}, got qubits {:?} index {:?}",
                doc.qubits, doc.clifford_index
            ))),
            ("CZ", &[a, b], None) if a != b => Ok(Gate::Cz { a, b }),
            ("CZ", _, _) => Err(CoreError::InvalidCircuit(format!(
                "CZ needs two distinct qubits and no index, got {:?}",
                doc.qubits
            ))),
            (other, _, _) => Err(CoreError::InvalidCircuit(format!("unknown gate kind {other:?}"))),
        }
    }
}

impl From<Gate> for GateDoc {
    fn from(g: Gate) -> Self {
        match g {
            Gate::Clifford1 { qubit, index } => GateDoc {
                kind: "CLIFFORD1".into(),
                qubits: vec![qubit],
                clifford_index: Some(index),
            },
            Gate::Cz { a, b } => GateDoc {
                kind: "CZ".into(),
                qubits: vec![a, b],
                clifford_index: None,
            },
        }
    }
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Clifford1 { qubit, .. } => vec![qubit],
            Gate::Cz { a, b } => vec![a, b],
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, Gate::Cz { .. })
    }
}

/// Gates acting in parallel; no qubit is touched twice.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Layer {
    gates: Vec<Gate>,
}

impl Layer {
    /// Checks qubit indices against `n` and that gate supports are disjoint.
    pub fn new(gates: Vec<Gate>, n: usize) -> Result<Self> {
        let layer = Self { gates };
        layer.validate(n)?;
        Ok(layer)
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let mut used = vec![false; n];
        for g in &self.gates {
            for q in g.qubits() {
                if q >= n {
                    return Err(CoreError::InvalidCircuit(format!("qubit {q} outside {n}-qubit register")));
                }
                if used[q] {
                    return Err(CoreError::InvalidCircuit(format!("qubit {q} appears twice in a layer")));
                }
                used[q] = true;
            }
        }
        Ok(())
    }

    /// Every CZ sits on a topology edge.
    pub fn validate_on(&self, topology: &Topology) -> Result<()> {
        self.validate(topology.n())?;
        for g in &self.gates {
            if let Gate::Cz { a, b } = *g {
                if !topology.has_edge(a, b) {
                    return Err(CoreError::InvalidCircuit(format!("CZ on ({a}, {b}) is not a topology edge")));
                }
            }
        }
        Ok(())
    }

    /// One single-qubit Clifford on every qubit and nothing else.
    pub fn validate_single_qubit_cover(&self, n: usize) -> Result<()> {
        self.validate(n)?;
        if self.gates.len() != n || self.gates.iter().any(Gate::is_two_qubit) {
            return Err(CoreError::InvalidCircuit(format!(
                "expected one single-qubit Clifford per qubit on {n} qubits"
            )));
        }
        Ok(())
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn has_two_qubit_gate(&self) -> bool {
        self.gates.iter().any(Gate::is_two_qubit)
    }

    /// Qubits covered by two-qubit gates.
    pub fn two_qubit_coverage(&self) -> usize {
        2 * self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }

    /// Layer of identity Cliffords on every qubit.
    pub fn identity(n: usize) -> Self {
        Self {
            gates: (0..n).map(|q| Gate::Clifford1 { qubit: q, index: 0 }).collect(),
        }
    }

    pub fn single_qubit(indices: &[u8]) -> Result<Self> {
        let gates = indices
            .iter()
            .enumerate()
            .map(|(q, &index)| {
                if (index as usize) < NUM_CLIFFORD1 {
                    Ok(Gate::Clifford1 { qubit: q, index })
                } else {
                    Err(CoreError::InvalidCircuit(format!("Clifford index {index}")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { gates })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gate_document_shape() {
        let g = Gate::Clifford1 { qubit: 1, index: 5 };
        assert_eq!(
            serde_json::to_string(&g).unwrap(),
            r#"{"kind":"CLIFFORD1","qubits":[1],"clifford_index":5}"#
        );
        let cz: Gate = serde_json::from_str(r#"{"kind":"CZ","qubits":[0,1]}"#).unwrap();
        assert_eq!(cz, Gate::Cz { a: 0, b: 1 });
        assert!(serde_json::from_str::<Gate>(r#"{"kind":"CNOT","qubits":[0,1]}"#).is_err());
        assert!(serde_json::from_str::<Gate>(r#"{"kind":"CLIFFORD1","qubits":[0],"clifford_index":24}"#).is_err());
    }

    #[test]
    fn duplicate_qubits_rejected() {
        let gates = vec![Gate::Clifford1 { qubit: 0, index: 0 }, Gate::Cz { a: 0, b: 1 }];
        assert!(Layer::new(gates, 2).is_err());
        let star = Topology::star5();
        let off_edge = Layer::new(vec![Gate::Cz { a: 0, b: 1 }], 5).unwrap();
        assert!(off_edge.validate_on(&star).is_err());
    }
}
