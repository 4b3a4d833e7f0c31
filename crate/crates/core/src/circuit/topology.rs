//! Device connectivity graphs and named presets.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Largest device the circuit model accepts.
pub const MAX_TOPOLOGY_QUBITS: usize = 26;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TopologyDoc", into = "TopologyDoc")]
pub struct Topology {
    n: usize,
    /// Sorted, deduplicated, each pair stored as `(low, high)`.
    edges: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct TopologyDoc {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<TopologyDoc> for Topology {
    type Error = CoreError;
    fn try_from(doc: TopologyDoc) -> Result<Self> {
        Topology::new(doc.n, doc.edges.into_iter().map(|[a, b]| (a, b)))
    }
}

impl From<Topology> for TopologyDoc {
    fn from(t: Topology) -> Self {
        TopologyDoc {
            n: t.n,
            edges: t.edges.into_iter().map(|(a, b)| [a, b]).collect(),
        }
    }
}

impl Topology {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 || n > MAX_TOPOLOGY_QUBITS {
            return Err(CoreError::OutOfRange {
                name: "topology qubits",
                value: n as f64,
                lo: 1.0,
                hi: MAX_TOPOLOGY_QUBITS as f64,
            });
        }
        let mut out = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(CoreError::InvalidCircuit(format!("edge ({a}, {b}) outside {n} qubits")));
            }
            if a == b {
                return Err(CoreError::InvalidCircuit(format!("self-loop on qubit {a}")));
            }
            out.push((a.min(b), a.max(b)));
        }
        out.sort_unstable();
        out.dedup();
        Ok(Self { n, edges: out })
    }

    /// Path `0 - 1 - … - (n−1)`.
    pub fn line(n: usize) -> Result<Self> {
        Self::new(n, (1..n).map(|q| (q - 1, q)))
    }

    /// `n` qubits all coupled to `center`.
    pub fn star(n: usize, center: usize) -> Result<Self> {
        Self::new(n, (0..n).filter(|&q| q != center).map(|q| (center, q)))
    }

    /// Five-qubit star with qubit 2 in the middle.
    pub fn star5() -> Self {
        Self::star(5, 2).expect("valid preset")
    }

    /// 4×5 nearest-neighbour grid, numbered row by row in a snake so that
    /// consecutive indices are always neighbours.
    pub fn grid20() -> Self {
        let (rows, cols) = (4usize, 5usize);
        let index = |r: usize, col: usize| if r.is_multiple_of(2) { r * cols + col } else { r * cols + (cols - 1 - col) };
        let mut edges = Vec::new();
        for r in 0..rows {
            for col in 0..cols {
                if col + 1 < cols {
                    edges.push((index(r, col), index(r, col + 1)));
                }
                if r + 1 < rows {
                    edges.push((index(r, col), index(r + 1, col)));
                }
            }
        }
        Self::new(rows * cols, edges).expect("valid preset")
    }

    /// Resolves `star5`, `grid20` and `line_<n>`.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "star5" => Ok(Self::star5()),
            "grid20" => Ok(Self::grid20()),
            _ => match name.strip_prefix("line_").map(str::parse::<usize>) {
                Some(Ok(n)) => Self::line(n),
                _ => Err(CoreError::InvalidCircuit(format!("unknown topology preset {name:?}"))),
            },
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.binary_search(&(a.min(b), a.max(b))).is_ok()
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(q) = stack.pop() {
            for &(a, b) in &self.edges {
                let other = if a == q { b } else if b == q { a } else { continue };
                if !seen[other] {
                    seen[other] = true;
                    stack.push(other);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Subgraph on `qubits`, relabelled so `qubits[i]` becomes qubit `i`.
    pub fn induced(&self, qubits: &[usize]) -> Result<Self> {
        for (i, &q) in qubits.iter().enumerate() {
            if q >= self.n {
                return Err(CoreError::InvalidCircuit(format!("qubit {q} not in {}-qubit topology", self.n)));
            }
            if qubits[..i].contains(&q) {
                return Err(CoreError::InvalidCircuit(format!("qubit {q} listed twice")));
            }
        }
        let pos = |q: usize| qubits.iter().position(|&x| x == q);
        let edges = self
            .edges
            .iter()
            .filter_map(|&(a, b)| Some((pos(a)?, pos(b)?)));
        Self::new(qubits.len(), edges)
    }
}
