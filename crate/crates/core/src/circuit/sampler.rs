//! Edge-grab layer sampling.
//!
//! Shuffle the edges, greedily keep those disjoint from the ones already kept,
//! then turn each kept candidate into a CZ with a fixed acceptance probability
//! `q = ξ·n / (2·E|candidates|)`. Every qubit left uncovered gets a uniform
//! single-qubit Clifford. When `q` would exceed 1 it is clamped and the
//! achieved density falls short of `ξ`; `clamped()` reports this.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::clifford::NUM_CLIFFORD1;
use super::layer::{Gate, Layer};
use super::topology::Topology;
use crate::error::{CoreError, Result};

/// Up to this many edges the expected candidate count is computed by
/// enumerating every edge ordering.
const EXACT_ENUMERATION_EDGES: usize = 8;
const MONTE_CARLO_SAMPLES: usize = 20_000;
const MONTE_CARLO_SEED: u64 = 0x5eed_ed9e;

#[derive(Debug, Clone)]
pub struct EdgeGrabSampler {
    topology: Topology,
    xi: f64,
    expected_candidates: f64,
    accept: f64,
    clamped: bool,
}

fn greedy_disjoint(order: &[(usize, usize)], n: usize) -> Vec<(usize, usize)> {
    let mut used = vec![false; n];
    let mut out = Vec::new();
    for &(a, b) in order {
        if !used[a] && !used[b] {
            used[a] = true;
            used[b] = true;
            out.push((a, b));
        }
    }
    out
}

fn for_each_permutation(items: &mut Vec<(usize, usize)>, k: usize, f: &mut impl FnMut(&[(usize, usize)])) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        for_each_permutation(items, k + 1, f);
        items.swap(k, i);
    }
}

/// `E|candidates|` under a uniformly random edge order.
pub fn expected_candidate_count(topology: &Topology) -> f64 {
    let edges = topology.edges().to_vec();
    if edges.is_empty() {
        return 0.0;
    }
    if edges.len() <= EXACT_ENUMERATION_EDGES {
        let mut items = edges;
        let (mut total, mut count) = (0usize, 0usize);
        for_each_permutation(&mut items, 0, &mut |order| {
            total += greedy_disjoint(order, topology.n()).len();
            count += 1;
        });
        total as f64 / count as f64
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(MONTE_CARLO_SEED);
        let mut order = edges;
        let mut total = 0usize;
        for _ in 0..MONTE_CARLO_SAMPLES {
            order.shuffle(&mut rng);
            total += greedy_disjoint(&order, topology.n()).len();
        }
        total as f64 / MONTE_CARLO_SAMPLES as f64
    }
}

impl EdgeGrabSampler {
    pub fn new(topology: &Topology, xi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&xi) {
            return Err(CoreError::OutOfRange {
                name: "two-qubit gate density",
                value: xi,
                lo: 0.0,
                hi: 1.0,
            });
        }
        let expected_candidates = expected_candidate_count(topology);
        let (accept, clamped) = if xi == 0.0 {
            (0.0, false)
        } else if expected_candidates == 0.0 {
            (0.0, true)
        } else {
            let q = xi * topology.n() as f64 / (2.0 * expected_candidates);
            if q > 1.0 {
                (1.0, true)
            } else {
                (q, false)
            }
        };
        Ok(Self {
            topology: topology.clone(),
            xi,
            expected_candidates,
            accept,
            clamped,
        })
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn acceptance_probability(&self) -> f64 {
        self.accept
    }

    pub fn expected_candidates(&self) -> f64 {
        self.expected_candidates
    }

    /// True when the target density is unreachable and the acceptance
    /// probability was clamped to 1.
    pub fn clamped(&self) -> bool {
        self.clamped
    }

    /// Expected fraction of qubits covered by CZ gates.
    pub fn achieved_density(&self) -> f64 {
        2.0 * self.accept * self.expected_candidates / self.topology.n() as f64
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Layer {
        let n = self.topology.n();
        let mut order = self.topology.edges().to_vec();
        order.shuffle(rng);
        let candidates = greedy_disjoint(&order, n);
        let mut covered = vec![false; n];
        let mut gates = Vec::with_capacity(n);
        for (a, b) in candidates {
            if rng.random::<f64>() < self.accept {
                covered[a] = true;
                covered[b] = true;
                gates.push(Gate::Cz { a, b });
            }
        }
        for (q, &cov) in covered.iter().enumerate() {
            if !cov {
                gates.push(Gate::Clifford1 {
                    qubit: q,
                    index: rng.random_range(0..NUM_CLIFFORD1 as u8),
                });
            }
        }
        gates.sort_by_key(|g| g.qubits()[0]);
        Layer::new(gates, n).expect("edge-grab layers are legal by construction")
    }
}

/// Uniform single-qubit Clifford on every qubit.
pub fn sample_single_qubit_layer<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Layer {
    let idx: Vec<u8> = (0..n).map(|_| rng.random_range(0..NUM_CLIFFORD1 as u8)).collect();
    Layer::single_qubit(&idx).expect("indices in range")
}
