//! The 24 single-qubit Cliffords in a fixed, documented order.
//!
//! Entries are the closure of `{H, S}` enumerated breadth first by word
//! length, generators tried in the order H then S, each new element kept in
//! canonical phase (first non-zero entry real and positive). Index 0 is the
//! identity. Each entry also carries a shortest decomposition into native
//! rotations `r(θ, φ) = exp(−iθ/2 (cos φ X + sin φ Y))`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::linalg::{c, canonical_phase, equal_up_to_phase, identity, mat2, CMatrix, ONE, ZERO};

pub const NUM_CLIFFORD1: usize = 24;

/// `exp(−iθ/2 (cos φ X + sin φ Y))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rotation {
    pub theta: f64,
    pub phi: f64,
}

impl Rotation {
    pub fn matrix(&self) -> CMatrix {
        let (co, si) = ((self.theta / 2.0).cos(), (self.theta / 2.0).sin());
        let off = |sgn: f64| c(0.0, -si) * c(self.phi.cos(), sgn * self.phi.sin());
        mat2(c(co, 0.0), off(-1.0), off(1.0), c(co, 0.0))
    }
}

#[derive(Debug, Clone)]
pub struct Clifford1 {
    index: u8,
    matrix: CMatrix,
    word: String,
    rotations: Vec<Rotation>,
}

impl Clifford1 {
    pub fn index(&self) -> u8 {
        self.index
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Generator word, applied left to right (`"HS"` is `S·H`).
    pub fn word(&self) -> &str {
        &self.word
    }

    /// Native rotations, applied in order; their product equals `matrix` up to phase.
    pub fn rotations(&self) -> &[Rotation] {
        &self.rotations
    }
}

pub fn hadamard() -> CMatrix {
    let h = c(FRAC_1_SQRT_2, 0.0);
    mat2(h, h, h, -h)
}

pub fn phase_s() -> CMatrix {
    mat2(ONE, ZERO, ZERO, c(0.0, 1.0))
}

fn rotation_alphabet() -> Vec<Rotation> {
    let mut out = Vec::new();
    for theta in [FRAC_PI_2, PI, -FRAC_PI_2] {
        for k in 0..8 {
            out.push(Rotation {
                theta,
                phi: k as f64 * FRAC_PI_4,
            });
        }
    }
    out
}

fn decompose(target: &CMatrix, alphabet: &[Rotation]) -> Option<Vec<Rotation>> {
    if equal_up_to_phase(target, &identity(2), 1e-9) {
        return Some(Vec::new());
    }
    let mats: Vec<CMatrix> = alphabet.iter().map(Rotation::matrix).collect();
    for len in 1..=3usize {
        let total = alphabet.len().pow(len as u32);
        for code in 0..total {
            let mut idx = Vec::with_capacity(len);
            let mut rest = code;
            for _ in 0..len {
                idx.push(rest % alphabet.len());
                rest /= alphabet.len();
            }
            idx.reverse();
            let prod = idx.iter().fold(identity(2), |acc, &i| &mats[i] * acc);
            if equal_up_to_phase(&prod, target, 1e-9) {
                return Some(idx.into_iter().map(|i| alphabet[i]).collect());
            }
        }
    }
    None
}

fn build_table() -> Vec<Clifford1> {
    let gens = [("H", hadamard()), ("S", phase_s())];
    let mut elems: Vec<(String, CMatrix)> = vec![(String::new(), identity(2))];
    let mut frontier = vec![0usize];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &i in &frontier {
            for (name, g) in &gens {
                let m = canonical_phase(&(g * &elems[i].1));
                if !elems.iter().any(|(_, e)| equal_up_to_phase(e, &m, 1e-9)) {
                    elems.push((format!("{}{}", elems[i].0, name), m));
                    next.push(elems.len() - 1);
                }
            }
        }
        frontier = next;
    }
    assert_eq!(elems.len(), NUM_CLIFFORD1, "Clifford closure size");
    let alphabet = rotation_alphabet();
    elems
        .into_iter()
        .enumerate()
        .map(|(i, (word, matrix))| {
            let rotations = decompose(&matrix, &alphabet).expect("every Clifford has a ≤3-rotation form");
            Clifford1 {
                index: i as u8,
                matrix,
                word,
                rotations,
            }
        })
        .collect()
}

pub fn clifford1_table() -> &'static [Clifford1] {
    static TABLE: OnceLock<Vec<Clifford1>> = OnceLock::new();
    TABLE.get_or_init(build_table)
}

pub fn clifford1(index: u8) -> &'static Clifford1 {
    &clifford1_table()[index as usize]
}

/// Index of the entry equal to `m` up to phase.
pub fn clifford1_index_of(m: &CMatrix) -> Option<u8> {
    clifford1_table()
        .iter()
        .find(|g| equal_up_to_phase(g.matrix(), m, 1e-9))
        .map(|g| g.index)
}
