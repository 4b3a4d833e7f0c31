use coherence_core::circuit::clifford::{clifford1, NUM_CLIFFORD1};
use coherence_core::circuit::ideal::ideal_probabilities;
use coherence_core::circuit::layer::{Gate, Layer};
use coherence_core::circuit::omega::{sample_omega_circuit, sample_plan, OmegaCircuit, SamplingPlan};
use coherence_core::circuit::sampler::EdgeGrabSampler;
use coherence_core::circuit::topology::Topology;
use coherence_core::linalg::{kron, CMatrix, ONE};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Every qubit is acted on by exactly one gate.
fn covers_each_qubit_once(layer: &Layer, n: usize) -> bool {
    let mut seen = vec![0usize; n];
    for g in layer.gates() {
        for q in g.qubits() {
            seen[q] += 1;
        }
    }
    seen.iter().all(|&c| c == 1)
}

fn plan(depths: Vec<u32>, n_circuits: usize, n_w: usize, xi: f64, seed: u64) -> SamplingPlan {
    SamplingPlan {
        depths,
        n_circuits,
        n_w,
        n_meas: 1,
        k: 1,
        xi,
        master_seed: seed,
        exhaustive_w: false,
    }
}

#[test]
fn v_layer_is_uniform_over_cliffords() {
    let topo = Topology::line(3).unwrap();
    let sampler = EdgeGrabSampler::new(&topo, 0.5).unwrap();
    let p = plan(vec![1], 20_000, 1, 0.5, 8);
    let mut counts = [0usize; NUM_CLIFFORD1];
    for cid in 0..p.n_circuits {
        let c = sample_omega_circuit(&p, &sampler, 1, cid, 0).unwrap();
        c.v_layer.validate_single_qubit_cover(3).unwrap();
        for g in c.v_layer.gates() {
            if let Gate::Clifford1 { index, .. } = *g {
                counts[index as usize] += 1;
            }
        }
    }
    let total: usize = counts.iter().sum();
    let expect = total as f64 / NUM_CLIFFORD1 as f64;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expect).powi(2) / expect).sum();
    // 23 degrees of freedom; 60 is far in the tail.
    assert!(chi2 < 60.0, "chi² = {chi2}, counts {counts:?}");
}

#[test]
fn density_calibration_on_line_and_star() {
    for topo in [Topology::line(6).unwrap(), Topology::star5()] {
        for xi in [0.0, 0.25, 0.5, 1.0] {
            let sampler = EdgeGrabSampler::new(&topo, xi).unwrap();
            let target = sampler.achieved_density();
            if !sampler.clamped() {
                assert!((target - xi).abs() < 1e-12);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + (xi * 100.0) as u64);
            let trials = 40_000;
            let mut covered = 0usize;
            for _ in 0..trials {
                let layer = sampler.sample(&mut rng);
                layer.validate_on(&topo).unwrap();
                assert!(covers_each_qubit_once(&layer, topo.n()));
                covered += layer.two_qubit_coverage();
            }
            let mean = covered as f64 / (trials * topo.n()) as f64;
            // Coverage per layer is bounded by 1, so the standard error is at most 0.5/sqrt(trials).
            assert!((mean - target).abs() < 5.0 * 0.5 / (trials as f64).sqrt(), "{topo:?} xi={xi}: {mean} vs {target}");
        }
    }
}

#[test]
fn star5_half_density_is_clamped() {
    let s = EdgeGrabSampler::new(&Topology::star5(), 0.5).unwrap();
    assert!(s.clamped());
    assert!((s.achieved_density() - 0.4).abs() < 1e-12);
}

#[test]
fn plan_is_reproducible_and_shares_bodies_across_w() {
    let topo = Topology::preset("line_4").unwrap();
    let sampler = EdgeGrabSampler::new(&topo, 0.5).unwrap();
    let p = plan(vec![0, 2, 5], 3, 4, 0.5, 1234);
    let a = sample_plan(&p, &sampler).unwrap();
    let b = sample_plan(&p, &sampler).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 3 * 3 * 4);
    for chunk in a.chunks(4) {
        assert!(chunk.iter().all(|c| c.layers == chunk[0].layers && c.v_layer == chunk[0].v_layer));
    }
    let other = sample_plan(&SamplingPlan { master_seed: 1235, ..p }, &sampler).unwrap();
    assert_ne!(a, other);
}

#[test]
fn hand_written_fixture_loads() {
    let text = include_str!("fixtures/circuit_n2.jsonl");
    let c = OmegaCircuit::from_json_line(text.trim()).unwrap();
    let expected = OmegaCircuit {
        n: 2,
        m: 1,
        circuit_id: 4,
        w_id: 1,
        seed: 11,
        config_hash: None,
        v_layer: Layer::single_qubit(&[1, 0]).unwrap(),
        layers: vec![Layer::new(vec![Gate::Cz { a: 0, b: 1 }], 2).unwrap()],
        w_layer: Layer::single_qubit(&[0, 2]).unwrap(),
    };
    assert_eq!(c, expected);

    let cz = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![ONE, ONE, ONE, -ONE]));
    let v = kron(clifford1(1).matrix(), clifford1(0).matrix());
    let w = kron(clifford1(0).matrix(), clifford1(2).matrix());
    let u = w * cz * v;
    let q = ideal_probabilities(&c).unwrap();
    for s in 0..4 {
        assert!((q.get(s as u64) - u[(s, 0)].norm_sqr()).abs() < 1e-12);
    }
}

#[test]
fn malformed_circuits_are_rejected() {
    let good = include_str!("fixtures/circuit_n2.jsonl").trim().to_string();
    for bad in [
        good.replace("\"qubits\":[0,1]", "\"qubits\":[0,0]"),
        good.replace("\"clifford_index\":2", "\"clifford_index\":24"),
        good.replace("\"m\":1", "\"m\":2"),
        good.replace("\"kind\":\"CZ\"", "\"kind\":\"CNOT\""),
    ] {
        assert!(OmegaCircuit::from_json_line(&bad).is_err(), "{bad}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sampled_layers_are_legal(seed in any::<u64>(), xi in 0.0f64..=1.0, n in 2usize..=8, star in any::<bool>()) {
        let topo = if star { Topology::star(n, 0).unwrap() } else { Topology::line(n).unwrap() };
        let sampler = EdgeGrabSampler::new(&topo, xi).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20 {
            let layer = sampler.sample(&mut rng);
            prop_assert!(layer.validate_on(&topo).is_ok());
            prop_assert!(covers_each_qubit_once(&layer, n));
        }
    }

    #[test]
    fn circuit_json_roundtrip(seed in any::<u64>(), m in 0u32..6) {
        let topo = Topology::line(3).unwrap();
        let sampler = EdgeGrabSampler::new(&topo, 0.5).unwrap();
        let p = plan(vec![m], 1, 1, 0.5, seed);
        let c = sample_omega_circuit(&p, &sampler, m, 0, 0).unwrap();
        prop_assert_eq!(OmegaCircuit::from_json_line(&c.to_json_line()).unwrap(), c);
    }
}
