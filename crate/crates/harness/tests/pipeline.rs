use std::fs;
use std::path::Path;
use std::process::Command;

use coherence_core::circuit::omega::{sample_omega_circuit, SamplingPlan};
use coherence_core::estimate::{fidelity_estimator, purity_estimator, KernelMethod};
use coherence_core::quantum::metrics::CoherenceRegion;
use coherence_core::sim::{noisy_probabilities, Axis, LayerNoise, NoiseModel};
use coherence_harness::config::{ExperimentConfig, MeasurementOptions, OracleOptions, TopologySpec};
use coherence_harness::oracle::{depth_oracle, effective_layer_channel, oracle};
use coherence_harness::pipeline::{self, run_all};
use coherence_harness::{HarnessError, Resolved};

/// Files whose bytes depend only on the configuration.
const DETERMINISTIC: [&str; 7] = [
    "circuits.jsonl",
    "shots.jsonl",
    "estimates.jsonl",
    "estimates.csv",
    "fits.json",
    "report.json",
    "decay.csv",
];

fn base(dir: &Path) -> ExperimentConfig {
    ExperimentConfig {
        topology: TopologySpec::preset("line_2"),
        qubits: None,
        plan: SamplingPlan {
            depths: vec![1, 2, 4, 8],
            n_circuits: 4,
            n_w: 5,
            n_meas: 2048,
            k: 2,
            xi: 0.5,
            master_seed: 17,
            exhaustive_w: false,
        },
        noise: NoiseModel {
            depol_1q: 0.01,
            depol_2q: 0.03,
            layer_noise: vec![LayerNoise::GlobalDepolarizing { p: 0.97 }],
            ..NoiseModel::default()
        },
        measurement: MeasurementOptions::default(),
        analysis: Default::default(),
        oracle: OracleOptions {
            circuits: 4,
            layer_samples: 20,
            scrambling_samples: 10,
        },
        output_dir: dir.to_path_buf(),
    }
}

fn resolve(cfg: ExperimentConfig) -> Resolved {
    cfg.resolve().unwrap()
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    fs::read(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn plan_writes_one_record_per_variant() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = base(dir.path());
    cfg.topology = TopologySpec::preset("star5");
    cfg.plan.depths = vec![2, 4, 8];
    cfg.plan.n_circuits = 12;
    cfg.plan.n_w = 10;
    assert_eq!(pipeline::plan(&resolve(cfg.clone())).unwrap().records, 360);

    let dir = tempfile::tempdir().unwrap();
    cfg.output_dir = dir.path().to_path_buf();
    cfg.plan.depths = vec![3];
    cfg.plan.n_circuits = 1;
    cfg.plan.n_w = 1;
    cfg.plan.k = 1;
    assert_eq!(pipeline::plan(&resolve(cfg)).unwrap().records, 1);
}

#[test]
fn shot_counts_sum_to_n_meas() {
    let dir = tempfile::tempdir().unwrap();
    let run = resolve(base(dir.path()));
    pipeline::plan(&run).unwrap();
    pipeline::simulate(&run).unwrap();
    let text = fs::read_to_string(dir.path().join("shots.jsonl")).unwrap();
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        let total: u64 = v["counts"].as_object().unwrap().values().map(|c| c.as_u64().unwrap()).sum();
        assert_eq!(total, 2048);
    }
    assert_eq!(text.lines().count(), 4 * 4 * 5);
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_all(&resolve(base(a.path()))).unwrap();
    run_all(&resolve(base(b.path()))).unwrap();
    let first: Vec<_> = DETERMINISTIC.iter().map(|f| read(a.path(), f)).collect();
    for (f, bytes) in DETERMINISTIC.iter().zip(&first) {
        assert_eq!(&read(b.path(), f), bytes, "{f} differs between directories");
    }
    // Same directory again: every stage reproduces its own output.
    run_all(&resolve(base(a.path()))).unwrap();
    for (f, bytes) in DETERMINISTIC.iter().zip(&first) {
        assert_eq!(&read(a.path(), f), bytes, "{f} changed on rerun");
    }
}

#[test]
fn truncated_shots_resume_to_the_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let run = resolve(base(dir.path()));
    pipeline::plan(&run).unwrap();
    pipeline::simulate(&run).unwrap();
    let full = read(dir.path(), "shots.jsonl");
    let text = String::from_utf8(full.clone()).unwrap();
    let lines: Vec<&str> = text.lines().collect();

    // Keep a prefix plus half of the next record, as after a crash mid-append.
    let keep = lines.len() / 3;
    let mut cut = lines[..keep].join("\n");
    cut.push('\n');
    cut.push_str(&lines[keep][..lines[keep].len() / 2]);
    fs::write(dir.path().join("shots.jsonl"), cut).unwrap();
    let s = pipeline::simulate(&run).unwrap();
    assert_eq!(s.written, lines.len() - keep);
    assert_eq!(read(dir.path(), "shots.jsonl"), full);

    // Nothing left to do.
    assert_eq!(pipeline::simulate(&run).unwrap().written, 0);
    assert_eq!(read(dir.path(), "shots.jsonl"), full);
}

#[test]
fn hash_mismatch_aborts() {
    let dir = tempfile::tempdir().unwrap();
    let run = resolve(base(dir.path()));
    run_all(&run).unwrap();

    let mut other = base(dir.path());
    other.plan.master_seed += 1;
    let other = resolve(other);
    for result in [
        pipeline::plan(&other).map(|_| ()),
        pipeline::simulate(&other).map(|_| ()),
        pipeline::estimate(&other).map(|_| ()),
    ] {
        assert!(matches!(result, Err(HarnessError::HashMismatch { .. })), "{result:?}");
    }

    // A foreign record inside an otherwise valid file is caught as well.
    let path = dir.path().join("shots.jsonl");
    let text = fs::read_to_string(&path).unwrap();
    let tampered = text.replacen(&run.hash, &other.hash, 1);
    fs::write(&path, tampered).unwrap();
    let e = pipeline::estimate(&run).unwrap_err();
    assert!(matches!(e, HarnessError::HashMismatch { .. }), "{e}");
    assert_eq!(e.exit_code(), 3);
}

#[test]
fn external_records_give_the_same_report() {
    let internal = tempfile::tempdir().unwrap();
    let run = resolve(base(internal.path()));
    run_all(&run).unwrap();

    // Strip the run hash, as counts from another tool would arrive.
    let external = tempfile::tempdir().unwrap();
    let ext_run = resolve(base(external.path()));
    pipeline::plan(&ext_run).unwrap();
    let stripped: String = fs::read_to_string(internal.path().join("shots.jsonl"))
        .unwrap()
        .lines()
        .map(|l| {
            let mut v: serde_json::Value = serde_json::from_str(l).unwrap();
            v.as_object_mut().unwrap().remove("config_hash");
            format!("{v}\n")
        })
        .collect();
    assert!(!stripped.contains(&run.hash));
    fs::write(external.path().join("shots.jsonl"), stripped).unwrap();
    pipeline::estimate(&ext_run).unwrap();
    pipeline::fit(&ext_run).unwrap();
    pipeline::report(&ext_run).unwrap();
    for f in ["estimates.jsonl", "fits.json", "report.json", "decay.csv"] {
        assert_eq!(read(external.path(), f), read(internal.path(), f), "{f}");
    }
}

#[test]
fn stages_need_their_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let run = resolve(base(dir.path()));
    let e = pipeline::simulate(&run).unwrap_err();
    assert!(matches!(e, HarnessError::MissingStage { .. }), "{e}");
    pipeline::plan(&run).unwrap();
    assert!(pipeline::estimate(&run).is_err());
}

#[test]
fn noiseless_exhaustive_run_is_unitary_and_pauli_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = base(dir.path());
    cfg.noise = NoiseModel::default();
    cfg.plan.n_w = 576;
    cfg.plan.exhaustive_w = true;
    cfg.plan.n_circuits = 2;
    cfg.plan.k = 1;
    cfg.measurement.exact = true;
    let r = run_all(&resolve(cfg)).unwrap();
    assert!((r.unitarity - 1.0).abs() < 1e-9, "{}", r.unitarity);
    assert!((r.avg_fidelity - 1.0).abs() < 1e-9, "{}", r.avg_fidelity);
    assert_eq!(r.region, CoherenceRegion::PauliConsistent);
}

#[test]
fn depolarizing_oracle_reports_squared_unitarity() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = base(dir.path());
    cfg.noise = NoiseModel {
        layer_noise: vec![LayerNoise::GlobalDepolarizing { p: 0.9 }],
        ..NoiseModel::default()
    };
    let run = resolve(cfg);
    let ch = effective_layer_channel(&run, 5).unwrap();
    let report = oracle(&run).unwrap();
    let metrics = report.layer_channel.unwrap().metrics;
    assert!((metrics.unitarity - 0.81).abs() < 1e-9, "{}", metrics.unitarity);
    assert!((metrics.polarization - 0.9).abs() < 1e-9);
    assert_eq!(ch.n(), 2);
    assert!(dir.path().join("oracle.json").exists());
}

/// Estimates from exhaustive W and exact tables equal the oracle's exact
/// per-depth averages over the same circuits.
#[test]
fn exhaustive_single_qubit_run_matches_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = base(dir.path());
    cfg.topology = TopologySpec::preset("line_1");
    cfg.plan.n_w = 24;
    cfg.plan.exhaustive_w = true;
    cfg.plan.k = 1;
    cfg.measurement.exact = true;
    cfg.noise = NoiseModel {
        layer_noise: vec![
            LayerNoise::GlobalDepolarizing { p: 0.96 },
            LayerNoise::Rotation {
                axis: Axis::X,
                angle: 0.15,
                qubits: vec![0],
            },
        ],
        ..NoiseModel::default()
    };
    let run = resolve(cfg);
    run_all(&run).unwrap();
    let report = oracle(&run).unwrap();
    assert_eq!(report.comparison.len(), 2 * run.config.plan.depths.len());
    for c in &report.comparison {
        assert!((c.oracle - c.estimate).abs() < 1e-10, "{c:?}");
    }

    // Same identity straight from the core estimators, independent of the files.
    let noise = run.config.noise.compile(1).unwrap();
    let noiseless = NoiseModel::default().compile(1).unwrap();
    let depths = depth_oracle(&run, run.config.plan.n_circuits).unwrap();
    for d in &depths {
        let mut noisy = Vec::new();
        let mut ideal = Vec::new();
        for cid in 0..run.config.plan.n_circuits {
            for wid in 0..24 {
                let c = sample_omega_circuit(&run.config.plan, &run.sampler, d.m, cid, wid).unwrap();
                noisy.push(noisy_probabilities(&c, &noise).unwrap());
                ideal.push(noisy_probabilities(&c, &noiseless).unwrap());
            }
        }
        let pur = purity_estimator(d.m, &noisy, 1, KernelMethod::Auto).unwrap().value;
        let fid = fidelity_estimator(d.m, &noisy, &ideal, 1, KernelMethod::Auto).unwrap().value;
        assert!((pur - d.purity).abs() < 1e-10, "m={}: {pur} vs {}", d.m, d.purity);
        assert!((fid - d.fidelity).abs() < 1e-10, "m={}: {fid} vs {}", d.m, d.fidelity);
    }
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_coherence")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.toml");
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

const SMALL: &str = r#"
[topology]
preset = "line_2"
[plan]
depths = [1, 2, 4]
n_circuits = 2
n_w = 3
n_meas = 256
k = 1
xi = 0.5
master_seed = 4
[[noise.layer_noise]]
kind = "global_depolarizing"
p = 0.95
[oracle]
circuits = 2
layer_samples = 4
scrambling_samples = 4
"#;

#[test]
fn cli_runs_every_stage_and_maps_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let out_s = out.to_string_lossy().into_owned();
    let config = write_config(dir.path(), SMALL);
    for stage in ["plan", "simulate", "estimate", "fit", "report", "oracle"] {
        let (code, _, err) = cli(&[stage, "--config", &config, "--out", &out_s, "--workers", "2"]);
        assert_eq!(code, 0, "{stage}: {err}");
    }
    for f in DETERMINISTIC.iter().chain(&["manifest.json", "oracle.json"]) {
        assert!(out.join(f).exists(), "{f}");
    }

    // A different seed against the same directory is a data error.
    let (code, _, err) = cli(&["simulate", "--config", &config, "--out", &out_s, "--seed", "5"]);
    assert_eq!(code, 3, "{err}");

    // Config errors.
    let bad = write_config(dir.path(), &SMALL.replace("xi = 0.5", "xi = 2.0"));
    assert_eq!(cli(&["plan", "--config", &bad, "--out", &out_s]).0, 2);
    let unknown = write_config(dir.path(), &SMALL.replace("k = 1", "k = 1\nsurprise = 3"));
    let (code, _, err) = cli(&["plan", "--config", &unknown, "--out", &out_s]);
    assert_eq!(code, 2);
    assert!(err.contains("surprise"), "{err}");

    // Missing plan.
    let fresh = dir.path().join("fresh").to_string_lossy().into_owned();
    let config = write_config(dir.path(), SMALL);
    assert_eq!(cli(&["estimate", "--config", &config, "--out", &fresh]).0, 3);

    // Over the simulation cap.
    let grid = write_config(dir.path(), &SMALL.replace("preset = \"line_2\"", "preset = \"grid20\""));
    let big = dir.path().join("big").to_string_lossy().into_owned();
    assert_eq!(cli(&["plan", "--config", &grid, "--out", &big]).0, 0);
    assert_eq!(cli(&["simulate", "--config", &grid, "--out", &big]).0, 4);
}

#[test]
fn cli_oracle_reads_channel_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("channel.json");
    // Rz(0.2) as a single Kraus operator, entries as [re, im].
    let (co, si) = (0.1f64.cos(), 0.1f64.sin());
    let doc = serde_json::json!({
        "n": 1,
        "kraus": [[[[co, -si], [0.0, 0.0]], [[0.0, 0.0], [co, si]]]]
    });
    fs::write(&path, doc.to_string()).unwrap();
    let (code, out, err) = cli(&["oracle", "--channel", &path.to_string_lossy()]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["region"], "COHERENT");
    assert_eq!(v["twirled_region"], "PAULI_CONSISTENT");
    assert!((v["metrics"]["unitarity"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}
