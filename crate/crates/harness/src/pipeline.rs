//! Pipeline stages. Each stage reads the files of the previous one from the
//! output directory, so externally produced shot records can enter at `estimate`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use coherence_core::circuit::ideal::ideal_probabilities;
use coherence_core::circuit::omega::{sample_plan, OmegaCircuit};
use coherence_core::estimate::fit::fit_decay_bootstrap;
use coherence_core::estimate::kernel::pair_count;
use coherence_core::estimate::{
    extract_report, fidelity_estimator, purity_estimator, CoherenceReport, DecayFit, DepthEstimate, DepthSamples,
    EstimateKind, ProbabilityTable,
};
use coherence_core::seed::{rng_for, Stream};
use coherence_core::sim::{estimate_probabilities, noisy_probabilities, sample_shots, CompiledNoise, ShotRecord};
use coherence_core::CoreError;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{IdealMode, Resolved};
use crate::error::{HarnessError, Result};
use crate::manifest::{check_hash, now, RunManifest};
use crate::store;

/// Largest register the density-matrix simulation stage accepts.
pub const MAX_SIMULATION_QUBITS: usize = 12;
/// Largest register the estimation stage accepts for ingested records.
pub const MAX_ESTIMATION_QUBITS: usize = 14;
/// Per-table pair count above which estimation warns about runtime.
pub const KERNEL_PAIR_WARNING: u64 = 100_000_000;
/// Circuits simulated between appends to the shot file.
const SIMULATE_CHUNK: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct StageSummary {
    pub stage: &'static str,
    pub records: usize,
    /// Records newly produced by this invocation.
    pub written: usize,
    pub warnings: Vec<String>,
}

fn cap(what: &'static str, n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(CoreError::CapExceeded { what, n, cap }.into())
    } else {
        Ok(())
    }
}

fn load_circuits(dir: &Path, hash: &str) -> Result<Vec<OmegaCircuit>> {
    let path = store::path(dir, store::CIRCUITS);
    if !path.exists() {
        return Err(HarnessError::MissingStage {
            what: "circuit file",
            path,
            stage: "plan",
        });
    }
    store::read_lines(&path, false)?
        .iter()
        .map(|l| {
            let c = OmegaCircuit::from_json_line(l).map_err(|e| HarnessError::Data(format!("{}: {e}", path.display())))?;
            check_hash(&path, hash, c.config_hash.as_deref())?;
            Ok(c)
        })
        .collect()
}

fn parse_shots(path: &Path, lines: &[String], hash: &str, n: usize) -> Result<Vec<ShotRecord>> {
    lines
        .iter()
        .map(|l| {
            let r = ShotRecord::from_json_line(l).map_err(|e| HarnessError::Data(format!("{}: {e}", path.display())))?;
            // Records without a hash are accepted as externally produced data.
            if let Some(h) = &r.config_hash {
                check_hash(path, hash, Some(h))?;
            }
            if r.n != n {
                return Err(HarnessError::Data(format!(
                    "{}: record {:?} has n = {}, the run has n = {n}",
                    path.display(),
                    r.key(),
                    r.n
                )));
            }
            Ok(r)
        })
        .collect()
}

/// Samples every circuit of the plan and starts a fresh manifest.
pub fn plan(run: &Resolved) -> Result<StageSummary> {
    let started = now();
    let dir = run.out_dir();
    let mut circuits = sample_plan(&run.config.plan, &run.sampler)?;
    for c in &mut circuits {
        c.config_hash = Some(run.hash.clone());
    }
    // Re-planning an existing run keeps its later stages; a different config aborts.
    let mut manifest = match RunManifest::load(dir, &run.hash) {
        Ok(m) => m,
        Err(HarnessError::MissingStage { .. }) => RunManifest::new(&run.hash, run.n()),
        Err(e) => return Err(e),
    };
    manifest.warnings = run.warnings();
    store::write_lines(&store::path(dir, store::CIRCUITS), circuits.iter().map(OmegaCircuit::to_json_line))?;
    manifest.record("plan", started, circuits.len());
    manifest.save(dir)?;
    Ok(StageSummary {
        stage: "plan",
        records: circuits.len(),
        written: circuits.len(),
        warnings: manifest.warnings,
    })
}

fn simulate_one(run: &Resolved, noise: &CompiledNoise, c: &OmegaCircuit) -> Result<ShotRecord> {
    let dist = noisy_probabilities(c, noise)?;
    let mut rec = if run.config.measurement.exact {
        ShotRecord::exact(c.key(), &dist)
    } else {
        let mut rng = rng_for(
            run.config.plan.master_seed,
            Stream::Shots,
            &[c.m as u64, c.circuit_id as u64, c.w_id as u64],
        );
        let counts = sample_shots(&dist, run.config.plan.n_meas, &mut rng)?;
        ShotRecord::from_counts(c.n, c.key(), &counts)
    };
    rec.config_hash = Some(run.hash.clone());
    Ok(rec)
}

/// Simulates every planned circuit without a shot record yet. Shot seeds are
/// positional, so an interrupted or truncated run resumes to the same bytes.
pub fn simulate(run: &Resolved) -> Result<StageSummary> {
    let started = now();
    let dir = run.out_dir();
    cap("simulate", run.n(), MAX_SIMULATION_QUBITS)?;
    let mut manifest = RunManifest::load(dir, &run.hash)?;
    let circuits = load_circuits(dir, &run.hash)?;
    let shots_path = store::path(dir, store::SHOTS);
    let existing = parse_shots(&shots_path, &store::read_lines(&shots_path, true)?, &run.hash, run.n())?;
    let done: HashSet<_> = existing.iter().map(ShotRecord::key).collect();
    let noise = run.config.noise.compile(run.n())?;
    let todo: Vec<&OmegaCircuit> = circuits.iter().filter(|c| !done.contains(&c.key())).collect();
    for chunk in todo.chunks(SIMULATE_CHUNK) {
        let records = chunk
            .par_iter()
            .map(|c| simulate_one(run, &noise, c))
            .collect::<Result<Vec<_>>>()?;
        store::append_lines(&shots_path, records.iter().map(ShotRecord::to_json_line))?;
    }
    let total = existing.len() + todo.len();
    manifest.record("simulate", started, total);
    manifest.save(dir)?;
    Ok(StageSummary {
        stage: "simulate",
        records: total,
        written: todo.len(),
        warnings: Vec::new(),
    })
}

/// One line of the estimate file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub n: usize,
    #[serde(flatten)]
    pub estimate: DepthEstimate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
}

fn ideal_table(run: &Resolved, c: &OmegaCircuit) -> Result<ProbabilityTable> {
    let exact = ideal_probabilities(c)?;
    match run.config.measurement.ideal {
        IdealMode::Exact => Ok(exact),
        IdealMode::Sampled => {
            let n_meas = run.config.plan.n_meas;
            let mut rng = rng_for(
                run.config.plan.master_seed,
                Stream::IdealShots,
                &[c.m as u64, c.circuit_id as u64, c.w_id as u64],
            );
            let counts = sample_shots(&exact, n_meas, &mut rng)?;
            Ok(ProbabilityTable::from_counts(c.n, &counts, n_meas)?)
        }
    }
}

/// Per-depth purity and fidelity estimates from the shot file.
pub fn estimate(run: &Resolved) -> Result<StageSummary> {
    let started = now();
    let dir = run.out_dir();
    let n = run.n();
    cap("estimate", n, MAX_ESTIMATION_QUBITS)?;
    let mut manifest = RunManifest::load(dir, &run.hash)?;
    let circuits: HashMap<_, _> = load_circuits(dir, &run.hash)?.into_iter().map(|c| (c.key(), c)).collect();
    let shots_path = store::path(dir, store::SHOTS);
    if !shots_path.exists() {
        return Err(HarnessError::MissingStage {
            what: "shot records",
            path: shots_path,
            stage: "simulate",
        });
    }
    let mut records = parse_shots(&shots_path, &store::read_lines(&shots_path, false)?, &run.hash, n)?;
    records.sort_by_key(ShotRecord::key);
    if let Some(w) = records.windows(2).find(|w| w[0].key() == w[1].key()) {
        return Err(HarnessError::Data(format!("duplicate shot record {:?}", w[0].key())));
    }

    let mut by_depth: BTreeMap<u32, Vec<&ShotRecord>> = BTreeMap::new();
    for r in &records {
        by_depth.entry(r.m).or_default().push(r);
    }
    let method = run.config.analysis.kernel.into();
    let mut warnings = Vec::new();
    let mut out = Vec::new();
    for (&m, recs) in &by_depth {
        let pairs = recs
            .par_iter()
            .map(|r| {
                let c = circuits
                    .get(&r.key())
                    .ok_or_else(|| HarnessError::Data(format!("shot record {:?} has no planned circuit", r.key())))?;
                Ok((estimate_probabilities(r)?, ideal_table(run, c)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let (tables, ideal): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        let max_support = tables.iter().map(ProbabilityTable::support_len).max().unwrap_or(0);
        if pair_count(max_support) > KERNEL_PAIR_WARNING {
            warnings.push(format!(
                "depth {m}: up to {} kernel pairs per table; estimation will be slow",
                pair_count(max_support)
            ));
        }
        let k = run.config.plan.k.min(tables.len());
        for est in [
            purity_estimator(m, &tables, k, method)?,
            fidelity_estimator(m, &tables, &ideal, k, method)?,
        ] {
            out.push(EstimateRecord {
                n,
                estimate: est,
                config_hash: Some(run.hash.clone()),
            });
        }
    }
    if out.is_empty() {
        return Err(HarnessError::Data("no shot records to estimate".into()));
    }
    store::write_lines(
        &store::path(dir, store::ESTIMATES),
        out.iter().map(|r| serde_json::to_string(r).expect("record serializes")),
    )?;
    store::write_atomic(&store::path(dir, store::ESTIMATES_CSV), estimates_csv(&out).as_bytes())?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    manifest.warnings.extend(warnings.iter().cloned());
    manifest.record("estimate", started, out.len());
    manifest.save(dir)?;
    Ok(StageSummary {
        stage: "estimate",
        records: out.len(),
        written: out.len(),
        warnings,
    })
}

/// `n,m,kind,value,group_id`: one row per group mean and one `mom` row per estimate.
fn estimates_csv(records: &[EstimateRecord]) -> String {
    let mut s = String::from("n,m,kind,value,group_id\n");
    for r in records {
        let e = &r.estimate;
        for (g, v) in e.groups.iter().enumerate() {
            let _ = writeln!(s, "{},{},{},{},{}", r.n, e.m, e.kind, v, g);
        }
        let _ = writeln!(s, "{},{},{},{},mom", r.n, e.m, e.kind, e.value);
    }
    s
}

pub fn load_estimates(dir: &Path, hash: &str) -> Result<Vec<EstimateRecord>> {
    let path = store::path(dir, store::ESTIMATES);
    if !path.exists() {
        return Err(HarnessError::MissingStage {
            what: "estimates",
            path,
            stage: "estimate",
        });
    }
    store::read_lines(&path, false)?
        .iter()
        .map(|l| {
            let r: EstimateRecord =
                serde_json::from_str(l).map_err(|e| HarnessError::Data(format!("{}: {e}", path.display())))?;
            check_hash(&path, hash, r.config_hash.as_deref())?;
            Ok(r)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitFile {
    pub config_hash: String,
    pub n: usize,
    pub purity: DecayFit,
    pub fidelity: DecayFit,
}

/// Exponential fits of both decays with bootstrap errors.
pub fn fit(run: &Resolved) -> Result<(StageSummary, FitFile)> {
    let started = now();
    let dir = run.out_dir();
    let mut manifest = RunManifest::load(dir, &run.hash)?;
    let estimates = load_estimates(dir, &run.hash)?;
    let samples = |kind: EstimateKind| -> Vec<DepthSamples> {
        estimates
            .iter()
            .filter(|r| r.estimate.kind == kind)
            .map(|r| DepthSamples {
                m: r.estimate.m,
                values: r.estimate.per_table.clone(),
            })
            .collect()
    };
    let (k, replicas, seed) = (
        run.config.plan.k,
        run.config.analysis.bootstrap_replicas,
        run.config.plan.master_seed,
    );
    let fit_one = |kind| fit_decay_bootstrap(&samples(kind), k, run.n(), kind, replicas, seed);
    let file = FitFile {
        config_hash: run.hash.clone(),
        n: run.n(),
        purity: fit_one(EstimateKind::Purity)?,
        fidelity: fit_one(EstimateKind::Fidelity)?,
    };
    store::write_json(&store::path(dir, store::FITS), &file)?;
    manifest.record("fit", started, 2);
    manifest.save(dir)?;
    Ok((
        StageSummary {
            stage: "fit",
            records: 2,
            written: 2,
            warnings: Vec::new(),
        },
        file,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub config_hash: String,
    #[serde(flatten)]
    pub report: CoherenceReport,
}

/// Unitarity, fidelity and the Pauli-bound verdict from the fits.
pub fn report(run: &Resolved) -> Result<(StageSummary, CoherenceReport)> {
    let started = now();
    let dir = run.out_dir();
    let mut manifest = RunManifest::load(dir, &run.hash)?;
    let fits_path = store::path(dir, store::FITS);
    if !fits_path.exists() {
        return Err(HarnessError::MissingStage {
            what: "fits",
            path: fits_path,
            stage: "fit",
        });
    }
    let fits: FitFile = store::read_json(&fits_path)?;
    check_hash(&fits_path, &run.hash, Some(&fits.config_hash))?;
    let mut rep = extract_report(&fits.purity, &fits.fidelity, fits.n, run.config.analysis.classify_tolerance)?;
    let estimates = load_estimates(dir, &run.hash)?;
    rep.estimates = estimates.iter().map(|r| r.estimate.clone()).collect();
    rep.warnings = manifest.warnings.clone();
    store::write_json(
        &store::path(dir, store::REPORT),
        &ReportFile {
            config_hash: run.hash.clone(),
            report: rep.clone(),
        },
    )?;
    store::write_atomic(&store::path(dir, store::DECAY_CSV), decay_csv(&rep).as_bytes())?;
    manifest.record("report", started, 1);
    manifest.save(dir)?;
    Ok((
        StageSummary {
            stage: "report",
            records: 1,
            written: 1,
            warnings: rep.warnings.clone(),
        },
        rep,
    ))
}

/// `kind,m,estimate,fit,bound_lower,bound_upper` for decay-curve plots.
fn decay_csv(rep: &CoherenceReport) -> String {
    let mut s = String::from("kind,m,estimate,fit,bound_lower,bound_upper\n");
    for e in &rep.estimates {
        let fit = match e.kind {
            EstimateKind::Purity => &rep.purity_fit,
            EstimateKind::Fidelity => &rep.fidelity_fit,
        };
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            e.kind,
            e.m,
            e.value,
            fit.predict(e.m),
            rep.bound_lower,
            rep.bound_upper
        );
    }
    s
}

/// `plan → simulate → estimate → fit → report`.
pub fn run_all(run: &Resolved) -> Result<CoherenceReport> {
    plan(run)?;
    simulate(run)?;
    estimate(run)?;
    fit(run)?;
    Ok(report(run)?.1)
}
