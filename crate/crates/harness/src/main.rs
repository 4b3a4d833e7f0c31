use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use coherence_harness::config::ExperimentConfig;
use coherence_harness::error::{HarnessError, Result};
use coherence_harness::oracle::{channel_oracle_from_file, oracle};
use coherence_harness::pipeline::{self, StageSummary};
use coherence_harness::Resolved;

#[derive(Parser)]
#[command(name = "coherence", version, about = "Randomized-measurement unitarity experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample and write the circuit records.
    Plan(Common),
    /// Simulate the planned circuits; resumes from existing shot records.
    Simulate(Common),
    /// Per-depth purity and fidelity estimates from the shot records.
    Estimate(Common),
    /// Fit the decay curves.
    Fit(Common),
    /// Classify the fitted rates and write the report and plot data.
    Report(Common),
    /// Exact reference values for the configuration or a single channel file.
    Oracle(OracleArgs),
    /// plan, simulate, estimate, fit and report in sequence.
    Run(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `plan.master_seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, required_unless_present = "channel", conflicts_with = "channel")]
    config: Option<PathBuf>,
    /// JSON channel document `{n, kraus}` to analyse instead of a configuration.
    #[arg(long)]
    channel: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Classification tolerance for `--channel`.
    #[arg(long, default_value_t = coherence_core::quantum::metrics::DEFAULT_CLASSIFY_TOLERANCE)]
    tolerance: f64,
}

fn set_workers(workers: Option<usize>) -> Result<()> {
    if let Some(k) = workers {
        if k == 0 {
            return Err(HarnessError::Config("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| HarnessError::Config(format!("--workers: {e}")))?;
    }
    Ok(())
}

fn resolve(config: &Path, out: Option<PathBuf>, seed: Option<u64>) -> Result<Resolved> {
    let mut cfg = ExperimentConfig::load(config)?;
    if let Some(dir) = out {
        cfg.output_dir = dir;
    }
    if let Some(s) = seed {
        cfg.plan.master_seed = s;
    }
    cfg.resolve()
}

fn print_summary(s: &StageSummary) {
    println!("{}: {} records ({} written)", s.stage, s.records, s.written);
    for w in &s.warnings {
        eprintln!("warning: {w}");
    }
}

fn summarize(stage: Result<StageSummary>) -> Result<()> {
    print_summary(&stage?);
    Ok(())
}

fn json(value: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(value).expect("serializable")
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Oracle(a) => {
            set_workers(a.workers)?;
            if let Some(ch) = a.channel {
                println!("{}", json(&channel_oracle_from_file(&ch, a.tolerance)?));
                return Ok(());
            }
            let config = a.config.expect("clap requires --config without --channel");
            let run = resolve(&config, a.out, a.seed)?;
            let report = oracle(&run)?;
            if let Some(ch) = &report.layer_channel {
                println!("layer channel: {}", json(ch));
            }
            println!("oracle: {} depths, {} scrambling rows", report.depths.len(), report.scrambling.len());
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            Ok(())
        }
        Command::Plan(c) => staged(c, |run| summarize(pipeline::plan(run))),
        Command::Simulate(c) => staged(c, |run| summarize(pipeline::simulate(run))),
        Command::Estimate(c) => staged(c, |run| summarize(pipeline::estimate(run))),
        Command::Fit(c) => staged(c, |run| {
            let (s, fits) = pipeline::fit(run)?;
            print_summary(&s);
            println!("purity rate {:.6}, fidelity rate {:.6}", fits.purity.rate, fits.fidelity.rate);
            Ok(())
        }),
        Command::Report(c) => staged(c, |run| {
            let (s, report) = pipeline::report(run)?;
            print_summary(&s);
            println!("{}", json(&report));
            Ok(())
        }),
        Command::Run(c) => staged(c, |run| {
            println!("{}", json(&pipeline::run_all(run)?));
            Ok(())
        }),
    }
}

fn staged(c: Common, stage: impl FnOnce(&Resolved) -> Result<()>) -> Result<()> {
    set_workers(c.workers)?;
    stage(&resolve(&c.config, c.out, c.seed)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
