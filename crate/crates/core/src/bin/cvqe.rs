use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use cvqe::circuits::SampleMode;
use cvqe::pipeline::{self, RunConfig};
use cvqe::Error;

#[derive(Parser)]
#[command(name = "cvqe", version, about = "Cascaded VQE: sample once, optimize classically")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Run every measurement circuit once and write the sample archive.
    Sample(Flags),
    /// Optimize over an archive and write the trace and summary.
    Optimize(Flags),
    /// Write the energy surface grid and the descent path.
    Surface(Flags),
    /// Check estimator energies against the dense oracle.
    Verify(Flags),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Shot,
}

#[derive(clap::Args)]
struct Flags {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    archive: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Flags {
    fn config(&self) -> Result<RunConfig, Error> {
        let mut cfg = RunConfig::load(&self.config)?;
        if let Some(seed) = self.seed {
            cfg.seed = Some(seed);
        }
        if let Some(shots) = self.shots {
            cfg.shots = Some(shots);
        }
        if let Some(mode) = self.mode {
            cfg.mode = match mode {
                ModeArg::Exact => SampleMode::Exact,
                ModeArg::Shot => SampleMode::Shot,
            };
        }
        if let Some(out) = &self.out {
            cfg.out = out.clone();
        }
        Ok(cfg)
    }
}

fn run(verb: &Verb) -> Result<serde_json::Value, Error> {
    match verb {
        Verb::Sample(f) => {
            let (report, _) = pipeline::run_sample(&f.config()?)?;
            Ok(serde_json::to_value(report)?)
        }
        Verb::Optimize(f) => {
            let (summary, _) = pipeline::run_optimize(&f.config()?, f.archive.as_deref())?;
            Ok(serde_json::to_value(summary)?)
        }
        Verb::Surface(f) => Ok(serde_json::to_value(pipeline::run_surface(&f.config()?, f.archive.as_deref(), None)?)?),
        Verb::Verify(f) => {
            let report = pipeline::run_verify(&f.config()?, f.archive.as_deref())?;
            if !report.passed {
                return Err(Error::InvalidConfig(format!(
                    "verification failed: max deviation {:e}, variational gap {:e}",
                    report.max_deviation, report.variational_gap
                )));
            }
            Ok(serde_json::to_value(report)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.verb) {
        Ok(v) => {
            println!("{v}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", json!({ "error": e.kind(), "message": e.to_string() }));
            ExitCode::FAILURE
        }
    }
}
