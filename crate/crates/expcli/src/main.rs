use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use skewlab_cli::experiments::{self, Report};
use skewlab_cli::{ExperimentConfig, RunError};

#[derive(Parser)]
#[command(
    name = "skewlab",
    version,
    about = "Resonance, trapped-set and captivity experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Stable resonances per block, with the unit and gap circles.
    Spectrum(Common),
    /// Resonance counts against trapped-set tube volumes.
    Weyl(Common),
    /// Sample the trapped set and its projections.
    Trapped(Common),
    /// Spectral radius per block against 1/√E_min.
    Gap(Common),
    /// Correlation decay on a single block.
    Correlation(Common),
    /// Captive word counts N(n).
    Captive(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment config, TOML or JSON.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads, 0 for one per core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
}

type Job = fn(&ExperimentConfig, &Path) -> Result<Report, RunError>;

fn run(cli: Cli) -> Result<Report, RunError> {
    let (common, job): (&Common, Job) = match &cli.command {
        Command::Spectrum(c) => (c, experiments::run_spectrum),
        Command::Weyl(c) => (c, experiments::run_weyl),
        Command::Trapped(c) => (c, experiments::run_trapped),
        Command::Gap(c) => (c, experiments::run_gap),
        Command::Correlation(c) => (c, experiments::run_correlation),
        Command::Captive(c) => (c, experiments::run_captive),
    };
    let mut cfg = ExperimentConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(common.threads)
        .build()
        .map_err(|e| RunError::Config(e.to_string()))?
        .install(|| job(&cfg, &common.out))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(report) => {
            println!("{}", report.summary);
            for f in &report.files {
                println!("wrote {}", f.display());
            }
            if report.failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                for f in &report.failures {
                    eprintln!("failed: {f}");
                }
                ExitCode::from(3)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
