use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use polaritonic_cli::{resolve, run, CliError, FigureTag, Job, Overrides, RunConfig, Task};

/// Polaritonic surfaces, spectra and ground-state shifts from a TOML run description.
///
/// Exit codes: 0 success, 2 configuration error, 3 convergence failure,
/// 4 window or grid-edge error, 1 anything else.
#[derive(Debug, Parser)]
#[command(name = "polaritonic", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML configuration; defaults apply to every missing key.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output` in the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for parallel scans.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Seed of the calibration restarts.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the task named in the config.
    Run,
    Calibrate,
    Bare,
    Absorb,
    Pes1,
    Pes2,
    Nonbo,
    UscScan,
    ScalingReport,
    /// Data files for one figure.
    Figure { tag: FigureTag },
}

fn execute(cli: Cli) -> Result<PathBuf, CliError> {
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(CliError::Config("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Other(e.to_string()))?;
    }
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let task = |t| Job::Task(t);
    let job = match cli.command {
        Command::Run => match cfg.task {
            Some(t) => task(t),
            None => return Err(CliError::Config("`run` needs a task key in the config".into())),
        },
        Command::Calibrate => task(Task::Calibrate),
        Command::Bare => task(Task::Bare),
        Command::Absorb => task(Task::Absorb),
        Command::Pes1 => task(Task::Pes1),
        Command::Pes2 => task(Task::Pes2),
        Command::Nonbo => task(Task::Nonbo),
        Command::UscScan => task(Task::UscScan),
        Command::ScalingReport => task(Task::ScalingReport),
        Command::Figure { tag } => Job::Figure(tag),
    };
    let cfg = resolve(job, cfg, &Overrides { out: cli.out, seed: cli.seed })?;
    run(job, &cfg)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(manifest) => {
            println!("{}", manifest.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("polaritonic: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
