//! Batch driver: configuration, fixture resolution, task dispatch and
//! figure data.

pub mod config;
pub mod error;
pub mod figures;
pub mod output;
pub mod tasks;

use std::path::{Path, PathBuf};

use serde_json::json;

pub use config::{RunConfig, Task};
pub use error::CliError;
pub use figures::FigureTag;
use output::{sha256_hex, Output, CSV_FORMAT, JSON_FORMAT, VERSION};
use tasks::{load_fixture, Loaded};

/// What to run: a task or a figure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Job {
    Task(Task),
    Figure(FigureTag),
}

/// Command-line overrides applied on top of the configuration file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

/// Load fixtures and compute the input hash over the resolved config and fixture contents.
fn prepare(job: Job, cfg: &RunConfig) -> Result<(Vec<Loaded>, serde_json::Value, String), CliError> {
    let entries: Vec<String> = match job {
        Job::Figure(tag) if cfg.fixtures == RunConfig::default().fixtures => {
            tag.fixtures().iter().map(|r| r.builtin().to_string()).collect()
        }
        _ => cfg.fixtures.clone(),
    };
    let fixtures: Vec<Loaded> = entries.iter().map(|e| load_fixture(e)).collect::<Result<_, _>>()?;
    let job_json = match job {
        Job::Task(t) => json!({ "task": t.name() }),
        Job::Figure(f) => json!({ "figure": f.name() }),
    };
    let fixture_json: Vec<_> = fixtures
        .iter()
        .map(|l| json!({ "name": l.name, "source": l.source, "sha256": sha256_hex(l.text().as_bytes()) }))
        .collect();
    // The output location does not change any result, so it stays out of the hash.
    let hashed = RunConfig { output: None, ..cfg.clone() };
    let inputs = json!({ "job": job_json, "config": hashed, "fixtures": fixture_json });
    let hash = sha256_hex(serde_json::to_string(&inputs)?.as_bytes());
    let manifest = json!({
        "tool": "polaritonic",
        "version": VERSION,
        "formats": { "csv": CSV_FORMAT, "json": JSON_FORMAT },
        "hash": hash,
        "job": job_json,
        "config": cfg,
        "fixtures": fixture_json,
        "exit_codes": { "config": 2, "convergence": 3, "window": 4, "other": 1 },
    });
    Ok((fixtures, manifest, hash))
}

/// Resolve the configuration against the job and overrides.
pub fn resolve(job: Job, mut cfg: RunConfig, ov: &Overrides) -> Result<RunConfig, CliError> {
    if let Job::Task(t) = job {
        match cfg.task {
            Some(c) if c != t => {
                return Err(CliError::Config(format!("config names task {} but {} was requested", c.name(), t.name())))
            }
            _ => cfg.task = Some(t),
        }
    }
    if let Some(o) = &ov.out {
        cfg.output = Some(o.clone());
    }
    if cfg.output.is_none() {
        cfg.output = Some(PathBuf::from("out"));
    }
    if let Some(s) = ov.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Run one job; returns the manifest path.
pub fn run(job: Job, cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let (fixtures, manifest, hash) = prepare(job, cfg)?;
    let dir = cfg.output.clone().unwrap_or_else(|| PathBuf::from("out"));
    let mut out = Output::create(Path::new(&dir), hash, manifest)?;
    match job {
        Job::Task(t) => tasks::run_task(t, cfg, &fixtures, &mut out, "")?,
        Job::Figure(f) => figures::reproduce(f, cfg, &fixtures, &mut out)?,
    }
    out.finish()
}

/// `run` with a job taken from the config's `task` key.
pub fn run_from_config(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let t = cfg.task.ok_or_else(|| CliError::Config("no task given on the command line or in the config".into()))?;
    run(Job::Task(t), cfg)
}
