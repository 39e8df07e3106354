//! Experiment driver: config parsing, experiment runners, CSV/SVG output.

pub mod config;
pub mod experiments;
pub mod output;
pub mod svg;

use std::path::Path;
use std::time::Instant;

use thiserror::Error;

pub use config::{ConfigError, ExperimentConfig, ExperimentKind};
pub use experiments::ExperimentOutput;
pub use output::ResultRow;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// What a finished run reports back to the caller.
#[derive(Debug)]
pub struct RunReport {
    pub rows: Vec<ResultRow>,
    pub budget_exceeded: bool,
}

impl RunReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    /// 0 success, 2 budget exceeded, 3 failed check when `check` is set.
    pub fn exit_code(&self, check: bool) -> i32 {
        if self.budget_exceeded {
            2
        } else if check && !self.all_pass() {
            3
        } else {
            0
        }
    }
}

fn write(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Runs the configured experiment and writes results.csv, manifest.txt and
/// the SVG plots into `config.out_dir`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunReport, CliError> {
    let started = Instant::now();
    let out = experiments::run(config)?;
    let dir = &config.out_dir;
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    write(&dir.join("results.csv"), &output::render_csv(&out.rows))?;
    for (name, svg) in &out.plots {
        write(&dir.join(name), svg)?;
    }
    let manifest = output::render_manifest(
        &config.canonical(),
        config.seed,
        config.workers,
        started.elapsed().as_secs_f64(),
    );
    write(&dir.join("manifest.txt"), &manifest)?;
    Ok(RunReport {
        rows: out.rows,
        budget_exceeded: out.budget_exceeded,
    })
}
