use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use reactive_paths_cli::config::parse_eps_list;
use reactive_paths_cli::{run_experiment, CliError, ExperimentConfig, ExperimentKind};

/// Seeded experiments for small-noise exit problems.
#[derive(Debug, Parser)]
#[command(name = "reactive-paths", version)]
struct Args {
    /// th2-convergence, th3-convergence, th4-convergence, equivalence-ratios,
    /// isometry-identity, convolution-check, saddle-exit or cf-check
    experiment: String,
    /// key = value file applied on top of the experiment defaults
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Comma-separated, strictly decreasing
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit with status 3 if any row fails its check
    #[arg(long)]
    check: bool,
}

fn build_config(args: &Args) -> Result<ExperimentConfig, String> {
    let kind: ExperimentKind = args.experiment.parse()?;
    let mut config = ExperimentConfig::defaults(kind);
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        config
            .apply_text(&text)
            .map_err(|e| format!("{}: {e}", path.display()))?;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(samples) = args.samples {
        config.samples = samples;
    }
    if let Some(eps) = &args.eps {
        config.eps_list = parse_eps_list(eps)?;
    }
    if let Some(workers) = args.workers {
        config.workers = workers;
    }
    if let Some(out) = &args.out {
        config.out_dir = out.clone();
    }
    config.validate().map_err(|e| e.to_string())?;
    Ok(config)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let config = match build_config(&args) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    match run_experiment(&config) {
        Ok(report) => {
            let failed = report.rows.iter().filter(|r| !r.pass).count();
            eprintln!(
                "{}: {} rows, {failed} failing, written to {}",
                config.experiment,
                report.rows.len(),
                config.out_dir.display()
            );
            ExitCode::from(report.exit_code(args.check) as u8)
        }
        Err(CliError::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
