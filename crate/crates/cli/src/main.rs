//! `kinspec <scenario> --config <path> [--out <dir>] [--seed <int>]`
//! and `kinspec report <run-dir> [--out <dir>]`.

mod artifacts;
mod config;
mod error;
mod report;
mod scenarios;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::Value;

use artifacts::Artifacts;
use config::Config;
use error::{CliError, CliResult};

/// Output directory override; the only setting read from the environment.
const OUT_ENV: &str = "KINSPEC_OUT";

#[derive(Parser, Debug)]
#[command(name = "kinspec", version, about = "Spectral experiments for kinetic Kolmogorov-type equations")]
struct Cli {
    /// One of: solve, diagnose-regularization, maxreg, besov, trace-band,
    /// smoothing, varcoef, quasilinear, report.
    scenario: String,
    /// Run directory (report only).
    run_dir: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

fn execute(cli: &Cli) -> CliResult<Value> {
    if cli.scenario == "report" {
        let dir = cli
            .run_dir
            .as_deref()
            .ok_or_else(|| CliError::Config("report needs a run directory".into()))?;
        return report::report(dir, cli.out.as_deref());
    }
    if !scenarios::SCENARIOS.contains(&cli.scenario.as_str()) {
        return Err(CliError::UnknownScenario(cli.scenario.clone()));
    }
    if cli.run_dir.is_some() {
        return Err(CliError::Config(format!("unexpected argument for scenario `{}`", cli.scenario)));
    }
    let path = cli.config.as_deref().ok_or_else(|| CliError::Config("--config is required".into()))?;
    let cfg = Config::load(path)?;
    if let Some(s) = cfg.scenario() {
        if s != cli.scenario {
            return Err(CliError::Config(format!("config is for scenario `{s}`, not `{}`", cli.scenario)));
        }
    }
    let seed = match cli.seed {
        Some(s) => s,
        None => cfg.u64("seed")?,
    };
    let out: PathBuf = match (&cli.out, std::env::var_os(OUT_ENV)) {
        (Some(o), _) => o.clone(),
        (None, Some(o)) => o.into(),
        (None, None) => Path::new(cfg.str("output.dir")?).to_path_buf(),
    };
    let mut artifacts = Artifacts::create(&out, &cli.scenario, &cfg.hash, seed)?;
    let summary = scenarios::run(&cli.scenario, &cfg, &mut artifacts)?;
    artifacts.finish(summary)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            let err = CliError::Config(e.to_string().trim().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    match execute(&cli) {
        Ok(v) => {
            let brief = serde_json::json!({
                "artifact": v["artifact"],
                "scenario": v["scenario"],
                "passed": v["passed"],
            });
            println!("{brief}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
