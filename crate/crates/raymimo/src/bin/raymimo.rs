//! Experiment harness CLI.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical-accuracy failure.

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use raymimo::error::Error;
use raymimo::experiments::config::{self, RawConfig};
use raymimo::experiments::{registered_experiments, run_experiment, Severity};

#[derive(Parser)]
#[command(name = "raymimo", version, about = "Ray-based massive MIMO experiment harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a config file.
    Run {
        /// Path to a TOML config (see README for the schema).
        #[arg(long)]
        config: PathBuf,
        /// Override the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the registered experiments.
    List,
    /// Validate a config file and report findings without running.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn load_config(path: &PathBuf) -> Result<RawConfig, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    config::parse_toml(&text)
}

fn exit_code_for(err: &Error) -> ExitCode {
    match err {
        Error::Config(_) | Error::UnsupportedVariant(_) => ExitCode::from(2),
        Error::Accuracy { .. }
        | Error::Domain(_)
        | Error::Overflow(_)
        | Error::DegenerateEnsemble(_)
        | Error::Dimension { .. } => ExitCode::from(3),
        Error::Io(_) => ExitCode::from(1),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for (name, desc) in registered_experiments() {
                println!("{name:<8} {desc}");
            }
            ExitCode::SUCCESS
        }
        Command::Validate { config: path } => {
            let raw = match load_config(&path) {
                Ok(raw) => raw,
                Err(e) => {
                    eprintln!("{e}");
                    return exit_code_for(&e);
                }
            };
            let merged = match config::merge_defaults(&raw) {
                Ok(m) => m,
                Err(e) => {
                    eprintln!("{e}");
                    return exit_code_for(&e);
                }
            };
            let findings = config::validate_config(&merged);
            for f in &findings {
                println!("{f}");
            }
            if findings.iter().any(|f| f.severity == Severity::Error) {
                ExitCode::from(2)
            } else {
                println!("ok: configuration is valid");
                ExitCode::SUCCESS
            }
        }
        Command::Run { config: path, seed, out } => {
            let mut raw = match load_config(&path) {
                Ok(raw) => raw,
                Err(e) => {
                    eprintln!("{e}");
                    return exit_code_for(&e);
                }
            };
            if let Some(s) = seed {
                raw.seed = Some(s);
            }
            if let Some(o) = &out {
                raw.out_dir = Some(o.display().to_string());
            }
            let exp = match config::resolve(&raw) {
                Ok(exp) => exp,
                Err(e) => {
                    eprintln!("{e}");
                    return exit_code_for(&e);
                }
            };
            let out_dir = PathBuf::from(
                exp.out_dir
                    .clone()
                    .unwrap_or_else(|| format!("out/{}", exp.name)),
            );
            match run_experiment(&exp, &out_dir) {
                Ok(manifest) => {
                    println!(
                        "{}: {} files in {} ({:.2}s)",
                        manifest.experiment,
                        manifest.outputs.len(),
                        out_dir.display(),
                        manifest.wall_clock_seconds
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("{e}");
                    exit_code_for(&e)
                }
            }
        }
    }
}
