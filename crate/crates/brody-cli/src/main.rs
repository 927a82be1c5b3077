use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use brody_cli::{check_curve, emit_summary, run_experiment, ExperimentConfig, EXIT_CONFIG, EXIT_FAILED};

/// Experiment runner for the Brody-curve numerical laboratory.
#[derive(Parser)]
#[command(name = "brody", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config file.
    Run {
        /// Path to the experiment config.
        config: PathBuf,
        /// Override the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (default: the config's `output`, else `brody-out`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Aggregate the manifests under a report directory.
    Summarize {
        /// Directory containing one or more run outputs.
        dir: PathBuf,
    },
    /// Parse and validate a curve definition file.
    CheckCurve {
        /// Path to the curve definition.
        file: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let status = match cli.command {
        Command::Run { config, seed, out } => {
            let mut cfg = match ExperimentConfig::load(&config) {
                Ok(cfg) => cfg,
                Err(e) => {
                    eprintln!("invalid config: {e}");
                    return ExitCode::from(EXIT_CONFIG as u8);
                }
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let out_dir = out
                .or_else(|| cfg.output.clone())
                .unwrap_or_else(|| PathBuf::from("brody-out"));
            match run_experiment(&cfg, &out_dir) {
                Ok(outcome) => {
                    for inv in &outcome.manifest.invariants {
                        let mark = if inv.pass { "pass" } else { "FAIL" };
                        println!("[{mark}] {}: {}", inv.name, inv.detail);
                    }
                    println!(
                        "{} (seed {}) -> {} [status {}]",
                        outcome.manifest.kind,
                        outcome.manifest.seed,
                        out_dir.display(),
                        outcome.status
                    );
                    outcome.status
                }
                Err(e) => {
                    eprintln!("cannot write reports: {e}");
                    EXIT_FAILED
                }
            }
        }
        Command::Summarize { dir } => match emit_summary(&dir) {
            Ok(summary) => {
                println!("{}", summary.to_json());
                if summary.all_pass {
                    0
                } else {
                    EXIT_FAILED
                }
            }
            Err(e) => {
                eprintln!("{e}");
                EXIT_FAILED
            }
        },
        Command::CheckCurve { file } => match check_curve(&file) {
            Ok(report) => {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("report serializes")
                );
                0
            }
            Err(e) => {
                eprintln!("{e}");
                EXIT_FAILED
            }
        },
    };
    ExitCode::from(status as u8)
}
