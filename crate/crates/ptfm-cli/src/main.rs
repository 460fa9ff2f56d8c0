use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ptfm_cli::commands::{cmd_eval, cmd_infer, cmd_synth, cmd_train, CommonFlags};
use ptfm_cli::config::RunConfig;

/// Turnaround, block-time, and delay estimation for disrupted flight
/// schedules: synthesize data, train the six-model bundle, evaluate it, and
/// run fused inference.
#[derive(Parser)]
#[command(name = "ptfm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic flight-record CSV from the config's data section.
    Synth {
        /// Run configuration (TOML).
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path.
        out_csv: PathBuf,
    },
    /// Segment, split, and train the six-model bundle for the configured role.
    Train {
        #[arg(long)]
        config: PathBuf,
        /// Directory receiving the model files, manifest, training log, and
        /// held-out rows.
        bundle_dir: PathBuf,
        /// Train the six members concurrently (results are identical).
        #[arg(long)]
        parallel: bool,
        /// Reject input files at the first bad row instead of skipping.
        #[arg(long)]
        strict: bool,
    },
    /// Score a bundle against a test CSV; writes report.json/report.txt and
    /// ROC point CSVs into the config's output directory.
    Eval {
        #[arg(long)]
        config: PathBuf,
        bundle_dir: PathBuf,
        test_csv: PathBuf,
        #[arg(long)]
        strict: bool,
    },
    /// Fused estimates for each record; writes estimates.csv into the
    /// config's output directory.
    Infer {
        #[arg(long)]
        config: PathBuf,
        bundle_dir: PathBuf,
        records_csv: PathBuf,
        #[arg(long)]
        strict: bool,
    },
}

fn run() -> anyhow::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Synth { config, out_csv } => {
            let cfg = RunConfig::load(&config)?;
            cmd_synth(&cfg, &out_csv)?;
        }
        Command::Train {
            config,
            bundle_dir,
            parallel,
            strict,
        } => {
            let cfg = RunConfig::load(&config)?;
            cmd_train(&cfg, &bundle_dir, CommonFlags { strict, parallel })?;
        }
        Command::Eval {
            config,
            bundle_dir,
            test_csv,
            strict,
        } => {
            let cfg = RunConfig::load(&config)?;
            cmd_eval(
                &cfg,
                &bundle_dir,
                &test_csv,
                CommonFlags {
                    strict,
                    parallel: false,
                },
            )?;
        }
        Command::Infer {
            config,
            bundle_dir,
            records_csv,
            strict,
        } => {
            let cfg = RunConfig::load(&config)?;
            cmd_infer(
                &cfg,
                &bundle_dir,
                &records_csv,
                CommonFlags {
                    strict,
                    parallel: false,
                },
            )?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
