//! `wanderer`: runs configurations, figure presets, sweeps and plot exports.
//!
//! Exit codes: 0 success, 2 config error, 3 schedule violation, 4 I/O error.

use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use wanderer_core::error::{Error, Result};
use wanderer_core::plotdata::write_plotdata;
use wanderer_core::sweep::{sweep, SweepSpec};
use wanderer_core::trace::{read_trace, write_trace};
use wanderer_core::{run, run_preset, Preset, RunConfig};

#[derive(Parser)]
#[command(
    name = "wanderer",
    version,
    about = "Simulator of a hunger/caution driven explorer"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configuration file and write its trace CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the seed in the file.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a figure preset (fig2..fig6, optionally with a `-scripted` suffix).
    Preset {
        name: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use the fixed event schedule instead of sampled events.
        #[arg(long)]
        scripted: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a parameter sweep and write the per-run and per-cell table.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (default: available cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Export the exploration series and feature bands of a trace.
    Plotdata {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Parse and validate a configuration file, printing it with defaults filled in.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn load_config(path: &Path) -> Result<RunConfig> {
    RunConfig::parse(&read_text(path)?)
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Run { config, seed, out } => {
            let mut cfg = load_config(&config)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            let trace = run(&cfg)?;
            write_trace(&trace, &out)?;
            print!("seed: {}\n{}", cfg.seed, trace.summary().to_yaml());
        }
        Command::Preset {
            name,
            seed,
            scripted,
            out,
        } => {
            let (preset, suffixed): (Preset, bool) = Preset::parse_name(&name)?;
            let result = run_preset(preset, seed, scripted || suffixed)?;
            write_trace(&result.trace, &out)?;
            print!("{}", result.summary.to_yaml());
        }
        Command::Sweep { spec, out, jobs } => {
            if jobs == Some(0) {
                return Err(Error::Invalid {
                    field: "jobs".into(),
                    message: "must be at least 1".into(),
                });
            }
            let spec = SweepSpec::parse(&read_text(&spec)?)?;
            let result = sweep(&spec, jobs)?;
            result.write(&out)?;
            println!("cells: {}", result.cells.len());
            println!("runs: {}", result.runs.len());
        }
        Command::Plotdata { trace, out_dir } => {
            let trace = read_trace(&trace)?;
            write_plotdata(&trace, &out_dir)?;
        }
        Command::Validate { config } => {
            let cfg = load_config(&config)?;
            print!("{}", cfg.render());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
