//! `squidsim`: command-line front end for the SQUID amplifier simulator.
//!
//! Every subcommand loads a flat `key = value` config file, runs one
//! analysis, and prints a table (CSV by default, JSON with `--json`) to
//! stdout or to `--out <path>`. Diagnostics go to stderr only, so stdout
//! stays machine-readable.

use clap::{Parser, Subcommand};
use squidsim_cli::config::{load_config, RunConfig};
use squidsim_cli::output::{to_csv, to_json, Table};
use squidsim_cli::run;
use squidsim_core::SimError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "squidsim",
    about = "Microstrip-coupled dc SQUID amplifier simulator",
    version
)]
struct Cli {
    /// Emit JSON instead of CSV.
    #[arg(long, global = true)]
    json: bool,

    /// Write the table to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the lowest resonant modes of the stripline.
    Modes {
        /// Path to the config file.
        config: PathBuf,
        /// Number of modes to list, starting at n = 1.
        #[arg(long, default_value_t = 10)]
        count: u32,
    },
    /// Sweep the forward transimpedance over the configured frequency grid.
    Impedance {
        /// Path to the config file.
        config: PathBuf,
    },
    /// Sweep the dc current-voltage characteristic.
    Iv {
        /// Path to the config file.
        config: PathBuf,
        /// Lowest bias current in amperes (default 0).
        #[arg(long, value_name = "AMPS")]
        min_current: Option<f64>,
        /// Highest bias current in amperes (default 3 * critical_current).
        #[arg(long, value_name = "AMPS")]
        max_current: Option<f64>,
        /// Number of bias points.
        #[arg(long, default_value_t = 41)]
        points: u32,
    },
    /// Compute the flux-to-voltage and flux-to-current transfer functions
    /// at the configured operating point.
    Transfer {
        /// Path to the config file.
        config: PathBuf,
    },
    /// Sweep the small-signal amplifier gain over the frequency grid.
    Gain {
        /// Path to the config file.
        config: PathBuf,
        /// Rerun the sweep with the loop inductance reduced by the
        /// coupling, and report the comparison on stderr.
        #[arg(long)]
        renormalized: bool,
    },
    /// Report the Josephson-frequency screening ratio at the operating point.
    Screening {
        /// Path to the config file.
        config: PathBuf,
    },
    /// Cross-check the static gain against a driven time-domain run.
    Validate {
        /// Path to the config file.
        config: PathBuf,
        /// Drive frequency in rad/s (default: Josephson frequency / 100).
        #[arg(long, value_name = "RAD_S")]
        omega: Option<f64>,
    },
}

/// Configure the global worker pool from SQUIDSIM_THREADS. Unset or 0
/// means "let the pool pick"; a positive integer pins the thread count.
fn init_threads() -> Result<(), SimError> {
    let Ok(raw) = std::env::var("SQUIDSIM_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| SimError::Config(format!("SQUIDSIM_THREADS must be an integer, got `{raw}`")))?;
    if n == 0 {
        return Ok(());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| SimError::Config(format!("failed to build thread pool: {e}")))
}

fn load(path: &PathBuf) -> Result<RunConfig, SimError> {
    let cfg = load_config(path)?;
    run::hysteresis_warning(&cfg);
    Ok(cfg)
}

fn dispatch(cli: &Cli) -> Result<Table, SimError> {
    match &cli.command {
        Command::Modes { config, count } => run::modes(&load(config)?, *count),
        Command::Impedance { config } => run::impedance(&load(config)?),
        Command::Iv {
            config,
            min_current,
            max_current,
            points,
        } => run::iv(&load(config)?, *min_current, *max_current, *points),
        Command::Transfer { config } => run::transfer(&load(config)?),
        Command::Gain {
            config,
            renormalized,
        } => run::gain(&load(config)?, *renormalized),
        Command::Screening { config } => run::screening(&load(config)?),
        Command::Validate { config, omega } => run::validate(&load(config)?, *omega),
    }
}

/// Exit status for a failure: 2 for configuration or argument problems,
/// 3 for runtime failures (divergence, non-convergence, singular points).
fn exit_status(err: &SimError) -> ExitCode {
    match err {
        SimError::Config(_) | SimError::InvalidParameter { .. } | SimError::InvalidArgument(_) => {
            ExitCode::from(2)
        }
        _ => ExitCode::from(3),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return exit_status(&e);
    }
    let table = match dispatch(&cli) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_status(&e);
        }
    };
    let rendered = if cli.json {
        to_json(&table)
    } else {
        to_csv(&table)
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, rendered) {
                let err = SimError::Config(format!("cannot write {}: {e}", path.display()));
                eprintln!("error: {err}");
                return exit_status(&err);
            }
        }
        None => print!("{rendered}"),
    }
    ExitCode::SUCCESS
}
