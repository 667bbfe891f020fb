//! `cavcool` command-line front end.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 numerical
//! error. `CAVCOOL_THREADS` caps the worker pool used by scans.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(cavcool::Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<cavcool::Error> for CliError {
    fn from(e: cavcool::Error) -> Self {
        match e {
            cavcool::Error::Domain(m) => CliError::Config(m),
            other => CliError::Core(other),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Core(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "cavcool", version, about = "Cavity-assisted laser cooling toolkit")]
struct Cli {
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

/// Inclusive linear grid `a:b:n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub n: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.start];
        }
        (0..self.n)
            .map(|i| self.start + (self.stop - self.start) * i as f64 / (self.n - 1) as f64)
            .collect()
    }
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        return Err(format!("expected a:b:n, got {s:?}"));
    };
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    let (start, stop) = (num(a)?, num(b)?);
    let n: usize = n.trim().parse().map_err(|e| format!("{n:?}: {e}"))?;
    if n == 0 || !start.is_finite() || !stop.is_finite() {
        return Err(format!("grid {s:?} needs finite bounds and n >= 1"));
    }
    Ok(Grid { start, stop, n })
}

/// `name=a:b:n`.
fn parse_scan(s: &str) -> Result<(String, Grid), String> {
    let (name, grid) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=a:b:n, got {s:?}"))?;
    Ok((name.trim().to_string(), parse_grid(grid)?))
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cavity parameters, rates and photon budget for one transition.
    Report {
        /// Line name; overrides the config file.
        #[arg(long)]
        transition: Option<String>,
        /// Config file with a [cavity] section.
        #[arg(long)]
        cavity: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Confocal design sweep over finesse and mirror radius.
    Sweep {
        #[arg(long, default_value = config::DEFAULT_TRANSITION)]
        transition: String,
        #[arg(long, value_parser = parse_grid)]
        f_grid: Grid,
        /// Radius grid (m).
        #[arg(long, value_parser = parse_grid)]
        r_grid: Grid,
        #[arg(long, default_value_t = 1.0)]
        degradation: f64,
    },
    /// Damping-ratio map over cooperativity and pump detuning.
    Coolmap(ConfigArg),
    /// Superradiance thresholds and minimum particle numbers.
    Threshold(ConfigArg),
    /// Self-organization trajectory, or a pump scan with `--scan`.
    Dynamics {
        #[arg(long)]
        config: PathBuf,
        /// `omega_p=a:b:n` (Hz) or `omega_p_over_threshold=a:b:n`.
        #[arg(long, value_parser = parse_scan)]
        scan: Option<(String, Grid)>,
        #[arg(long, default_value_t = 10)]
        seeds: usize,
    },
    /// Semiclassical steady state against the exact master equation.
    Oracle(ConfigArg),
    /// Embedded OH transition table.
    Oh {
        #[arg(long)]
        json: bool,
    },
    /// Crossing times of a confocal cavity against particle speed.
    Transit {
        #[arg(long, default_value = config::DEFAULT_TRANSITION)]
        transition: String,
        /// Confocal length (m).
        #[arg(long, default_value_t = 0.1)]
        length_m: f64,
        #[arg(long, default_value_t = 5000.0)]
        finesse: f64,
        #[arg(long, default_value_t = 1.0)]
        degradation: f64,
        /// Speed grid (m/s), log-spaced.
        #[arg(long, default_value = "1:400:100", value_parser = parse_grid)]
        v_grid: Grid,
    },
    /// Illustrative decelerator operating zones.
    Zones,
}

#[derive(Debug, Args)]
struct ConfigArg {
    #[arg(long)]
    config: PathBuf,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("CAVCOOL_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("CAVCOOL_THREADS: expected a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("CAVCOOL_THREADS: {e}")))
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let text = match cli.command {
        Command::Report { transition, cavity, json } => {
            commands::report(transition.as_deref(), &cavity, json)?
        }
        Command::Sweep { transition, f_grid, r_grid, degradation } => {
            commands::sweep(&transition, &f_grid, &r_grid, degradation)?
        }
        Command::Coolmap(a) => commands::coolmap(&a.config)?,
        Command::Threshold(a) => commands::threshold(&a.config)?,
        Command::Dynamics { config, scan, seeds } => commands::dynamics(&config, scan.as_ref(), seeds)?,
        Command::Oracle(a) => commands::oracle(&a.config)?,
        Command::Oh { json } => commands::oh(json)?,
        Command::Transit { transition, length_m, finesse, degradation, v_grid } => {
            commands::transit(&transition, length_m, finesse, degradation, &v_grid)?
        }
        Command::Zones => commands::zones(),
    };
    output::emit(cli.out.as_deref(), &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cavcool: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
