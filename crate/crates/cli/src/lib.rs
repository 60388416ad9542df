//! Command-line driver: synthesize station climates, validate them,
//! simulate the collector, sweep the configuration grid and map the results.

pub mod commands;
pub mod config;
pub mod error;
pub mod synth;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

pub use config::{RunConfig, Workers};
pub use error::{CliError, ErrorCode};

#[derive(Debug, Parser)]
#[command(name = "ssmap", version, about = "Collector-wall simulation and station mapping")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Worker threads, or "auto" for one per core.
    #[arg(long, global = true, value_name = "N|auto")]
    pub workers: Option<Workers>,
    #[arg(long, global = true, value_name = "DIR")]
    pub climate_dir: Option<PathBuf>,
    #[arg(long, global = true, value_name = "DIR")]
    pub output_dir: Option<PathBuf>,
    /// Operability threshold, W/m².
    #[arg(long, global = true, value_name = "W/m2")]
    pub threshold: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write synthetic station climates and an index into the climate directory.
    Synth {
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check climate files and repair short gaps.
    Validate,
    /// Simulate the collector at every station.
    Simulate,
    /// Evaluate the configuration grid at every station.
    Sweep,
    /// Interpolate one indicator field onto the map grid.
    Map {
        #[arg(long)]
        field: Option<String>,
    },
}

/// Config from `--config` (or defaults) with command-line overrides applied.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(w) = cli.workers {
        cfg.workers = w;
    }
    if let Some(d) = &cli.climate_dir {
        cfg.climate_dir = d.clone();
    }
    if let Some(d) = &cli.output_dir {
        cfg.output_dir = d.clone();
    }
    if let Some(t) = cli.threshold {
        cfg.threshold = t;
    }
    match &cli.command {
        Command::Synth { count, seed } => {
            if let Some(c) = count {
                cfg.synth.count = *c;
            }
            if let Some(s) = seed {
                cfg.synth.seed = *s;
            }
        }
        Command::Map { field: Some(f) } => cfg.map.field = f.clone(),
        _ => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Executes one command and returns the report printed on success.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    let cfg = resolve_config(cli)?;
    let report = match &cli.command {
        Command::Synth { .. } => {
            let r = commands::cmd_synth(&cfg)?;
            format!("synth: {} stations, index {}", r.stations, r.index.display())
        }
        Command::Validate => {
            let r = commands::cmd_validate(&cfg)?;
            format!("validate: {} files, {} repaired, report {}", r.files, r.repaired, r.report.display())
        }
        Command::Simulate => {
            let r = commands::cmd_simulate(&cfg)?;
            format!("simulate: {} stations, summary {}", r.indicators.len(), r.summary.display())
        }
        Command::Sweep => {
            let r = commands::cmd_sweep(&cfg)?;
            format!(
                "sweep: {} stations x {} cells, best {}",
                r.stations,
                r.cells_per_station,
                r.best.display()
            )
        }
        Command::Map { .. } => {
            let r = commands::cmd_map(&cfg, &cfg.map.field)?;
            format!(
                "map: {} from {} stations on {}x{} grid in {}",
                r.field,
                r.stations,
                r.rows,
                r.cols,
                cfg.output_dir.join(commands::MAP_DIR).display()
            )
        }
    };
    Ok(report)
}

/// Parses `args` (program name first) and runs the command. Help and
/// version requests come back as `Ok` text.
pub fn run<I, T>(args: I) -> Result<String, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            return Ok(e.render().to_string().trim_end().to_string());
        }
        Err(e) => {
            let text = e.render().to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            return Err(CliError::new(ErrorCode::Usage, first.trim_start_matches("error: ")));
        }
    };
    execute(&cli)
}
