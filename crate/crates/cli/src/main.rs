//! `oppq`: converging eigenenergy bounds from moment equations.

mod config;
mod output;
mod presets;
mod run;

use clap::{Args, Parser, Subcommand};
use config::RunConfig;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
    #[error("{0}: {1}")]
    Csv(String, #[source] csv::Error),
    #[error(transparent)]
    Core(#[from] oppq_core::Error),
    #[error("order {order}: {message}")]
    Order { order: usize, message: String },
    #[error("{message}\nsequence of minima:\n  {}\npass a manual upper bound with --bu <decimal> or `b_u` in the config", sequence.join("\n  "))]
    BuNotConverged { message: String, sequence: Vec<String> },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::BuNotConverged { .. } => 3,
            _ => 1,
        }
    }
}

#[derive(Parser)]
#[command(name = "oppq", version, about = "Converging lower and upper eigenenergy bounds from moment equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the energy function of each order over the window.
    Scan(RunArgs),
    /// Locate the minimum of each order.
    Minimize(RunArgs),
    /// Minimize, fix B_U, and extract the bounding interval of each order.
    Bound(RunArgs),
    /// List the shipped presets, or print one.
    Presets {
        name: Option<String>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Shipped configuration by name (see `oppq presets`).
    #[arg(long)]
    preset: Option<String>,
    /// Working precision in decimal digits.
    #[arg(long)]
    precision: Option<u32>,
    /// Manual upper bound B_U; replaces any configured value or stages.
    #[arg(long)]
    bu: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn load(&self) -> Result<RunConfig, CliError> {
        let mut config = match (&self.config, &self.preset) {
            (Some(path), _) => RunConfig::load(path)?,
            (None, Some(name)) => presets::load(name)?,
            (None, None) => unreachable!("clap requires one source"),
        };
        if let Some(d) = self.precision {
            config.precision = d;
        }
        if let Some(bu) = &self.bu {
            config.b_u = Some(bu.clone());
            config.b_u_stages.clear();
        }
        if let Some(out) = &self.out {
            config.output_dir = out.clone();
        }
        config.validate()?;
        Ok(config)
    }
}

fn report(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Scan(args) => {
            let config = args.load()?;
            let scans = run::cmd_scan(&config)?;
            if config.emit.plots {
                report(&output::write_scans(&config, &config.output_dir, &scans)?);
            }
        }
        Command::Minimize(args) => {
            let config = args.load()?;
            let out = run::cmd_minimize(&config)?;
            let mut paths = Vec::new();
            if config.emit.tables {
                paths.push(output::write_minima(&config, &config.output_dir, &out)?);
            }
            if config.emit.ledger {
                paths.push(output::write_ledger(&config, &config.output_dir, "minimize", &out)?);
            }
            report(&paths);
        }
        Command::Bound(args) => {
            let config = args.load()?;
            let out = run::cmd_bound(&config)?;
            let mut paths = Vec::new();
            if config.emit.tables {
                paths.push(output::write_bounds(&config, &config.output_dir, &out)?);
            }
            if config.emit.ledger {
                paths.push(output::write_ledger(&config, &config.output_dir, "bound", &out)?);
            }
            report(&paths);
        }
        Command::Presets { name: None } => {
            for (name, _) in presets::PRESETS {
                println!("{name}");
            }
        }
        Command::Presets { name: Some(name) } => {
            print!("{}", presets::text(&name)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
