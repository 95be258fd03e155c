//! Command-line front end: scattering-pole scans, pole tables, convergence
//! studies, and the unit-disk oracle.
//!
//! Configuration comes from an optional JSON file plus flag overrides; the
//! flags win. Exit codes: 0 success, 2 configuration error, 3 numerical
//! failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use scatpole::run::{cmd_convergence, cmd_disk_oracle, cmd_poles, cmd_scan, FlavorChoice, RunConfig};
use scatpole::{Error, Result};

#[derive(Parser)]
#[command(name = "scatpole", version, about = "Scattering poles of sound-soft planar obstacles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON configuration file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Truncation order (matrix dimension 2n + 1).
    #[arg(long)]
    n: Option<usize>,
    /// Operator family: single, double, or both.
    #[arg(long)]
    flavor: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 picks the rayon default.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Spectral-indicator heatmap over the search region.
    Scan(Common),
    /// Locate and refine poles; writes JSON and a printable table.
    Poles(Common),
    /// Pole errors against a reference for a list of orders.
    Convergence {
        #[command(flatten)]
        common: Common,
        /// Comma-separated truncation orders, e.g. 5,6,7,8.
        #[arg(long, value_delimiter = ',')]
        n_list: Option<Vec<usize>>,
    },
    /// Hankel-function zeros of the unit disk with certification counts.
    DiskOracle {
        #[command(flatten)]
        common: Common,
        /// Largest Hankel order to sweep.
        #[arg(long)]
        nu_max: Option<u32>,
    },
}

fn load(common: &Common) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(n) = common.n {
        cfg.n = n;
    }
    if let Some(flavor) = &common.flavor {
        cfg.flavor = match flavor.as_str() {
            "single" => FlavorChoice::Single,
            "double" => FlavorChoice::Double,
            "both" => FlavorChoice::Both,
            other => {
                return Err(Error::Config(format!(
                    "flavor must be single, double, or both, got {other:?}"
                )))
            }
        };
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(threads) = common.threads {
        cfg.threads = threads;
    }
    if let Some(dir) = &common.output_dir {
        cfg.output_dir = dir.clone();
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Scan(common) => cmd_scan(&load(&common)?),
        Command::Poles(common) => cmd_poles(&load(&common)?),
        Command::Convergence { common, n_list } => {
            let mut cfg = load(&common)?;
            if let Some(list) = n_list {
                cfg.n_list = Some(list);
            }
            cmd_convergence(&cfg)
        }
        Command::DiskOracle { common, nu_max } => {
            let mut cfg = load(&common)?;
            if let Some(nu) = nu_max {
                cfg.nu_max = nu;
            }
            cmd_disk_oracle(&cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
