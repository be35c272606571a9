//! Command-line front end: config files, CSV output and the `run`, `sweep`
//! and `observe` subcommands.
//!
//! Exit status is 0 on success, 1 when the solver blows up or output cannot
//! be written, and 2 for an invalid configuration (nothing is written).

pub mod commands;
pub mod config;
pub mod output;


use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};
use crate::experiments::DEFAULT_EPS_LIST;

pub use config::{parse_config, render, Emit, RunConfig};

/// Overrides `output_dir` from the config file.
pub const OUTPUT_DIR_ENV: &str = "SEMICLASSICAL_OUTPUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "semiclassical",
    version,
    about = "Semiclassical NLS solver in phase/amplitude form"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Common {
    /// Configuration file (`key = value` lines).
    config: PathBuf,
    /// Sample constraint ratios every N steps.
    #[arg(long)]
    stride: Option<usize>,
    /// Output directory (overrides the config file and the environment).
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evolve one case and write field snapshots and the constraint series.
    Run(Common),
    /// Compare several eps against the eps = 0 run and fit the rate.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated positive eps values.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        eps: Option<Vec<f64>>,
    },
    /// Write only the constraint ratio time series.
    Observe(Common),
}

fn load(common: &Common, env_dir: Option<&OsString>) -> Result<RunConfig> {
    let text = std::fs::read_to_string(&common.config)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", common.config.display())))?;
    let mut cfg = parse_config(&text)?;
    if let Some(dir) = env_dir.filter(|d| !d.is_empty()) {
        cfg.output_dir = PathBuf::from(dir);
    }
    if let Some(dir) = &common.output_dir {
        cfg.output_dir = dir.clone();
    }
    if let Some(stride) = common.stride {
        cfg.stride = stride;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "n/a".into())
}

fn dispatch(cli: Cli, env_dir: Option<&OsString>) -> Result<()> {
    match cli.command {
        Command::Run(common) => {
            let cfg = load(&common, env_dir)?;
            let out = commands::run(&cfg)?;
            let last = out.samples.last().map(|s| s.ratios);
            println!(
                "{} eps={} reached t={} (J1={}, J2={})",
                cfg.case_id,
                cfg.eps,
                out.final_state.t(),
                fmt_opt(last.and_then(|r| r.j1)),
                fmt_opt(last.and_then(|r| r.j2)),
            );
            for p in &out.written {
                println!("wrote {}", p.display());
            }
        }
        Command::Observe(common) => {
            let cfg = load(&common, env_dir)?;
            let out = commands::observe(&cfg)?;
            println!("{} samples", out.samples.len());
            for p in &out.written {
                println!("wrote {}", p.display());
            }
        }
        Command::Sweep { common, eps } => {
            let cfg = load(&common, env_dir)?;
            let eps = eps.unwrap_or_else(|| DEFAULT_EPS_LIST.to_vec());
            let (res, path) = commands::sweep(&cfg, &eps)?;
            println!("eps,indicator_l1,indicator_l2");
            for i in 0..res.eps_values.len() {
                println!(
                    "{},{:e},{:e}",
                    res.eps_values[i], res.l1_indicator[i], res.l2_indicator[i]
                );
            }
            println!(
                "slope L1 = {}, slope L2 = {}",
                fmt_opt(res.slope_l1),
                fmt_opt(res.slope_l2)
            );
            if let Some(p) = path {
                println!("wrote {}", p.display());
            }
        }
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    main_with_env(args, std::env::var_os(OUTPUT_DIR_ENV))
}

fn main_with_env<I, T>(args: I, env_dir: Option<OsString>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match dispatch(cli, env_dir.as_ref()) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                EXIT_CONFIG
            } else {
                EXIT_FAILURE
            }
        }
    }
}
