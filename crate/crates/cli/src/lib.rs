//! Command-line front end: TOML config ingestion, subcommand dispatch and
//! CSV/SVG output.
//!
//! Exit codes: 0 success, 1 config or I/O error, 2 numerical failure,
//! 3 validity failure under `check --strict`.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod svg;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use eitgap::angular_to_hz;
use eitgap::bandstructure::GapSearch;

pub use config::Config;
pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "eitgap", version, about = "Stationary-light band gaps in EIT media")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML configuration file.
    pub config: PathBuf,
    /// Output directory; overrides `output.dir` (default `out`).
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analytic and numeric band structure over a frequency grid.
    Band(Common),
    /// Reflection and transmission spectrum of the finite sample.
    Reflect(Common),
    /// Raw polariton dynamics under a drive schedule.
    Evolve(Common),
    /// Full store, trap and release scenario with summary and validity report.
    Protocol(Common),
    /// Validity report only.
    Check {
        #[command(flatten)]
        common: Common,
        /// Exit with status 3 if any check fails.
        #[arg(long)]
        strict: bool,
    },
}

fn out_dir(common: &Common, cfg: &Config) -> PathBuf {
    common
        .out
        .clone()
        .or_else(|| cfg.output().dir.map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn list(files: &[PathBuf]) {
    for f in files {
        println!("wrote {}", f.display());
    }
}

pub fn dispatch(cli: Cli) -> CliResult<()> {
    let (common, strict) = match &cli.command {
        Command::Band(c) | Command::Reflect(c) | Command::Evolve(c) | Command::Protocol(c) => (c, false),
        Command::Check { common, strict } => (common, *strict),
    };
    let cfg = Config::load(&common.config)?;
    let out = out_dir(common, &cfg);
    let out: &Path = &out;
    match cli.command {
        Command::Band(_) => {
            let r = commands::band(&cfg, out)?;
            if let Some(e) = r.edges {
                println!(
                    "analytic gap: [{:.6e}, {:.6e}] Hz",
                    angular_to_hz(e.analytic.0),
                    angular_to_hz(e.analytic.1)
                );
                match e.numeric {
                    GapSearch::Resolved { lower, upper } => println!(
                        "numeric gap:  [{:.6e}, {:.6e}] Hz",
                        angular_to_hz(lower),
                        angular_to_hz(upper)
                    ),
                    GapSearch::NoGapResolved => println!("numeric gap:  not resolved"),
                }
            }
            list(&r.files);
        }
        Command::Reflect(_) => {
            let r = commands::reflect(&cfg, out)?;
            if let Some(s) = r.summary {
                println!("periods: {}", r.periods);
                println!("peak reflectivity: {:.6} at {:.6e} Hz", s.peak_reflectivity, angular_to_hz(s.peak_omega));
                match s.fwhm {
                    Some(w) => println!("full width at half maximum: {:.6e} Hz", angular_to_hz(w)),
                    None => println!("full width at half maximum: not bracketed by the grid"),
                }
            }
            list(&r.files);
        }
        Command::Evolve(_) => {
            let r = commands::evolve(&cfg, out)?;
            for w in &r.trajectory.warnings {
                eprintln!("warning: {w}");
            }
            println!("final norm: {:.12}", r.trajectory.final_state.norm());
            list(&r.files);
        }
        Command::Protocol(_) => {
            let r = commands::protocol(&cfg, out)?;
            for w in &r.result.warnings {
                eprintln!("warning: {w}");
            }
            for (k, v) in commands::summary_pairs(&r.result, &r.report) {
                if k != "warning" {
                    println!("{k} = {v}");
                }
            }
            list(&r.files);
        }
        Command::Check { .. } => {
            let r = commands::check(&cfg, out)?;
            for c in &r.report.checks {
                println!(
                    "{:<20} {:>5}  value {:.4e}  bound {:.4e}  ratio {:.4e}",
                    c.name,
                    c.status.as_str(),
                    c.value,
                    c.bound,
                    c.ratio
                );
            }
            list(&r.files);
            if strict && r.report.any_fail() {
                let failed: Vec<&str> = r
                    .report
                    .checks
                    .iter()
                    .filter(|c| c.status == eitgap::CheckStatus::Fail)
                    .map(|c| c.name)
                    .collect();
                return Err(CliError::Validity(failed.join(", ")));
            }
        }
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs; returns the exit
/// code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
