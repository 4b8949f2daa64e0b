//! `specgap`: spectral gap bounds for reversible jump processes.
//!
//! Exit status: 0 on success, 1 on usage or input errors, 2 when
//! verification finds a certificate on the wrong side of the exact value.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0)` deliberately rejects NaN.

mod commands;
mod error;
mod report;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::{Settings, SweepArgs};
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "specgap", version, about = "Spectral gap bounds for reversible jump processes")]
struct Cli {
    /// Write the report to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Modification levels to report, e.g. `0,0.5,1`.
    #[arg(long, global = true, value_delimiter = ',')]
    alpha: Option<Vec<f64>>,
    /// Constant `κ ≥ 1` in the classical two-sided bound (default 1).
    #[arg(long, global = true)]
    kappa: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact eigenvalues, Cheeger constants and every applicable bound.
    Analyze {
        /// Spec file, or `@Name(params)` for a built-in fixture.
        spec: String,
    },
    /// Check every bound against the exact eigenvalues.
    Verify {
        /// Spec file or `@Name(params)`; omit with `--seed`.
        spec: Option<String>,
        /// Verify a batch of 50 random chains starting at this seed.
        #[arg(long, conflicts_with = "spec")]
        seed: Option<u64>,
        #[arg(long, hide = true)]
        corrupt: bool,
    },
    /// Tabulate the gap and selected bounds over a parameter grid.
    Sweep {
        spec: String,
        /// Placeholder name, bound as `$name` in the expressions.
        #[arg(long)]
        param: Option<String>,
        /// `start:stop:step` or a comma-separated list.
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        grid: String,
        /// Truncation levels (lattice radii for lattice chains).
        #[arg(long, value_delimiter = ',')]
        levels: Option<Vec<usize>>,
        /// Exponential-moment parameter for the moment bound column.
        #[arg(long)]
        eps_star: Option<f64>,
        /// Write the CSV to a file instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Cheeger constants with their minimising subsets.
    Subsets { spec: String },
    /// Print the spec in canonical form.
    Show { spec: String },
}

fn emit(text: &str, path: Option<&PathBuf>) -> CliResult<()> {
    match path {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(value: &serde_json::Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialise");
    text.push('\n');
    text
}

fn execute(cli: Cli) -> CliResult<ExitCode> {
    let alpha = cli.alpha.as_deref();
    match cli.command {
        Command::Analyze { spec } => {
            let spec = spec::load(&spec)?;
            let settings = Settings::resolve(&spec.analysis(), alpha, cli.kappa)?;
            emit(&pretty(&commands::analyze(&spec, &settings)?), cli.out.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { spec, seed, corrupt } => {
            let verdict = match (spec, seed) {
                (Some(spec), _) => {
                    let spec = spec::load(&spec)?;
                    let settings = Settings::resolve(&spec.analysis(), alpha, cli.kappa)?;
                    commands::verify_spec(&spec, &settings, corrupt)?
                }
                (None, Some(seed)) => {
                    let settings = Settings::resolve(&Default::default(), alpha, cli.kappa)?;
                    commands::verify_batch(seed, &settings, corrupt)?
                }
                (None, None) => return Err(CliError::Usage("verify needs a spec or --seed".into())),
            };
            emit(&pretty(&verdict.report), cli.out.as_ref())?;
            if verdict.violations > 0 {
                eprintln!("verification failed: {} violation(s)", verdict.violations);
                Ok(ExitCode::from(2))
            } else {
                Ok(ExitCode::SUCCESS)
            }
        }
        Command::Sweep {
            spec,
            param,
            grid,
            levels,
            eps_star,
            csv,
        } => {
            let spec = spec::load(&spec)?;
            let levels = levels
                .or_else(|| spec.analysis().levels)
                .unwrap_or_else(|| vec![200, 2000]);
            let args = SweepArgs {
                param,
                grid: commands::parse_grid(&grid)?,
                levels,
                eps_star,
            };
            let table = commands::sweep(&spec, &args)?;
            emit(&table, csv.as_ref().or(cli.out.as_ref()))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Subsets { spec } => {
            let spec = spec::load(&spec)?;
            let settings = Settings::resolve(&spec.analysis(), alpha, cli.kappa)?;
            emit(&pretty(&commands::subsets(&spec, &settings)?), cli.out.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Show { spec } => {
            emit(&spec::load(&spec)?.to_toml(), cli.out.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
