mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nearrack::dynkin::RenderFormat;
use nearrack::nichols::RankMode;

use crate::commands::Outcome;
use crate::config::Config;
use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "nearrack", version, about = "Yang-Baxter solutions, near-rack braidings and Nichols algebras")]
struct Cli {
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// TOML file with budgets (cutoff, mode, max_words, primes); flags win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Exact,
    Modular,
}

impl From<Mode> for RankMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Exact => RankMode::Exact,
            Mode::Modular => RankMode::Modular,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Ascii,
    Dot,
}

impl From<Format> for RenderFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Ascii => RenderFormat::Ascii,
            Format::Dot => RenderFormat::Dot,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the braid relation and report the solution's properties.
    Verify { file: PathBuf },
    /// Print the derived solution and its rack.
    Derive { file: PathBuf },
    /// List near-rack solutions over a rack up to isomorphism.
    EnumNearRacks { rackfile: PathBuf },
    /// Solve the multiplicative system for the braiding coefficients.
    SolveCoefficients {
        file: PathBuf,
        /// Print only the residual constraints.
        #[arg(long)]
        conditions_only: bool,
    },
    /// Find a twist to a rack-type braiding, or an obstruction.
    TEquiv {
        file: PathBuf,
        /// Substitutions such as `x3=x2` selecting a branch of the family.
        #[arg(long, value_delimiter = ',')]
        branch: Vec<String>,
    },
    /// Graded dimensions of the Nichols algebra at a concrete point.
    Nichols {
        file: PathBuf,
        /// Values such as `a=1,e=1,b=zeta3`.
        #[arg(long = "R", value_name = "ASSIGNMENTS", default_value = "")]
        assignments: String,
        #[arg(long)]
        cutoff: Option<usize>,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
    },
    /// Generalized Dynkin diagram of a diagonal braiding or of a twisted near-rack braiding.
    Gdd {
        file: PathBuf,
        #[arg(long, value_delimiter = ',')]
        branch: Vec<String>,
        /// Evaluate the labels at these values.
        #[arg(long = "R", value_name = "ASSIGNMENTS")]
        assignments: Option<String>,
        #[arg(long, value_enum, default_value = "ascii")]
        format: Format,
    },
    /// Match a concrete diagram against the catalogue of finite types.
    Classify { gddfile: PathBuf },
    /// The built-in fixture corpus.
    Fixtures {
        #[command(subcommand)]
        action: FixturesAction,
    },
}

#[derive(Subcommand, Debug)]
enum FixturesAction {
    /// Run fixtures and print a pass/fail table.
    Run {
        #[arg(long)]
        id: Vec<String>,
    },
}

fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    match &cli.command {
        Command::Verify { file } => commands::verify_cmd(file),
        Command::Derive { file } => commands::derive_cmd(file),
        Command::EnumNearRacks { rackfile } => commands::enum_cmd(rackfile),
        Command::SolveCoefficients { file, conditions_only } => commands::solve_cmd(file, *conditions_only),
        Command::TEquiv { file, branch } => commands::tequiv_cmd(file, branch),
        Command::Nichols { file, assignments, cutoff, mode } => {
            let opts = config.nichols_options(*cutoff, mode.map(RankMode::from));
            commands::nichols_cmd(file, assignments, &opts)
        }
        Command::Gdd { file, branch, assignments, format } => {
            commands::gdd_cmd(file, branch, assignments.as_deref(), (*format).into())
        }
        Command::Classify { gddfile } => commands::classify_cmd(gddfile),
        Command::Fixtures { action: FixturesAction::Run { id } } => commands::fixtures_cmd(id),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // help and version requests
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or_default();
            let err = CliError::Usage(first.trim_start_matches("error: ").to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    match dispatch(&cli) {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("values serialize"));
            } else {
                print!("{}", out.text);
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
