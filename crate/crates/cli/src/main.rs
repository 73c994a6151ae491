//! `compmatch`: stability checks for many-to-one matching markets.
//!
//! Exit codes: 0 pass, 1 fail (with witness), 2 inconclusive, 64 usage,
//! 65 malformed input, 66 unreadable file.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use compmatch::{Error, DEFAULT_CAP};

use crate::report::Report;

const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;
const EXIT_NO_INPUT: u8 = 66;

#[derive(Parser)]
#[command(
    name = "compmatch",
    version,
    about = "Stability analysis for matching markets with complementarities"
)]
struct Cli {
    /// Print a machine-readable JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify preference classes and balancedness conditions of a market.
    Check(CheckArgs),
    /// Find a stable matching, or report that none exists.
    Solve(SolveArgs),
    /// Validate a technology tree and certify its worker-set matrix.
    Tree(TreeArgs),
    /// List every stable matching by exhaustive search.
    Stable(MarketArg),
    /// Check that a stable matching exists for every worker-preference profile.
    Sweep(SweepArgs),
    /// Print a decomposed market.
    Decompose(DecomposeArgs),
}

#[derive(Args)]
struct MarketArg {
    /// Market file (JSON).
    path: PathBuf,
}

#[derive(Args)]
pub struct CheckArgs {
    /// Market file (JSON).
    pub path: PathBuf,
    /// Balancedness of the acceptable-set matrix (the default check).
    #[arg(long)]
    pub balanced: bool,
    /// Balancedness of the primitive-set matrix.
    #[arg(long)]
    pub primitive: bool,
    /// Total unimodularity of the acceptable-set matrix.
    #[arg(long)]
    pub tu: bool,
    /// Total balancedness of the acceptable-set matrix.
    #[arg(long = "totally-balanced")]
    pub totally_balanced: bool,
    /// No tight odd cycle in the acceptable-set hypergraph.
    #[arg(long = "odd-cycles")]
    pub odd_cycles: bool,
    /// Balancedness of the firm-worker hypergraph.
    #[arg(long = "firm-worker")]
    pub firm_worker: bool,
    /// Every firm has a complementary preference.
    #[arg(long)]
    pub complementary: bool,
    /// Every firm has an additive preference.
    #[arg(long)]
    pub additive: bool,
    /// Largest reduced matrix searched exhaustively.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub cap: usize,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum StrategyArg {
    Direct,
    Pipeline,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum DecomposeArg {
    Sets,
    Components,
}

#[derive(Args)]
pub struct SolveArgs {
    /// Market file (JSON).
    pub path: PathBuf,
    #[arg(long, value_enum, default_value = "direct")]
    pub strategy: StrategyArg,
    /// Stable fractional matching of the decomposed market (pipeline only).
    #[arg(long)]
    pub fractional: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "sets")]
    pub decompose: DecomposeArg,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub cap: usize,
}

#[derive(Args)]
pub struct TreeArgs {
    /// Tree file (indented outline or JSON).
    pub path: PathBuf,
    /// Check the neighbour condition (the default).
    #[arg(long)]
    pub validate: bool,
    /// Print the worker-set matrix and certify it totally balanced.
    #[arg(long)]
    pub matrix: bool,
    /// Search child orders for one that satisfies the neighbour condition.
    #[arg(long)]
    pub permute: bool,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub cap: usize,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum SweepSolverArg {
    Direct,
    Components,
    Oracle,
}

#[derive(Args)]
pub struct SweepArgs {
    /// Market file (JSON); its worker lists are ignored.
    pub path: PathBuf,
    #[arg(long, value_enum, default_value = "direct")]
    pub solver: SweepSolverArg,
    /// Only complete rankings of acceptable firms, no truncations.
    #[arg(long = "no-truncations")]
    pub no_truncations: bool,
    /// Sample this many profiles when the space exceeds the budget.
    #[arg(long)]
    pub sample: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args)]
pub struct DecomposeArgs {
    /// Market file (JSON).
    pub path: PathBuf,
    #[arg(long, value_enum, default_value = "sets")]
    pub by: DecomposeArg,
}

/// Failure to produce a report.
pub enum Failure {
    Read(PathBuf, std::io::Error),
    Data(PathBuf, Error),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Read(..) => EXIT_NO_INPUT,
            Failure::Data(_, Error::BudgetExceeded(_)) => report::Status::Inconclusive.exit_code(),
            Failure::Data(..) => EXIT_DATA,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Read(p, e) => format!("{}: {e}", p.display()),
            Failure::Data(p, Error::Parse { line, column, message }) => {
                format!("{}:{line}:{column}: {message}", p.display())
            }
            Failure::Data(p, e) => format!("{}: {e}", p.display()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Check(a) => commands::check(a),
        Command::Solve(a) => commands::solve(a),
        Command::Tree(a) => commands::tree(a),
        Command::Stable(a) => commands::stable(&a.path),
        Command::Sweep(a) => commands::sweep(a),
        Command::Decompose(a) => commands::decompose(a),
    };
    match result {
        Ok(r) => emit(&r, cli.json),
        Err(f) => {
            if cli.json {
                let v = serde_json::json!({"status": "ERROR", "error": f.message()});
                println!("{}", serde_json::to_string_pretty(&v).expect("json"));
            }
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}

fn emit(r: &Report, json: bool) -> ExitCode {
    if json {
        println!("{}", serde_json::to_string_pretty(&r.json).expect("json"));
    } else {
        println!("{}", r.text.trim_end());
    }
    ExitCode::from(r.status.exit_code())
}
