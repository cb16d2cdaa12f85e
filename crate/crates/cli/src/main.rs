mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lca_core::Error;

const EXIT_VIOLATION: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "lca", version, about = "Exact checks and solvers for the Lie conformal algebras B(p)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    config: Config,
}

#[derive(Args, Debug, Clone)]
pub struct Config {
    /// Parameter p: an integer, a fraction a/b, or "formal".
    #[arg(long, global = true, default_value = "formal", allow_hyphen_values = true)]
    pub p: String,
    /// Largest generator index in the checked grid or truncation.
    #[arg(long, global = true)]
    pub max_index: Option<usize>,
    #[arg(long, global = true)]
    pub deg_lambda: Option<u8>,
    #[arg(long, global = true)]
    pub deg_partial: Option<u8>,
    #[arg(long, global = true, value_enum, default_value_t = Coeffs::Trivial)]
    pub coeffs: Coeffs,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub delta: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub beta: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the annihilation structure table as CSV.
    #[arg(long, global = true)]
    pub emit_table: Option<PathBuf>,
    /// Worker threads for grid checks.
    #[arg(long, global = true, env = "LCA_JOBS")]
    pub jobs: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coeffs {
    Trivial,
    MDeltaAlpha,
    MDeltaAlphaBeta,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Skew-symmetry, Jacobi identity and the Virasoro and Heisenberg-Virasoro subalgebras.
    VerifyAxioms,
    /// Closed versus derived annihilation bracket, antisymmetry and Jacobi.
    Annihilation,
    #[command(subcommand)]
    Derivations(DerivationsCmd),
    #[command(subcommand)]
    Biderivations(BiderivationsCmd),
    #[command(subcommand)]
    Cohomology(CohomologyCmd),
}

#[derive(Subcommand, Debug)]
enum DerivationsCmd {
    /// Leibniz rule for inner derivations and, for p in Z⁻, the outer one.
    Check,
    /// Solve the truncated Leibniz system and compare with the expected quotient.
    Classify,
    /// Leibniz rule and non-innerness certificate for the outer derivation.
    Outer,
}

#[derive(Subcommand, Debug)]
enum BiderivationsCmd {
    /// Conformal biderivation identities for the inner and stated families.
    Check,
}

#[derive(Subcommand, Debug)]
enum CohomologyCmd {
    /// Cocycle condition and non-triviality of the named classes.
    Named,
    /// Solve the truncated cocycle condition and report the quotient.
    Solve,
    /// Round-trip random coboundaries through trivialization.
    Trivialize,
}

/// A finished command: its report and whether every contract held.
pub struct Outcome {
    pub ok: bool,
    pub text: Vec<String>,
    pub json: serde_json::Value,
}

pub enum Failure {
    Usage(String),
    Violation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::DimensionMismatch { .. }
            | Error::NotASubspace { .. }
            | Error::NotACocycle(_)
            | Error::SkewViolation { .. } => Failure::Violation(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Some(jobs) = cli.config.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(EXIT_USAGE);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let (name, result) = dispatch(&cli.command, &cli.config);
    match result {
        Ok(outcome) => {
            emit(name, &cli.config, &outcome);
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_VIOLATION)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Violation(msg)) => {
            eprintln!("contract violation: {msg}");
            ExitCode::from(EXIT_VIOLATION)
        }
    }
}

fn dispatch(command: &Command, config: &Config) -> (&'static str, Result<Outcome, Failure>) {
    match command {
        Command::VerifyAxioms => ("verify-axioms", commands::verify_axioms(config)),
        Command::Annihilation => ("annihilation", commands::annihilation(config)),
        Command::Derivations(DerivationsCmd::Check) => ("derivations check", commands::derivations_check(config)),
        Command::Derivations(DerivationsCmd::Classify) => {
            ("derivations classify", commands::derivations_classify(config))
        }
        Command::Derivations(DerivationsCmd::Outer) => ("derivations outer", commands::derivations_outer(config)),
        Command::Biderivations(BiderivationsCmd::Check) => {
            ("biderivations check", commands::biderivations_check(config))
        }
        Command::Cohomology(CohomologyCmd::Named) => ("cohomology named", commands::cohomology_named(config)),
        Command::Cohomology(CohomologyCmd::Solve) => ("cohomology solve", commands::cohomology_solve(config)),
        Command::Cohomology(CohomologyCmd::Trivialize) => {
            ("cohomology trivialize", commands::cohomology_trivialize(config))
        }
    }
}

fn emit(name: &str, config: &Config, outcome: &Outcome) {
    match config.format {
        Format::Json => {
            let report = serde_json::json!({
                "schema": 1,
                "command": name,
                "p": config.p,
                "ok": outcome.ok,
                "result": outcome.json,
            });
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
        }
        Format::Text => {
            println!("{name} (p = {})", config.p);
            for line in &outcome.text {
                println!("  {line}");
            }
            println!("{}", if outcome.ok { "ok" } else { "FAILED" });
        }
    }
}
