//! `sobolev`: sharp constants, extremizers and cross-checks from the shell.
//!
//! Exit codes: 0 success, 2 input error, 3 solver error, 4 verification
//! disagreement.

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sobolev_core::numcore::Mode;
use sobolev_core::solver::SolveError;

use commands::{Document, SweepParam, SweepRange};
use config::{Command, Format, Overrides};

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Solver(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Solver(_) => 3,
        }
    }

    /// Weight and order problems are the caller's fault; the rest are the solver's.
    fn from_solve(e: SolveError) -> Self {
        match e {
            SolveError::InvalidOrder(_) | SolveError::Weight(_) | SolveError::ZeroWeight => {
                CliError::Input(e.to_string())
            }
            other => CliError::Solver(other.to_string()),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Solver(m) => write!(f, "solver error: {m}"),
        }
    }
}

#[derive(Parser)]
#[command(name = "sobolev", version, about = "Sharp constants for ∫|u|ρ ≤ Λ‖u⁽ᵏ⁾‖₂ on H₀ᵏ(0,1)")]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Print μ = Λ⁻² and Λ as JSON.
    Constant(CommonArgs),
    /// Sample the normalized extremizer u and u⁽ᵏ⁾ as CSV.
    Minimizer(CommonArgs),
    /// Cross-check the pipeline against the independent oracles.
    Verify(CommonArgs),
    /// Tabulate μ over a one-parameter weight family.
    Sweep(SweepArgs),
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: sobolev_core::numcore::NumError| e.to_string())
}

#[derive(Args, Clone)]
struct CommonArgs {
    #[arg(long)]
    k: Option<usize>,
    /// Weight, e.g. `poly:1+x`, `chi:0,1/2`, `dirac:1/3`, `pow:1/2`, `hardy:1`.
    #[arg(long, allow_hyphen_values = true)]
    weight: Option<String>,
    #[arg(long, value_parser = parse_mode)]
    mode: Option<Mode>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    galerkin_degree: Option<usize>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = |s: &str| s.parse::<Format>())]
    format: Option<Format>,
}

impl CommonArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            k: self.k,
            weight: self.weight.clone(),
            mode: self.mode,
            samples: self.samples,
            galerkin_degree: self.galerkin_degree,
            grid: self.grid,
            format: self.format,
            out: self.out.clone(),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ParamArg {
    Dirac,
    ChiCenter,
    ChiHalfwidth,
    Pow,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Swept quantity: Dirac location, indicator center or half-width, or power exponent.
    #[arg(long, value_enum)]
    param: ParamArg,
    #[arg(long, allow_hyphen_values = true)]
    from: String,
    #[arg(long, allow_hyphen_values = true)]
    to: String,
    #[arg(long, allow_hyphen_values = true)]
    step: String,
    /// Indicator center for `chi-halfwidth` sweeps (default 1/2).
    #[arg(long)]
    center: Option<String>,
    /// Indicator half-width for `chi-center` sweeps.
    #[arg(long)]
    halfwidth: Option<String>,
}

fn run(cli: Cli) -> Result<(commands::Outcome, Option<PathBuf>), CliError> {
    let file = config::load_env_config()?;
    let (command, common) = match &cli.command {
        CliCommand::Constant(a) => (Command::Constant, a),
        CliCommand::Minimizer(a) => (Command::Minimizer, a),
        CliCommand::Verify(a) => (Command::Verify, a),
        CliCommand::Sweep(s) => (Command::Sweep, &s.common),
    };
    let cfg = common.overrides().over(file).resolve(command)?;
    let outcome = match (&cli.command, command) {
        (_, Command::Constant) => commands::constant(&cfg)?,
        (_, Command::Minimizer) => commands::minimizer(&cfg)?,
        (_, Command::Verify) => commands::verify(&cfg)?,
        (CliCommand::Sweep(s), Command::Sweep) => {
            let param = match s.param {
                ParamArg::Dirac => SweepParam::Dirac,
                ParamArg::ChiCenter => SweepParam::ChiCenter,
                ParamArg::ChiHalfwidth => SweepParam::ChiHalfwidth,
                ParamArg::Pow => SweepParam::Pow,
            };
            let range = SweepRange {
                param,
                from: s.from.clone(),
                to: s.to.clone(),
                step: s.step.clone(),
                center: s.center.clone(),
                halfwidth: s.halfwidth.clone(),
            };
            commands::sweep(&cfg, &range)?
        }
        _ => unreachable!("command kinds match"),
    };
    Ok((outcome, cfg.out_path))
}

fn render(document: &Document) -> String {
    match document {
        Document::Json(v) => {
            let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
            s.push('\n');
            s
        }
        Document::Csv(s) => s.clone(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((outcome, out_path)) => {
            let text = render(&outcome.document);
            let written = match out_path {
                Some(path) => std::fs::write(&path, text)
                    .map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(outcome.exit_code)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
