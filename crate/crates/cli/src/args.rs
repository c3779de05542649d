use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use stark_core::ParabolicState;

#[derive(Debug, Parser)]
#[command(name = "stark", version, about = "Stark effect of hydrogen: perturbative closed forms and Siegert-state numerics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Perturbative energy of one state
    Energy(EnergyArgs),
    /// Table of the substates of one shell
    States(StatesArgs),
    /// Exact Laguerre overlap integral
    Zint(ZintArgs),
    /// Normalized |u_{k,m}|² samples for plotting
    BasisPlot(BasisPlotArgs),
    /// Numerical Siegert-state energy of one state
    Numeric(NumericArgs),
    /// Perturbative and numerical energies across a field grid
    Scan(ScanArgs),
    /// Relative deviation between perturbative and numerical energies
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Option<Self> {
        <Self as ValueEnum>::from_str(s, true).ok()
    }
}

/// `n1,n2,m` with `m` of either sign.
pub fn parse_state(s: &str) -> Result<ParabolicState, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [n1, n2, m] = parts.as_slice() else {
        return Err(format!("expected n1,n2,m, got {s:?}"));
    };
    let num = |p: &str| p.parse::<i64>().map_err(|e| format!("{p:?}: {e}"));
    ParabolicState::from_signed(num(n1)?, num(n2)?, num(m)?).map_err(|e| e.to_string())
}

fn parse_order(s: &str) -> Result<u8, String> {
    match s {
        "0" | "1" | "2" => Ok(s.parse().unwrap()),
        _ => Err(format!("order must be 0, 1 or 2, got {s:?}")),
    }
}

#[derive(Debug, Args)]
pub struct EnergyArgs {
    #[arg(long, value_parser = parse_state, allow_hyphen_values = true)]
    pub state: ParabolicState,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub field: f64,
    #[arg(long, value_parser = parse_order, default_value = "2")]
    pub order: u8,
}

#[derive(Debug, Args)]
pub struct StatesArgs {
    /// Principal quantum number
    #[arg(short, long)]
    pub n: u32,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ZintArgs {
    #[arg(short = 'a', long)]
    pub alpha: u32,
    #[arg(short = 'k', long)]
    pub k: u32,
    #[arg(short = 'K', long = "kprime")]
    pub kprime: u32,
    #[arg(short = 'm', long)]
    pub m: u32,
    /// Compare with the quadrature oracle
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Args)]
pub struct BasisPlotArgs {
    #[arg(short = 'k', long)]
    pub k: u32,
    #[arg(short = 'm', long)]
    pub m: u32,
    #[arg(long, default_value_t = 20.0)]
    pub x_max: f64,
    #[arg(long, default_value_t = 401)]
    pub points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Solver knobs shared by the numerical subcommands.
#[derive(Debug, Default, Args)]
pub struct SolverArgs {
    /// Mismatch tolerance for convergence
    #[arg(long)]
    pub tol: Option<f64>,
    /// Coarsest grid step per unit principal quantum number
    #[arg(long)]
    pub h_per_n: Option<f64>,
    /// Number of grid halvings fed to the extrapolation
    #[arg(long)]
    pub refinements: Option<u32>,
}

#[derive(Debug, Args)]
pub struct NumericArgs {
    #[arg(long, value_parser = parse_state, allow_hyphen_values = true)]
    pub state: ParabolicState,
    #[arg(long, allow_hyphen_values = true)]
    pub field: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// Field grid and output flags; every one may also come from `--config`.
#[derive(Debug, Default, Args)]
pub struct RunArgs {
    #[arg(long, value_parser = parse_state, allow_hyphen_values = true)]
    pub state: Option<ParabolicState>,
    #[arg(long)]
    pub fmin: Option<f64>,
    #[arg(long)]
    pub fmax: Option<f64>,
    /// Number of intervals; the grid has steps + 1 points
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, value_parser = parse_order)]
    pub order: Option<u8>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// key=value file; command-line flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Scan every substate of this shell instead of a single --state
    #[arg(short, long, conflicts_with = "state")]
    pub n: Option<u32>,
    /// Skip the numerical solver
    #[arg(long)]
    pub perturbative_only: bool,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Exit with status 3 if any point fails to converge
    #[arg(long)]
    pub strict: bool,
    #[command(flatten)]
    pub run: RunArgs,
}
