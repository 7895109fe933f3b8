use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spinent::{Family, Grid, Lattice};

#[derive(Parser, Debug)]
#[command(name = "spinent", version, about = "Local entanglement of quantum spin lattices by exact diagonalization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Ground-state observables over a parameter grid, one row per (size, point).
    Sweep(SweepArgs),
    /// Lowest levels of one Hamiltonian, grouped into degenerate multiplets.
    Spectrum(SpectrumArgs),
    /// Bethe-ansatz ground state of the spin-1/2 XXZ ring.
    Bethe(BetheArgs),
    /// Finite-size scaling of the minimum of dE_v/d(param).
    Scaling(ScalingArgs),
    /// Run the acceptance criteria and print one line per criterion.
    Check(CheckArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelArg {
    XxzHalf,
    XxzOne,
    Blbq,
}

impl ModelArg {
    pub fn family(self) -> Family {
        match self {
            ModelArg::XxzHalf => Family::XxzHalf,
            ModelArg::XxzOne => Family::XxzOne,
            ModelArg::Blbq => Family::Blbq,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeometryArg {
    Chain,
    Square,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormatArg {
    Csv,
    Json,
}

/// A lattice extent: `N` (chain length or `N x N` square) or `LxW`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Extent {
    pub a: usize,
    pub b: Option<usize>,
}

impl std::str::FromStr for Extent {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("invalid size {s:?}"));
        match s.split_once(['x', 'X']) {
            Some((a, b)) => Ok(Extent { a: num(a)?, b: Some(num(b)?) }),
            None => Ok(Extent { a: num(s)?, b: None }),
        }
    }
}

impl Extent {
    pub fn lattice(self, geometry: GeometryArg) -> Result<Lattice, String> {
        match (geometry, self.b) {
            (GeometryArg::Chain, None) => Lattice::chain(self.a).map_err(|e| e.to_string()),
            (GeometryArg::Chain, Some(_)) => Err("a chain takes a single length".into()),
            (GeometryArg::Square, b) => Lattice::square(self.a, b.unwrap_or(self.a)).map_err(|e| e.to_string()),
        }
    }
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    s.parse::<Grid>().map_err(|e| e.to_string())
}

fn parse_criteria(s: &str) -> Result<u8, String> {
    match s.trim().parse::<u8>() {
        Ok(id) if (1..=10).contains(&id) => Ok(id),
        _ => Err(format!("criterion ids run from 1 to 10, got {s:?}")),
    }
}

#[derive(Args, Debug, Clone)]
pub struct SolverArgs {
    /// Lanczos residual tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Energy window for counting degenerate ground states.
    #[arg(long = "tol-deg", default_value_t = 1e-8)]
    pub tol_deg: f64,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Leave the wall-clock line out of the metadata header.
    #[arg(long = "no-wall-clock")]
    pub no_wall_clock: bool,
}

#[derive(Args, Debug, Clone)]
pub struct JobsArg {
    /// Parallel sweep workers.
    #[arg(long, env = "SPINENT_JOBS")]
    pub jobs: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    #[arg(long, value_enum, default_value = "chain")]
    pub geometry: GeometryArg,
    /// Comma-separated sizes, e.g. `12,16` or `4x4`.
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<Extent>,
    /// Grid `start:end:count` over delta (XXZ) or theta (blbq), endpoints included.
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    pub param: Grid,
    /// Biquadratic coefficient of the spin-1 XXZ model.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub beta: f64,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub jobs: JobsArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct SpectrumArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    #[arg(long, value_enum, default_value = "chain")]
    pub geometry: GeometryArg,
    #[arg(long)]
    pub size: Extent,
    /// Anisotropy of the XXZ models.
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    /// Mixing angle of the blbq model.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub beta: f64,
    /// Number of levels, counted over all Sz sectors.
    #[arg(long, default_value_t = 12)]
    pub levels: usize,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct BetheArgs {
    /// Even ring length.
    #[arg(long)]
    pub size: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: f64,
    /// Step of the finite differences behind the correlators.
    #[arg(long = "hf-step", default_value_t = 1e-4)]
    pub hf_step: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct ScalingArgs {
    #[arg(long, value_enum, default_value = "xxz-one")]
    pub model: ModelArg,
    #[arg(long, value_delimiter = ',', default_value = "8,10,12")]
    pub sizes: Vec<usize>,
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true, default_value = "0.5:2.5:41")]
    pub param: Grid,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub beta: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub jobs: JobsArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct CheckArgs {
    /// Comma-separated criterion ids; all when omitted.
    #[arg(long, value_delimiter = ',', value_parser = parse_criteria)]
    pub criteria: Vec<u8>,
    #[command(flatten)]
    pub jobs: JobsArg,
    /// Also write the outcomes as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
