use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;

#[derive(Debug, Parser)]
#[command(
    name = "sixvertex",
    version,
    about = "Six-vertex model with domain wall boundary conditions: exact Hankel determinants, \
             bulk free energies and their cross-checks"
)]
pub struct Cli {
    /// TOML file using the flag names as keys. Flags given on the command
    /// line take precedence over the file.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// τ_N/c_N, Z_N and log Z_N / N² over a range of N
    Exact(Args),
    /// Named cross-checks with residual and tolerance; exit status 1 if any fails
    Check {
        #[arg(value_enum)]
        check: CheckKind,
        #[command(flatten)]
        args: Args,
    },
    /// Bulk free energy and saddle-point endpoints over a parameter grid
    Bulk(Args),
    /// Saddle-point eigenvalue density sampled on a grid
    Density(Args),
    /// Finite-size corrections: θ₄-modulated ratios (AF) or a power fit (D)
    Fit(Args),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    /// Bilinear Toda identity for each N
    Toda,
    /// Determinant against brute-force enumeration (N ≤ 6)
    Oracle,
    /// Theta/elliptic identity suite
    Identities,
    /// Moments of the disordered-phase weight against φ derivatives
    Laplace,
    /// Endpoint and closed forms of ∂f/∂ζ
    Dfdzeta,
    /// AF chemical-potential relation for the endpoints
    Chemb,
    /// Toda equation for the bulk free energy (AF: modulated Ansatz)
    Ode,
    /// Lattice sum against the determinant (FE and AF)
    Discrete,
}

impl CheckKind {
    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Toda => "toda",
            CheckKind::Oracle => "oracle",
            CheckKind::Identities => "identities",
            CheckKind::Laplace => "laplace",
            CheckKind::Dfdzeta => "dfdzeta",
            CheckKind::Chemb => "chemb",
            CheckKind::Ode => "ode",
            CheckKind::Discrete => "discrete",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Options shared by every command. Decimal parameters stay strings until
/// they are parsed at the requested precision.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Args {
    /// fe, d or af
    #[arg(long)]
    pub phase: Option<String>,
    /// Spectral parameter: a value, `pi/3`, or a grid `lo..hi..step`
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
    /// Crossing parameter γ (a value or a grid)
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<String>,
    /// ζ = t/γ, alternative to --t in the D and AF phases
    #[arg(long, allow_hyphen_values = true)]
    pub zeta: Option<String>,
    /// Lattice size `N` or inclusive range `lo..hi`
    #[arg(long)]
    pub n: Option<String>,
    /// Binary precision (default: $SIXVERTEX_BITS, else 256)
    #[arg(long)]
    pub bits: Option<u32>,
    /// Number of density samples
    #[arg(long)]
    pub grid: Option<usize>,
    /// Lattice cutoff for `check discrete` (default: chosen from a tail bound)
    #[arg(long)]
    pub cutoff: Option<i64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the table here instead of stdout
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Worker threads (default: one per core)
    #[arg(long)]
    pub jobs: Option<usize>,
}
