use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Generalized trigonometric and elliptic functions and the spectra of
/// p-Laplacian eigenvalue problems.
///
/// Set GELLIPTIC_TOL to override the default quadrature tolerance (1e-12).
#[derive(Debug, Parser)]
#[command(name = "gelliptic", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print π_pq or K_pq(k) to 15 significant digits.
    Const(ConstArgs),
    /// Tabulate sin, cos, sn, cn, dn or am on a uniform grid.
    Eval(EvalArgs),
    /// Sample a closed-form eigenfunction on [0, T].
    Eigen(EigenArgs),
    /// Classify every solution of the perturbed problem at a given lambda (JSON).
    Spectrum(SpectrumArgs),
    /// Run the built-in invariant suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConstName {
    /// π_pq, the half period of sin_pq
    #[value(name = "pi")]
    Pi,
    /// K_pq(k), the quarter period of sn_pq
    #[value(name = "K", alias = "k")]
    K,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct ConstArgs {
    #[arg(value_enum)]
    pub name: ConstName,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub q: f64,
    #[arg(long)]
    pub k: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FunctionName {
    Sin,
    Cos,
    Sn,
    Cn,
    Dn,
    Am,
}

impl FunctionName {
    pub fn name(self) -> &'static str {
        match self {
            Self::Sin => "sin",
            Self::Cos => "cos",
            Self::Sn => "sn",
            Self::Cn => "cn",
            Self::Dn => "dn",
            Self::Am => "am",
        }
    }

    pub fn is_elliptic(self) -> bool {
        !matches!(self, Self::Sin | Self::Cos)
    }
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct EvalArgs {
    #[arg(long = "fn", value_enum)]
    pub function: FunctionName,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub q: f64,
    /// Modulus; required for sn, cn, dn and am.
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub from: f64,
    #[arg(long)]
    pub to: f64,
    #[arg(long, default_value_t = 101)]
    pub samples: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Problem {
    /// (φ_p(u'))' + λ φ_q(u) = 0
    #[value(name = "E")]
    E,
    /// (φ_p(u'))' + λ φ_q(u)(1 - |u|^q) = 0
    #[value(name = "PE")]
    Pe,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct EigenArgs {
    #[arg(long, value_enum)]
    pub problem: Problem,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub q: f64,
    /// Interval length.
    #[arg(long = "T")]
    pub length: f64,
    /// Mode number (n - 1 interior zeros).
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Amplitude, for --problem E.
    #[arg(long = "R")]
    pub amplitude: Option<f64>,
    /// Modulus, for interior solutions of --problem PE.
    #[arg(long)]
    pub k: Option<f64>,
    /// Comma-separated pauses τ_1,…,τ_n of a flat-core solution of --problem PE.
    #[arg(long, value_delimiter = ',')]
    pub tau: Option<Vec<f64>>,
    #[arg(long, default_value_t = 201)]
    pub samples: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub q: f64,
    #[arg(long = "T")]
    pub length: f64,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, default_value_t = 10)]
    pub nmax: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Seed for the randomized sample points.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Run a single group.
    #[arg(long)]
    pub only: Option<String>,
}
