use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "asymspec", version, about = "Asymptotic eigenvalue distributions of smooth matrix sequences")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep D0, D1 and the densities over λ.
    Dos(DosArgs),
    /// Approximate eigenvalues of the Laguerre and Jacobi matrices.
    Roots(RootsArgs),
    /// Sweep the asymptotic expectation value of an observable over λ.
    Expect(ExpectArgs),
    /// Leading and first-order trace of f(H).
    Trace(TraceArgs),
    /// Exact coherent-state symbol against its 1/j expansion.
    Symbol(SymbolArgs),
    /// Run the oracle consistency battery for a model.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// toeplitz, alternating, lipkin-even, lipkin-odd, uniaxial, collective, laguerre, jacobi or custom.
    #[arg(long)]
    pub model: String,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub hx: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub hy: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub hz: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub gx: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub gy: Option<f64>,
    /// Leading diagonal profile of a custom model, as an expression in x.
    #[arg(long = "A0")]
    pub a0: Option<String>,
    #[arg(long = "A1")]
    pub a1: Option<String>,
    /// Leading off-diagonal profile of a custom model.
    #[arg(long = "B0")]
    pub b0: Option<String>,
    #[arg(long = "B1")]
    pub b1: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Absolute quadrature tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Run λ sweeps and root solves on one thread.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Lower end of the λ grid; the spectral minimum by default.
    #[arg(long, allow_negative_numbers = true)]
    pub lambda_min: Option<f64>,
    /// Upper end of the λ grid; the spectral maximum by default.
    #[arg(long, allow_negative_numbers = true)]
    pub lambda_max: Option<f64>,
    #[arg(long, default_value_t = 400)]
    pub lambda_points: usize,
}

#[derive(Debug, Args)]
pub struct DosArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(0..=1))]
    pub order: u8,
}

#[derive(Debug, Args)]
pub struct RootsArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Values of j, comma separated; 2j must be an integer.
    #[arg(long, value_delimiter = ',', default_value = "250")]
    pub j: Vec<f64>,
    /// Add oracle roots and error columns, and fail when the linear-order errors exceed the limits.
    #[arg(long)]
    pub verify: bool,
    /// Largest acceptable relative error of the linear-order roots, in percent.
    #[arg(long, default_value_t = 0.4)]
    pub max_error_pct: f64,
    /// Largest acceptable mean relative error of the linear-order roots, in percent.
    #[arg(long, default_value_t = 0.02)]
    pub mean_error_pct: f64,
}

#[derive(Debug, Args)]
pub struct ExpectArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Leading diagonal profile of the observable.
    #[arg(long = "Q-A0", default_value = "x")]
    pub q_a0: String,
    /// Leading off-diagonal profile of the observable.
    #[arg(long = "Q-B0", default_value = "0")]
    pub q_b0: String,
    /// Add one column per support interval.
    #[arg(long)]
    pub branches: bool,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// The function f, as an expression in x.
    #[arg(long)]
    pub f: String,
    /// Compare with a Richardson fit of exact finite traces.
    #[arg(long)]
    pub verify: bool,
    #[arg(long, value_delimiter = ',', default_value = "100,200,400")]
    pub j: Vec<f64>,
    /// Largest acceptable |Richardson - T1| relative to max(1, |T1|).
    #[arg(long, default_value_t = 0.05)]
    pub max_residual: f64,
}

#[derive(Debug, Args)]
pub struct SymbolArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, value_delimiter = ',', default_value = "64,128,256")]
    pub j: Vec<f64>,
    /// Number of interior x samples.
    #[arg(long, default_value_t = 9)]
    pub x_points: usize,
    /// Number of θ samples on [0, π].
    #[arg(long, default_value_t = 5)]
    pub theta_points: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, value_delimiter = ',', default_value = "100,200")]
    pub j: Vec<f64>,
}
