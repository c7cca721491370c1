use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wtv1d::Method;

#[derive(Debug, Parser)]
#[command(name = "wtv1d", version, about = "Weighted total variation denoising in one dimension")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Grid on (A, B) with N cells; overrides the grid inferred from input files.
    #[arg(long, global = true, num_args = 3, value_names = ["A", "B", "N"], allow_negative_numbers = true)]
    pub grid: Option<Vec<f64>>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Output formats.
    #[arg(long, global = true, value_delimiter = ',', default_value = "csv,json")]
    pub format: Vec<Format>,
    /// Relative duality gap at which solvers stop.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long = "max-iters", global = true, default_value_t = 100_000)]
    pub max_iters: usize,
    /// Worker threads for sweeps and corpus runs.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value = "taut-string")]
    pub method: Method,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    /// Weight in the regularizer.
    Wtv,
    /// Weight in the data term.
    Wfid,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one denoising problem.
    Solve(SolveArgs),
    /// Check the optimality certificate of a candidate solution.
    Verify(VerifyArgs),
    /// Run structural property suites.
    Properties(PropertiesArgs),
    /// Sweep the parameters of the affine-data, absolute-value-weight family.
    Sweep(SweepArgs),
    /// Recover piecewise-constant data from noisy samples.
    RecoverPc(RecoverArgs),
    /// Evaluate the closed-form solution for affine data and an absolute-value weight.
    Analytic(AnalyticArgs),
}

#[derive(Debug, Args)]
pub struct WeightArgs {
    /// Regularization weight: JSON spec, shorthand (scalar:V, abs:MU:C[:X0]), JSON file or CSV of cell values.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// Fidelity weight, same forms as --alpha.
    #[arg(long, allow_hyphen_values = true)]
    pub w: Option<String>,
    /// Absolute lower bound on the fidelity weight.
    #[arg(long)]
    pub floor: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(value_enum)]
    pub model: ModelArg,
    /// Data CSV with columns x,value.
    #[arg(long)]
    pub f: PathBuf,
    #[command(flatten)]
    pub weight: WeightArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "wtv")]
    pub model: ModelArg,
    #[arg(long)]
    pub f: PathBuf,
    #[arg(long)]
    pub u: PathBuf,
    /// Dual candidate at the nodes; integrated from u when absent.
    #[arg(long)]
    pub v: Option<PathBuf>,
    #[command(flatten)]
    pub weight: WeightArgs,
    /// Relative certificate tolerance.
    #[arg(long, default_value_t = 1e-6)]
    pub rel: f64,
}

#[derive(Debug, Args)]
pub struct PropertiesArgs {
    /// Run the named fixture set (table1).
    #[arg(long)]
    pub fixtures: Option<String>,
    /// Grid size for fixtures and sequences.
    #[arg(long, default_value_t = 2048)]
    pub n: usize,
    /// Number of random corpus cases.
    #[arg(long)]
    pub random: Option<usize>,
    /// Compare one solve with alpha1 + alpha2 against two successive solves.
    #[arg(long)]
    pub semigroup: bool,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha1: Option<String>,
    #[arg(long)]
    pub alpha2: Option<f64>,
    /// Data for the semigroup check; 2x on (-1, 1) when absent.
    #[arg(long)]
    pub f: Option<PathBuf>,
    /// Solve along decreasing weight floors.
    #[arg(long)]
    pub vanishing: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 2.0)]
    pub lambda: f64,
    /// Half-width of the domain (-L, L).
    #[arg(long, default_value_t = 1.0)]
    pub l: f64,
    /// Values of mu: START:STOP:COUNT or a comma list.
    #[arg(long, default_value = "0.05:1:20")]
    pub mu: String,
    /// Values of c: START:STOP:COUNT or a comma list.
    #[arg(long, default_value = "0.05:1:20")]
    pub c: String,
}

#[derive(Debug, Args)]
pub struct RecoverArgs {
    #[arg(long, value_enum, default_value = "wtv")]
    pub model: ModelArg,
    /// Levels of the piecewise-constant signal, comma separated.
    #[arg(long, default_value = "-1,1", allow_hyphen_values = true)]
    pub f0: String,
    /// Break points between the levels, comma separated.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub breaks: String,
    /// Noise: zero, sin:A:K (A sin(K pi x)) or damped-sin:A:K (A exp(-|x|) sin(K pi x)).
    #[arg(long, default_value = "sin:0.3:2")]
    pub noise: String,
    /// Tent slope as a multiple of 2 max|f|.
    #[arg(long, default_value_t = 2.0)]
    pub margin: f64,
    /// Scalar weight of the baseline comparison.
    #[arg(long = "baseline-alpha", default_value_t = 0.2)]
    pub baseline_alpha: f64,
    /// Concentration levels for the weighted-fidelity path.
    #[arg(long, value_delimiter = ',', default_value = "4,8,16,32")]
    pub levels: Vec<usize>,
    #[arg(long, value_enum, default_value = "concentrating")]
    pub family: FamilyArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Concentrating,
    VanishingMass,
}

#[derive(Debug, Args)]
pub struct AnalyticArgs {
    #[arg(long)]
    pub lambda: f64,
    #[arg(long)]
    pub mu: f64,
    #[arg(long)]
    pub c: f64,
    #[arg(long, default_value_t = 1.0)]
    pub l: f64,
    /// Also solve numerically and report the distance.
    #[arg(long)]
    pub compare: bool,
}
