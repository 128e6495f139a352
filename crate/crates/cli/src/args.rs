use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Sparse linear SVMs by DC programming.
#[derive(Debug, Parser)]
#[command(name = "sparse-dca", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train once and report sparsity, accuracy and objective.
    Train(TrainArgs),
    /// Pick λ and penalty parameters by k-fold cross-validation.
    Cv(CvArgs),
    /// Run every scheme/penalty pair from random starts and tabulate.
    Compare(CompareArgs),
    /// Solve the ℓ0 problem exactly and compare with a DCA run.
    Oracle(OracleArgs),
    /// Write the per-iteration trace of one run as CSV.
    Report(TrainArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Training data, LIBSVM text or CSV with a header (by extension).
    #[arg(long)]
    pub data: PathBuf,
    /// Held-out data scored with the trained model.
    #[arg(long)]
    pub test: Option<PathBuf>,
    /// Label column of CSV inputs.
    #[arg(long, default_value = "label")]
    pub label_col: String,
    /// Z-score features with training statistics.
    #[arg(long)]
    pub standardize: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Relative tolerance of the stopping rule.
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
    #[arg(long, default_value_t = 500)]
    pub max_iter: usize,
    /// Number of starting points; extra starts are random.
    #[arg(long, default_value_t = 1)]
    pub starts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Also write the output to this file (atomically).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Penalty, e.g. `cap:theta=5` or `scad:theta=2,a=3.7`.
    #[arg(long, default_value = "cap:theta=5")]
    pub penalty: String,
    #[arg(long, default_value = "dca1")]
    pub scheme: String,
    #[arg(long, default_value_t = 0.1)]
    pub lambda: f64,
    /// Capped-ℓ1 with a growing θ instead of the fixed penalty.
    #[arg(long)]
    pub update_theta: bool,
    /// θ increment of --update-theta.
    #[arg(long, default_value_t = 1.0)]
    pub dtheta: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CvArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Penalty family swept over the grids (`cap`, `scad`, `exp`, ...).
    #[arg(long, default_value = "cap")]
    pub penalty: String,
    #[arg(long, default_value = "dca1")]
    pub scheme: String,
    #[arg(long, value_delimiter = ',', default_value = "0.1")]
    pub grid_lambda: Vec<f64>,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0.001,0.005,0.01,0.1,0.5,1,2,3,5,10,20,50,100,500"
    )]
    pub grid_theta: Vec<f64>,
    /// Second parameter of SCAD and PiL; values not above 1 are skipped.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,5,10,20,30,50,100")]
    pub grid_a: Vec<f64>,
    #[arg(long)]
    pub update_theta: bool,
    #[arg(long, default_value_t = 1.0)]
    pub dtheta: f64,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Penalties to compare; repeat the flag for several.
    #[arg(long, required = true)]
    pub penalty: Vec<String>,
    /// Schemes to compare, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "dca1,dca2,dca3,dca4")]
    pub scheme: Vec<String>,
    #[arg(long, default_value_t = 0.1)]
    pub lambda: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub run: TrainArgs,
    /// Box |xᵢ| ≤ M of the exact search.
    #[arg(long, default_value_t = 1e3)]
    pub m_box: f64,
}
