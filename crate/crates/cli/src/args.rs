use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "corred", version, about = "Reduced density operators of bipartite quantum systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an experiment over a time grid and write one row per time point.
    Run(RunArgs),
    /// Reduce a density-matrix file and print the result as JSON.
    Reduce(ReduceArgs),
    /// Build a product-ensemble decomposition and verify it against its target state.
    Decompose(DecomposeArgs),
    /// Check a config, ensemble, model-parameter or density-matrix file.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodKind {
    Neumann,
    Projective,
    Conditioned,
    Correlated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Alpha,
    Beta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    #[value(name = "gauss_seidel", alias = "gauss-seidel")]
    GaussSeidel,
    Jacobi,
}

/// Reduction flags shared by `run` and `reduce`; set flags override the config.
#[derive(Debug, Clone, Default, Args)]
pub struct MethodArgs {
    #[arg(long, value_enum)]
    pub method: Option<MethodKind>,
    /// Basis level of β for the projective reduction (0 = highest energy).
    #[arg(long)]
    pub level: Option<usize>,
    /// State file of the conditioning subsystem for the conditioned reduction.
    #[arg(long)]
    pub given: Option<PathBuf>,
    /// Which subsystem `--given` describes.
    #[arg(long, value_enum)]
    pub given_side: Option<SideArg>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// `neumann`, `minimum_information` or `file:<path>`.
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[command(flatten)]
    pub method: MethodArgs,
    /// Sample `steps + 1` grid endpoints instead of `steps` cell midpoints.
    #[arg(long)]
    pub include_ties: bool,
    /// Output path; overrides the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    /// Density-matrix JSON file.
    pub state: PathBuf,
    /// Subsystem dimensions `NA,NB`; defaults to two equal factors.
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    #[command(flatten)]
    pub method: MethodArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DecompositionKind {
    Epr,
    Triplet,
    #[value(name = "spin_pair_initial", alias = "spin-pair-initial")]
    SpinPairInitial,
    #[value(name = "spin_pair_t", alias = "spin-pair-t")]
    SpinPairT,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[arg(value_enum)]
    pub kind: DecompositionKind,
    /// Hidden phase of the four-term decompositions.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta: f64,
    /// Mixing angle of the spin-pair initial state.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi: f64,
    /// Evolution time for `spin_pair_t`.
    #[arg(long, default_value_t = 0.0)]
    pub t: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub j_coupling: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub c_coupling: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub d_coupling: f64,
    /// Maximum elementwise error accepted by the verification.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Exit 0 even when verification fails.
    #[arg(long)]
    pub report_only: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ValidationArg {
    Strict,
    Relaxed,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    pub path: PathBuf,
    /// Validation level for density matrices; defaults to the level stored in the file.
    #[arg(long, value_enum)]
    pub validation: Option<ValidationArg>,
}
