use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "modalcores", version, about = "Modal-set estimation and cluster cores")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate modal sets, assign every point to its nearest core.
    Fit(FitCmd),
    /// Label points with the nearest core of an existing estimates file.
    Assign(AssignCmd),
    /// Fit over a range of k and score each run against known labels.
    Sweep(SweepCmd),
    /// Generate a synthetic dataset and its true modal sets.
    Gen(GenCmd),
    /// Compare two label files and/or estimates against true modal sets.
    Eval(EvalCmd),
    /// Time the level descent at doubling sample sizes.
    Bench(BenchCmd),
    /// DBSCAN baseline.
    Dbscan(DbscanCmd),
    /// Re-run a fit from its run record.
    Replay(ReplayCmd),
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// CSV file, one point per row.
    pub data: PathBuf,
    /// First row is a header.
    #[arg(long)]
    pub header: bool,
    /// Zero-based column holding ground-truth labels; excluded from the features.
    #[arg(long)]
    pub label_column: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BetaModeArg {
    Practical,
    Theoretical,
    Custom,
}

/// Estimator flags; each one can also come from a `--config` file.
#[derive(Debug, Clone, Default, Args)]
pub struct EstimatorArgs {
    /// Neighbors per point, self included [default: max(2, round(0.5 ln^2 n))].
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, value_enum)]
    pub beta_mode: Option<BetaModeArg>,
    /// Value used with --beta-mode custom.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Confidence parameter of the theoretical slack [default: 0.05].
    #[arg(long)]
    pub delta: Option<f64>,
    /// Allowed density variation on a modal set [default: 0].
    #[arg(long)]
    pub eps0: Option<f64>,
    /// Extra lookdown for pruning spurious components [default: 0].
    #[arg(long)]
    pub eps_prune: Option<f64>,
    /// Add uniform noise in [-s, s] to every coordinate before fitting.
    #[arg(long)]
    pub jitter: Option<f64>,
    /// Seed for --jitter [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// key=value file with the same keys as the long flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitCmd {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct AssignCmd {
    #[command(flatten)]
    pub input: InputArgs,
    /// Estimates file written by `fit`.
    #[arg(long)]
    pub estimates: PathBuf,
    /// Output labels file.
    #[arg(long, default_value = "labels.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepCmd {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
    /// Comma-separated k values.
    #[arg(long, value_delimiter = ',', conflicts_with = "k_range")]
    pub ks: Vec<usize>,
    /// Inclusive range START:END:STEP.
    #[arg(long)]
    pub k_range: Option<String>,
    /// Labels file to score against instead of --label-column.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long, default_value = "sweep.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    ThreeRings,
    ThreeGaussians,
    TwoGaussians1d,
}

#[derive(Debug, Args)]
pub struct GenCmd {
    #[arg(long, value_enum)]
    pub preset: Preset,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sample count for the mixture presets [default: 1500].
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalCmd {
    /// Predicted labels file.
    #[arg(long, requires = "truth")]
    pub pred: Option<PathBuf>,
    /// Reference labels file, or a data CSV when --label-column is given.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Estimates file to match against --truth-sets.
    #[arg(long, requires_all = ["truth_sets", "data"])]
    pub estimates: Option<PathBuf>,
    /// CSV of true modal-set points with the set id in the last column.
    #[arg(long)]
    pub truth_sets: Option<PathBuf>,
    /// Dataset the estimates refer to.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// --data and --truth CSVs have a header row.
    #[arg(long)]
    pub header: bool,
    /// Label column of --data and --truth CSVs.
    #[arg(long)]
    pub label_column: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BenchCmd {
    /// Smallest sample size.
    #[arg(long, default_value_t = 50_000)]
    pub n: usize,
    /// Number of doublings after the smallest size.
    #[arg(long, default_value_t = 1)]
    pub doublings: usize,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 30)]
    pub k: usize,
    #[arg(long, default_value_t = 5)]
    pub repeats: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the table as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DbscanCmd {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, default_value_t = 5)]
    pub min_pts: usize,
    #[arg(long, default_value = "dbscan_labels.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReplayCmd {
    /// Run record written by `fit`.
    pub record: PathBuf,
    /// Dataset path, if it moved since the original run.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}
