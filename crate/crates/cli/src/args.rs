use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Measure learner stability and preferential bias.
#[derive(Debug, Parser)]
#[command(name = "stabilimeter", version, propagate_version = true)]
pub struct Cli {
    /// Flat TOML file of flag values; flags on the command line take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the agreement of two concepts.
    #[command(args_override_self = true)]
    Agreement(AgreementArgs),
    /// Estimate accuracy and stability by repeated half-splits of a dataset.
    #[command(args_override_self = true)]
    Stability(StabilityArgs),
    /// Sweep mixture weights to measure a learner's bias toward F1 over F2.
    #[command(args_override_self = true)]
    BiasStrength(BiasArgs),
    /// Flag drift between concepts learned from consecutive batches.
    #[command(args_override_self = true)]
    Drift(DriftArgs),
    /// Generate scenario data.
    #[command(subcommand)]
    Demo(DemoCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistKind {
    /// Uniform over every attribute vector of the schema.
    Uniform,
    /// Resample the attribute vectors of the --data input (the first batch for drift).
    Empirical,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Master seed.
    #[arg(long, env = "STABILIMETER_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of standard output.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Run single-threaded; results are identical either way.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Args)]
pub struct SpaceArgs {
    /// Schema sidecar file (`name:level1,level2,...` per line, optional `class:...` line).
    #[arg(long, value_name = "PATH")]
    pub schema: Option<PathBuf>,
    /// Boolean attribute count when neither --data nor --schema fixes the schema.
    #[arg(long, value_name = "S")]
    pub attributes: Option<usize>,
    /// Attribute distribution used for agreement sampling.
    #[arg(long, value_enum, default_value_t = DistKind::Uniform)]
    pub dist: DistKind,
}

#[derive(Debug, Args)]
pub struct LearnerArgs {
    /// tree, knn, majority, constant, chooser (bias-strength only) or memorizing:<base>.
    #[arg(long, default_value = "tree", value_name = "NAME")]
    pub learner: String,
    /// Tree: minimum gain ratio for a split.
    #[arg(long, default_value_t = 0.0, value_name = "R")]
    pub min_gain_ratio: f64,
    /// Tree: maximum depth (unlimited when absent).
    #[arg(long, value_name = "D")]
    pub max_depth: Option<usize>,
    /// Tree: nodes with fewer examples become leaves.
    #[arg(long, default_value_t = 1, value_name = "N")]
    pub min_leaf: usize,
    /// kNN: neighbour count.
    #[arg(long, default_value_t = 1, value_name = "K")]
    pub k: usize,
    /// Memorizing: accuracy gain needed to replace the previous concept.
    #[arg(long, default_value_t = 0.0, value_name = "E")]
    pub epsilon: f64,
    /// Constant: class index output by the constant learner.
    #[arg(long, default_value_t = 0, value_name = "C")]
    pub constant_class: usize,
}

#[derive(Debug, Args)]
pub struct AgreementArgs {
    /// First concept: a file path, or an inline formula such as "(var 0)".
    #[arg(value_name = "F1")]
    pub f1: String,
    /// Second concept.
    #[arg(value_name = "F2")]
    pub f2: String,
    /// Dataset fixing the schema (and the empirical distribution).
    #[arg(long, value_name = "PATH")]
    pub data: Option<PathBuf>,
    /// Number of sampled attribute vectors.
    #[arg(long, default_value_t = stabilimeter::stability::DEFAULT_N)]
    pub n: u64,
    /// Fail unless the exact agreement can be enumerated (at most 2^24 vectors).
    #[arg(long)]
    pub exact: bool,
    #[command(flatten)]
    pub space: SpaceArgs,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    /// Dataset CSV (attribute columns then `class`).
    #[arg(long, value_name = "PATH")]
    pub data: PathBuf,
    /// Number of random half-splits.
    #[arg(long, default_value_t = stabilimeter::stability::DEFAULT_M)]
    pub m: usize,
    /// Agreement samples per split.
    #[arg(long, default_value_t = stabilimeter::stability::DEFAULT_N)]
    pub n: u64,
    /// Record learner failures and drop the iteration instead of aborting.
    #[arg(long)]
    pub skip_failures: bool,
    #[command(flatten)]
    pub space: SpaceArgs,
    #[command(flatten)]
    pub learner: LearnerArgs,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct BiasArgs {
    /// Concept the bias is measured toward: a file path or inline formula.
    #[arg(value_name = "F1")]
    pub f1: String,
    /// Competing concept.
    #[arg(value_name = "F2")]
    pub f2: String,
    /// Dataset fixing the schema (and the empirical distribution).
    #[arg(long, value_name = "PATH")]
    pub data: Option<PathBuf>,
    /// Grid spacing of the mixture weight p, in (0, 0.1].
    #[arg(long, default_value_t = stabilimeter::bias::DEFAULT_GRID_STEP, value_name = "R")]
    pub p_step: f64,
    /// Training sets per grid point.
    #[arg(long, default_value_t = stabilimeter::bias::DEFAULT_TRIALS, value_name = "T")]
    pub trials: usize,
    /// Size of each training set.
    #[arg(long, default_value_t = stabilimeter::bias::DEFAULT_TRAIN_SIZE, value_name = "N")]
    pub train_size: usize,
    /// Agreement samples per trained concept.
    #[arg(long, default_value_t = stabilimeter::stability::DEFAULT_N)]
    pub n: u64,
    /// Attach p to F1's labels instead of F2's.
    #[arg(long)]
    pub swap_roles: bool,
    #[command(flatten)]
    pub space: SpaceArgs,
    #[command(flatten)]
    pub learner: LearnerArgs,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct DriftArgs {
    /// Directory of batch CSV files, taken in file-name order.
    #[arg(long, value_name = "DIR")]
    pub data: PathBuf,
    /// Agreement samples per consecutive pair.
    #[arg(long, default_value_t = stabilimeter::stability::DEFAULT_N)]
    pub n: u64,
    /// Alarm when consecutive agreement falls below this value.
    #[arg(long, default_value_t = 0.5, value_name = "R")]
    pub threshold: f64,
    #[command(flatten)]
    pub space: SpaceArgs,
    #[command(flatten)]
    pub learner: LearnerArgs,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Subcommand)]
pub enum DemoCommand {
    /// Sample the correlated-attribute scenario to a CSV dataset.
    #[command(args_override_self = true)]
    Correlated(CorrelatedArgs),
    /// Write a batch sequence whose target is negated at --drift-at.
    #[command(args_override_self = true)]
    Drift(DemoDriftArgs),
}

#[derive(Debug, Args)]
pub struct CorrelatedArgs {
    /// Attribute count.
    #[arg(long, default_value_t = stabilimeter::scenarios::DEFAULT_CORRELATED_S)]
    pub s: usize,
    /// Probability that the copy attribute differs from the class attribute.
    #[arg(long, default_value_t = stabilimeter::scenarios::DEFAULT_NOISE_RATE, value_name = "R")]
    pub noise_rate: f64,
    /// Number of examples.
    #[arg(long, default_value_t = 30, value_name = "N")]
    pub train_size: usize,
    /// Master seed.
    #[arg(long, env = "STABILIMETER_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Output CSV (standard output when absent).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DemoDriftArgs {
    /// Boolean attribute count; the target is the first attribute.
    #[arg(long, default_value_t = 6)]
    pub s: usize,
    #[arg(long, default_value_t = 10, value_name = "N")]
    pub batch_count: usize,
    #[arg(long, default_value_t = 500, value_name = "N")]
    pub batch_size: usize,
    /// Index of the first batch labeled by the negated target.
    #[arg(long, default_value_t = 5, value_name = "K")]
    pub drift_at: usize,
    /// Label noise rate.
    #[arg(long, default_value_t = 0.0, value_name = "R")]
    pub flip_rate: f64,
    /// Keep the target unchanged throughout.
    #[arg(long)]
    pub no_drift: bool,
    /// Master seed.
    #[arg(long, env = "STABILIMETER_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Output directory for batch_NNN.csv files.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}
