use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "specsketch",
    version,
    about = "Leading Laplacian eigenvectors from filtered Gaussian signals"
)]
pub struct Cli {
    /// Cap on worker threads (default: one per core).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Generate a graph (and its point cloud or labels) and write it out.
    Synth(SynthArgs),
    /// Approximate the first k eigenvectors and write them as CSV.
    Embed(EmbedArgs),
    /// Estimate the cutoff lambda_k and write the probe history.
    Lambdak(LambdakArgs),
    /// k-means on the approximate (or exact) spectral embedding.
    Cluster(ClusterArgs),
    /// Dense eigendecomposition for moderate N.
    Oracle(OracleArgs),
    /// Cost sweep over N for the k = log N, k = sqrt N and fixed-N regimes.
    Bench(BenchArgs),
    /// Compare partitions and embeddings written by other commands.
    Metrics(MetricsArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Synth(_) => "synth",
            Command::Embed(_) => "embed",
            Command::Lambdak(_) => "lambdak",
            Command::Cluster(_) => "cluster",
            Command::Oracle(_) => "oracle",
            Command::Bench(_) => "bench",
            Command::Metrics(_) => "metrics",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Command::Synth(a) => a.seed,
            Command::Embed(a) => a.spectral.seed,
            Command::Lambdak(a) => a.seed,
            Command::Cluster(a) => a.spectral.seed,
            Command::Oracle(a) => a.seed,
            Command::Bench(a) => a.seed,
            Command::Metrics(_) => None,
        }
    }

    pub fn uses_seed(&self) -> bool {
        !matches!(self, Command::Metrics(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Sbm,
    /// Uniform points in the unit square, knn graph.
    Sensor,
    Swissroll,
    Cycle,
    Path,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormatArg {
    Mtx,
    Edges,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelArg {
    Binary,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LaplacianArg {
    Normalized,
    Combinatorial,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GraphArgs {
    /// Graph file: Matrix Market (.mtx) or whitespace edge list `src dst [weight]`.
    #[arg(long, conflicts_with = "synth", required_unless_present = "synth")]
    pub input: Option<PathBuf>,

    /// Input format (default: from the extension).
    #[arg(long, value_enum, requires = "input")]
    pub format: Option<FormatArg>,

    /// Generate the graph instead of reading it.
    #[arg(long, value_enum)]
    pub synth: Option<Family>,

    #[arg(long, default_value_t = 1000)]
    pub n: usize,

    /// SBM classes.
    #[arg(long, default_value_t = 10)]
    pub classes: usize,

    /// SBM ratio q/p of inter- to intra-class edge probability.
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,

    /// SBM expected degree.
    #[arg(long, default_value_t = 16.0)]
    pub avg_degree: f64,

    /// Neighbours per point for knn graphs.
    #[arg(long, default_value_t = 10)]
    pub knn: usize,

    #[arg(long, value_enum, default_value_t = KernelArg::Binary)]
    pub kernel: KernelArg,

    /// Gaussian kernel width (default: mean k-th neighbour distance).
    #[arg(long)]
    pub sigma: Option<f64>,

    /// Swiss roll angles are drawn in [a pi, b pi].
    #[arg(long, default_value_t = 1.0)]
    pub roll_a: f64,

    #[arg(long, default_value_t = 4.0)]
    pub roll_b: f64,

    /// Seed of the generator (default: --seed).
    #[arg(long)]
    pub graph_seed: Option<u64>,

    #[arg(long, value_enum, default_value_t = LaplacianArg::Normalized)]
    pub laplacian: LaplacianArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaMethod {
    Fast,
    Dichotomy,
    /// k-th eigenvalue of the dense oracle.
    Oracle,
    /// Use --lambda as given.
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMethod {
    Fast,
    Dichotomy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InterpolationArg {
    PowerLaw,
    Local,
    Bracket,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DampingArg {
    Jackson,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrthArg {
    Svd,
    Qr,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SearchArgs {
    /// Iteration cap of the fast search.
    #[arg(long, default_value_t = 10)]
    pub max_iter: usize,

    /// Relative interval tolerance of the dichotomy.
    #[arg(long, default_value_t = 0.1)]
    pub dichotomy_eps: f64,

    #[arg(long, value_enum, default_value_t = InterpolationArg::PowerLaw)]
    pub interpolation: InterpolationArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpectralArgs {
    /// Number of eigenvectors.
    #[arg(long, short)]
    pub k: usize,

    /// Random signals (default: k).
    #[arg(long, short)]
    pub d: Option<usize>,

    /// Chebyshev order m.
    #[arg(long, short = 'm', default_value_t = 500)]
    pub order: usize,

    #[arg(long, value_enum, default_value_t = DampingArg::Jackson)]
    pub damping: DampingArg,

    #[arg(long, value_enum, default_value_t = LambdaMethod::Fast)]
    pub lambda_method: LambdaMethod,

    /// Cutoff for --lambda-method fixed.
    #[arg(long)]
    pub lambda: Option<f64>,

    #[command(flatten)]
    pub search: SearchArgs,

    /// Filter with the dense oracle instead of the polynomial.
    #[arg(long)]
    pub exact_filter: bool,

    #[arg(long, value_enum, default_value_t = OrthArg::Svd)]
    pub orthonormalization: OrthArg,

    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SynthArgs {
    #[command(flatten)]
    pub graph: GraphArgs,

    /// Write an edge list instead of Matrix Market.
    #[arg(long)]
    pub edge_list: bool,

    #[arg(long)]
    pub seed: Option<u64>,

    #[arg(long, short, default_value = "specsketch-out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EmbedArgs {
    #[command(flatten)]
    pub graph: GraphArgs,

    #[command(flatten)]
    pub spectral: SpectralArgs,

    /// Score the result against the dense oracle (mean energy).
    #[arg(long)]
    pub evaluate: bool,

    #[arg(long, short, default_value = "specsketch-out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LambdakArgs {
    #[command(flatten)]
    pub graph: GraphArgs,

    #[arg(long, short)]
    pub k: usize,

    /// Probe signals (default: k).
    #[arg(long, short)]
    pub d: Option<usize>,

    #[arg(long, short = 'm', default_value_t = 500)]
    pub order: usize,

    #[arg(long, value_enum, default_value_t = SearchMethod::Fast)]
    pub method: SearchMethod,

    #[command(flatten)]
    pub search: SearchArgs,

    /// Redraw the probe block at every iteration.
    #[arg(long)]
    pub fresh_signals: bool,

    /// Compare against the dense oracle.
    #[arg(long)]
    pub evaluate: bool,

    #[arg(long)]
    pub seed: Option<u64>,

    #[arg(long, short, default_value = "specsketch-out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EmbeddingSource {
    /// Approximate eigenvectors from filtered signals.
    Sketch,
    /// Exact eigenvectors from the dense oracle (spectral clustering).
    Oracle,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ClusterArgs {
    #[command(flatten)]
    pub graph: GraphArgs,

    #[command(flatten)]
    pub spectral: SpectralArgs,

    #[arg(long, value_enum, default_value_t = EmbeddingSource::Sketch)]
    pub embedding: EmbeddingSource,

    /// Ground-truth partition CSV (SBM labels are used automatically).
    #[arg(long)]
    pub labels: Option<PathBuf>,

    #[arg(long, default_value_t = 10)]
    pub restarts: usize,

    #[arg(long, default_value_t = 300)]
    pub kmeans_max_iter: usize,

    #[arg(long, short, default_value = "specsketch-out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OracleArgs {
    #[command(flatten)]
    pub graph: GraphArgs,

    /// Also write the first k eigenvectors.
    #[arg(long, short)]
    pub k: Option<usize>,

    #[arg(long)]
    pub seed: Option<u64>,

    #[arg(long, short, default_value = "specsketch-out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Regime {
    /// k = round(ln N).
    #[value(name = "logN")]
    #[serde(rename = "logN")]
    LogN,
    /// k = round(sqrt N).
    #[value(name = "sqrtN")]
    #[serde(rename = "sqrtN")]
    SqrtN,
    /// N = --n-max, k from --ks.
    #[value(name = "fixedN")]
    #[serde(rename = "fixedN")]
    FixedN,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BenchArgs {
    #[arg(long, value_enum, default_value_t = Regime::LogN)]
    pub regime: Regime,

    #[arg(long, default_value_t = 1000)]
    pub n_min: usize,

    #[arg(long, default_value_t = 100_000)]
    pub n_max: usize,

    /// Sizes per decade between --n-min and --n-max.
    #[arg(long, default_value_t = 1)]
    pub per_decade: usize,

    /// k values of the fixedN regime.
    #[arg(long, value_delimiter = ',', default_values_t = [10, 20, 50, 100])]
    pub ks: Vec<usize>,

    #[arg(long, short = 'm', default_value_t = 500)]
    pub order: usize,

    /// Neighbours of the knn graph over uniform points.
    #[arg(long, default_value_t = 10)]
    pub knn: usize,

    /// Dimension of the point cloud.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,

    #[arg(long)]
    pub seed: Option<u64>,

    #[arg(long, short, default_value = "specsketch-out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MetricsArgs {
    /// Partition CSV (`vertex,label`).
    #[arg(long)]
    pub partition: Option<PathBuf>,

    /// Reference partition for the adjusted Rand index.
    #[arg(long, requires = "partition")]
    pub reference: Option<PathBuf>,

    /// Graph for modularity (with --partition).
    #[arg(long, requires = "partition")]
    pub graph: Option<PathBuf>,

    /// Orthonormal embedding CSV.
    #[arg(long)]
    pub embedding: Option<PathBuf>,

    /// Reference basis for the mean energy.
    #[arg(long, requires = "embedding")]
    pub reference_embedding: Option<PathBuf>,

    #[arg(long, short, default_value = "specsketch-out")]
    pub out: PathBuf,
}
