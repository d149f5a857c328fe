use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "mtpairs",
    version,
    about = "Pairwise system-ranking accuracy of MT metrics against human judgement",
    args_override_self = true
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Collection file (JSONL).
    #[arg(long, global = true)]
    pub collection: Option<PathBuf>,
    /// Seed for every resampling procedure.
    #[arg(long, global = true, env = "MTPAIRS_SEED", default_value_t = 42)]
    pub seed: u64,
    /// key = value file mirroring the command-line flags; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Significance levels, comma-separated (default: from the collection, else 0.05,0.01,0.001).
    #[arg(long, global = true)]
    pub alphas: Option<String>,
    /// Output file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Add external metric scores to a collection, or convert a TSV release into one.
    Ingest(IngestArgs),
    /// Load and validate a collection, then print a summary.
    Validate,
    /// Score systems with a built-in metric.
    Score(ScoreArgs),
    /// Wilcoxon signed-rank test on human judgements for every system pair.
    HumanTest(HumanArgs),
    /// Pairwise accuracy table.
    Accuracy(AccuracyArgs),
    /// (metric delta, human delta, direction) points for plotting.
    Scatter(ScatterArgs),
    /// Bootstrap clusters of metrics tied with the most accurate one.
    Clusters(ClusterArgs),
    /// Paired bootstrap significance test of metric score differences.
    Sigtest(SigtestArgs),
    /// Cross-tabulate metric significance against human significance.
    Quadrants(QuadrantArgs),
    /// Weighted aggregation of correlations across groups.
    Meta(MetaArgs),
    /// Accuracy table with tied-with-best markers.
    Report(ReportArgs),
    /// Ship/no-ship verdict between two hypothesis files.
    Compare(CompareArgs),
    /// Every analysis in one run.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// External score rows (JSONL: metric_name, campaign_id, system_id, segment_id?, score).
    #[arg(long, conflicts_with = "tsv_dir")]
    pub scores: Option<PathBuf>,
    /// Orientation overrides, e.g. `TER=lower-better,COMET=higher-better`.
    #[arg(long)]
    pub orientation: Option<String>,
    /// Directory with judgements.tsv and optional segments.tsv, outputs.tsv, system_scores.tsv.
    #[arg(long)]
    pub tsv_dir: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct MetricArgs {
    /// default (13a) or cjk-char.
    #[arg(long, default_value = "default")]
    pub tokenizer: String,
    #[arg(long)]
    pub lowercase: bool,
    /// BLEU is 0 when some n-gram order has no hypothesis n-grams.
    #[arg(long)]
    pub strict_bleu: bool,
    #[arg(long, default_value_t = 2.0)]
    pub chrf_beta: f64,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// bleu, chrf or ter.
    #[arg(long)]
    pub metric: String,
    #[command(flatten)]
    pub metric_args: MetricArgs,
    /// Also write the collection with the new score set to this file.
    #[arg(long)]
    pub write_collection: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct HumanArgs {
    /// annotator-aware or segment-mean.
    #[arg(long, default_value = "annotator-aware")]
    pub matching: String,
    /// discard or pratt.
    #[arg(long, default_value = "discard")]
    pub zeros: String,
    /// Largest number of nonzero differences that uses the exact distribution.
    #[arg(long, default_value_t = 25)]
    pub exact_max_n: usize,
    #[arg(long)]
    pub no_continuity_correction: bool,
}

#[derive(Debug, Args, Clone)]
pub struct RecordArgs {
    /// Metrics, comma-separated (default: every metric in the collection).
    #[arg(long)]
    pub metrics: Option<String>,
    /// Drop pairs lacking any of the metrics so all are evaluated on the same pairs.
    #[arg(long)]
    pub intersect_metrics: bool,
    #[command(flatten)]
    pub human: HumanArgs,
}

#[derive(Debug, Args, Clone)]
pub struct TableArgs {
    /// markdown or tsv.
    #[arg(long, default_value = "markdown")]
    pub style: String,
    /// Decimals for percentages.
    #[arg(long, default_value_t = 1)]
    pub precision: usize,
}

#[derive(Debug, Args)]
pub struct AccuracyArgs {
    #[command(flatten)]
    pub records: RecordArgs,
    /// Subset columns separated by `;`, terms by `,` (e.g. `into-en;from-en,alpha=0.05`).
    /// Default: All, one column per alpha, and Within.
    #[arg(long)]
    pub subset: Option<String>,
    #[command(flatten)]
    pub table: TableArgs,
}

#[derive(Debug, Args)]
pub struct ScatterArgs {
    #[arg(long)]
    pub metric: String,
    #[arg(long)]
    pub subset: Option<String>,
    #[command(flatten)]
    pub human: HumanArgs,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[command(flatten)]
    pub records: RecordArgs,
    #[arg(long)]
    pub subset: Option<String>,
    #[arg(long, default_value_t = 10_000)]
    pub resamples: usize,
    #[arg(long, default_value_t = 0.95)]
    pub confidence: f64,
}

#[derive(Debug, Args)]
pub struct SigtestArgs {
    #[arg(long)]
    pub metric: String,
    #[arg(long, default_value_t = 1_000)]
    pub resamples: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[command(flatten)]
    pub metric_args: MetricArgs,
}

#[derive(Debug, Args)]
pub struct QuadrantArgs {
    #[command(flatten)]
    pub records: RecordArgs,
    #[arg(long, default_value_t = 1_000)]
    pub resamples: usize,
    /// Human significance level.
    #[arg(long, default_value_t = 0.05)]
    pub human_alpha: f64,
    /// Metric-test significance level.
    #[arg(long, default_value_t = 0.05)]
    pub metric_alpha: f64,
    #[command(flatten)]
    pub metric_args: MetricArgs,
    #[command(flatten)]
    pub table: TableArgs,
}

#[derive(Debug, Args)]
pub struct MetaArgs {
    /// TSV with columns group, r, n.
    #[arg(long)]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub records: RecordArgs,
    #[arg(long)]
    pub subset: Option<String>,
    /// Cluster resamples per column (0 disables tied-with-best markers).
    #[arg(long, default_value_t = 10_000)]
    pub resamples: usize,
    #[arg(long, default_value_t = 0.95)]
    pub confidence: f64,
    #[command(flatten)]
    pub table: TableArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Reference file, one segment per line.
    #[arg(long)]
    pub reference: PathBuf,
    #[arg(long)]
    pub hyp_a: PathBuf,
    #[arg(long)]
    pub hyp_b: PathBuf,
    #[arg(long, default_value = "bleu")]
    pub metric: String,
    #[arg(long, default_value_t = 1_000)]
    pub resamples: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[command(flatten)]
    pub metric_args: MetricArgs,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[command(flatten)]
    pub records: RecordArgs,
    #[arg(long, default_value_t = 10_000)]
    pub cluster_resamples: usize,
    #[arg(long, default_value_t = 1_000)]
    pub sigtest_resamples: usize,
    #[arg(long, default_value_t = 0.95)]
    pub confidence: f64,
    #[arg(long, default_value_t = 0.05)]
    pub human_alpha: f64,
    #[arg(long, default_value_t = 0.05)]
    pub metric_alpha: f64,
    /// Fixed timestamp recorded in the run manifest (default: now).
    #[arg(long)]
    pub timestamp: Option<String>,
    /// Write the bundle as JSON instead of markdown.
    #[arg(long)]
    pub json: bool,
    #[command(flatten)]
    pub metric_args: MetricArgs,
    #[command(flatten)]
    pub table: TableArgs,
}
