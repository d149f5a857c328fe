//! Meta-evaluation of machine translation metrics by pairwise system ranking.
//!
//! A [`Collection`] of human-judged campaigns is turned into one
//! [`DeltaRecord`] per system pair (human delta, Wilcoxon p-value, metric
//! deltas). Accuracy is the share of pairs where a metric's delta has the
//! same sign as the human delta. Around that sit bootstrap "tied with best"
//! clusters, paired bootstrap metric significance tests with a quadrant
//! analysis against human significance, a weighted meta-analysis of
//! correlations and plain-text table rendering.
//!
//! ```
//! use mtpairs::{cmd_compare, CompareConfig, Verdict};
//!
//! let refs = ["the cat sat on the mat", "it is raining"];
//! let out = cmd_compare(&refs, &refs, &refs, &CompareConfig::default()).unwrap();
//! assert_eq!(out.verdict, Verdict::Tied);
//! assert_eq!(out.p_value, 1.0);
//! ```

pub mod data_model;
pub mod error;
pub mod human_eval;
pub mod meta;
pub mod metrics;
pub mod pairwise;
pub mod pipeline;
pub mod report;
pub mod stats;
pub mod synth;

pub use data_model::{
    load_collection, parse_collection, serialize_collection, Campaign, Collection, LanguagePair,
    Manifest, MetricScoreSet, MetricScores, Orientation, SubsetSpec, SystemPair,
};
pub use error::{Error, LoadError, LoadErrorKind, Result};
pub use human_eval::{wilcoxon_signed_rank, TestMethod, TestOutcome, WilcoxonConfig};
pub use meta::{hunter_schmidt, CorrelationObservation};
pub use metrics::{BuiltinMetric, MetricConfig, SegmentStatsSet};
pub use pairwise::{accuracy, build_delta_records, delta_correlations, AccuracyTable, DeltaRecord};
pub use pipeline::{cmd_compare, cmd_pipeline, CompareConfig, PipelineConfig, ReportBundle, Verdict};
pub use report::{render_accuracy_table, render_quadrant_table, RenderOptions, TableStyle};
pub use stats::{
    bootstrap_accuracy_clusters, paired_bootstrap_metric_test, quadrant_analysis, ResampleConfig,
};
