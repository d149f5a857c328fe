//! Built-in string metrics computed from additive per-segment statistics.
//!
//! Corpus scores are always derived from summed segment statistics, so a
//! bootstrap resample only needs to re-sum the cached stats.

mod bleu;
mod chrf;
mod ter;
pub mod tokenize;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use bleu::{bleu_segment_stats, corpus_bleu, BleuSegmentStats};
pub use chrf::{chrf_segment_stats, corpus_chrf, ChrfSegmentStats, DEFAULT_BETA};
pub use ter::{corpus_ter, ter_segment, TerSegmentStats, MAX_SHIFTS, MAX_SHIFT_SIZE};
pub use tokenize::{tokenize, TokenizationScheme, Tokenizer};

use crate::data_model::{Campaign, MetricScoreSet, MetricScores, Orientation};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BuiltinMetric {
    Bleu,
    Chrf,
    Ter,
}

impl BuiltinMetric {
    pub const ALL: [BuiltinMetric; 3] = [BuiltinMetric::Bleu, BuiltinMetric::Chrf, BuiltinMetric::Ter];

    /// Name used for score sets and report rows.
    pub fn name(self) -> &'static str {
        match self {
            BuiltinMetric::Bleu => "BLEU",
            BuiltinMetric::Chrf => "ChrF",
            BuiltinMetric::Ter => "TER",
        }
    }

    pub fn orientation(self) -> Orientation {
        match self {
            BuiltinMetric::Ter => Orientation::LowerBetter,
            _ => Orientation::HigherBetter,
        }
    }

    /// Recognizes a built-in metric name without erroring on external ones.
    pub fn lookup(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "bleu" => Some(BuiltinMetric::Bleu),
            "chrf" => Some(BuiltinMetric::Chrf),
            "ter" => Some(BuiltinMetric::Ter),
            _ => None,
        }
    }
}

impl fmt::Display for BuiltinMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BuiltinMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::lookup(s).ok_or_else(|| Error::UnsupportedMetric(s.to_owned()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricConfig {
    pub tokenizer: Tokenizer,
    /// Score 0 when any BLEU order has no hypothesis n-grams instead of skipping the order.
    pub strict_bleu: bool,
    pub chrf_beta: f64,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self {
            tokenizer: Tokenizer::default(),
            strict_bleu: false,
            chrf_beta: DEFAULT_BETA,
        }
    }
}

/// Cached per-segment statistics of one system, in campaign segment order.
#[derive(Debug, Clone, PartialEq)]
pub enum SegmentStatsSet {
    Bleu { stats: Vec<BleuSegmentStats>, strict: bool },
    Chrf { stats: Vec<ChrfSegmentStats>, beta: f64 },
    Ter(Vec<TerSegmentStats>),
    /// Segment-level scores of an external metric (already orientation-normalized);
    /// the corpus score is their mean.
    Mean(Vec<f64>),
}

impl SegmentStatsSet {
    pub fn len(&self) -> usize {
        match self {
            SegmentStatsSet::Bleu { stats, .. } => stats.len(),
            SegmentStatsSet::Chrf { stats, .. } => stats.len(),
            SegmentStatsSet::Ter(s) => s.len(),
            SegmentStatsSet::Mean(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// True when both sets hold the same statistic kind and configuration.
    pub fn compatible(&self, other: &SegmentStatsSet) -> bool {
        match (self, other) {
            (SegmentStatsSet::Bleu { strict: a, .. }, SegmentStatsSet::Bleu { strict: b, .. }) => a == b,
            (SegmentStatsSet::Chrf { beta: a, .. }, SegmentStatsSet::Chrf { beta: b, .. }) => a == b,
            (SegmentStatsSet::Ter(_), SegmentStatsSet::Ter(_)) => true,
            (SegmentStatsSet::Mean(_), SegmentStatsSet::Mean(_)) => true,
            _ => false,
        }
    }

    /// Orientation-normalized corpus score over all segments.
    pub fn corpus_score(&self) -> f64 {
        self.score_of(0..self.len())
    }

    /// Orientation-normalized corpus score over the given segment indices (repeats allowed).
    pub fn score_of(&self, indices: impl IntoIterator<Item = usize>) -> f64 {
        match self {
            SegmentStatsSet::Bleu { stats, strict } => {
                let mut total = BleuSegmentStats::default();
                for i in indices {
                    total += &stats[i];
                }
                total.score(*strict)
            }
            SegmentStatsSet::Chrf { stats, beta } => {
                let mut total = ChrfSegmentStats::default();
                for i in indices {
                    total += &stats[i];
                }
                total.score(*beta)
            }
            SegmentStatsSet::Ter(stats) => {
                let mut total = TerSegmentStats::default();
                for i in indices {
                    total += &stats[i];
                }
                -total.rate()
            }
            SegmentStatsSet::Mean(values) => {
                let mut sum = 0.0;
                let mut n = 0usize;
                for i in indices {
                    sum += values[i];
                    n += 1;
                }
                if n == 0 {
                    0.0
                } else {
                    sum / n as f64
                }
            }
        }
    }
}

/// Segment statistics of one hypothesis list against references.
pub fn segment_stats(
    metric: BuiltinMetric,
    hypotheses: &[&str],
    references: &[&str],
    cfg: &MetricConfig,
) -> Result<SegmentStatsSet> {
    if hypotheses.len() != references.len() {
        return Err(Error::SegmentSetMismatch);
    }
    if hypotheses.is_empty() {
        return Err(Error::NoSegments);
    }
    let pairs: Vec<(&str, &str)> = hypotheses.iter().copied().zip(references.iter().copied()).collect();
    let tok = cfg.tokenizer;
    Ok(match metric {
        BuiltinMetric::Bleu => SegmentStatsSet::Bleu {
            stats: pairs
                .par_iter()
                .map(|(h, r)| bleu_segment_stats(&tok.tokenize(h), &tok.tokenize(r)))
                .collect(),
            strict: cfg.strict_bleu,
        },
        BuiltinMetric::Chrf => SegmentStatsSet::Chrf {
            stats: pairs
                .par_iter()
                .map(|(h, r)| {
                    if tok.lowercase {
                        chrf_segment_stats(&h.to_lowercase(), &r.to_lowercase())
                    } else {
                        chrf_segment_stats(h, r)
                    }
                })
                .collect(),
            beta: cfg.chrf_beta,
        },
        BuiltinMetric::Ter => SegmentStatsSet::Ter(
            pairs
                .par_iter()
                .map(|(h, r)| ter_segment(&tok.tokenize(h), &tok.tokenize(r)))
                .collect::<Result<_>>()?,
        ),
    })
}

/// Built-in metric score of one system with its cached segment statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemScore {
    pub system_id: String,
    /// Orientation-normalized (TER is negated).
    pub score: f64,
    pub stats: SegmentStatsSet,
}

pub fn score_system(
    campaign: &Campaign,
    system_id: &str,
    metric_name: &str,
    cfg: &MetricConfig,
) -> Result<SystemScore> {
    let metric: BuiltinMetric = metric_name.parse()?;
    let references = campaign.references().ok_or_else(|| Error::MissingReferences {
        campaign: campaign.campaign_id.clone(),
        metric: metric.name().to_owned(),
    })?;
    let hypotheses = campaign
        .hypotheses(system_id)
        .ok_or_else(|| Error::UnknownSystem {
            campaign: campaign.campaign_id.clone(),
            system: system_id.to_owned(),
        })?;
    let stats = segment_stats(metric, &hypotheses, &references, cfg)?;
    Ok(SystemScore {
        system_id: system_id.to_owned(),
        score: stats.corpus_score(),
        stats,
    })
}

/// Scores every system of a campaign, returning the score set and per-system stats.
pub fn score_campaign(
    campaign: &Campaign,
    metric: BuiltinMetric,
    cfg: &MetricConfig,
) -> Result<(MetricScoreSet, BTreeMap<String, SegmentStatsSet>)> {
    let mut scores = BTreeMap::new();
    let mut stats = BTreeMap::new();
    for system in campaign.systems() {
        let s = score_system(campaign, &system, metric.name(), cfg)?;
        scores.insert(system.clone(), s.score);
        stats.insert(system, s.stats);
    }
    Ok((
        MetricScoreSet {
            metric_name: metric.name().to_owned(),
            orientation: metric.orientation(),
            scores: MetricScores::System(scores),
        },
        stats,
    ))
}
