//! Paired bootstrap significance test over corpus metric scores.

use std::collections::BTreeMap;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{resample_indices, ResampleConfig};
use crate::data_model::{Collection, MetricScores, SystemPair};
use crate::error::{Error, Result};
use crate::human_eval::{TestMethod, TestOutcome};
use crate::metrics::{score_campaign, BuiltinMetric, MetricConfig, SegmentStatsSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sidedness {
    #[default]
    TwoSided,
    /// Alternative: system A is better.
    AGreater,
}

impl FromStr for Sidedness {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two-sided" | "two" => Ok(Self::TwoSided),
            "greater" | "a-greater" | "one-sided" => Ok(Self::AGreater),
            other => Err(Error::Parse(format!("unknown sidedness '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricTest {
    pub outcome: TestOutcome,
    pub score_a: f64,
    pub score_b: f64,
    pub wins_a: usize,
    pub wins_b: usize,
    pub ties: usize,
    pub n_resamples: usize,
    pub seed: u64,
    pub alpha: f64,
    pub significant: bool,
}

/// Paired bootstrap resampling of segments.
///
/// Each resample draws segment indices with replacement, recomputes both
/// corpus scores from summed statistics and records which system won.
/// Tied resamples count for neither system, so
/// two-sided `p = min(1, 2 * min(frac_a, frac_b) + frac_tie)` and
/// one-sided (A better) `p = frac_b + frac_tie`. Without ties the two-sided
/// form is the usual `2 * min(frac(A > B), frac(B > A))`; when every
/// resample ties, p is 1.
pub fn paired_bootstrap_metric_test(
    stats_a: &SegmentStatsSet,
    stats_b: &SegmentStatsSet,
    cfg: &ResampleConfig,
    sidedness: Sidedness,
) -> Result<MetricTest> {
    cfg.validate()?;
    if !stats_a.compatible(stats_b) || stats_a.len() != stats_b.len() {
        return Err(Error::SegmentSetMismatch);
    }
    let n = stats_a.len();
    if n == 0 {
        return Err(Error::NoSegments);
    }
    let (wins_a, wins_b, ties) = (0..cfg.n_resamples)
        .into_par_iter()
        .map(|r| {
            let idx = resample_indices(cfg.seed, r, n);
            let a = stats_a.score_of(idx.iter().copied());
            let b = stats_b.score_of(idx.iter().copied());
            if a > b {
                (1, 0, 0)
            } else if b > a {
                (0, 1, 0)
            } else {
                (0, 0, 1)
            }
        })
        .reduce(|| (0, 0, 0), |x, y| (x.0 + y.0, x.1 + y.1, x.2 + y.2));
    // counted in integers so p is the exact fraction, rounded once
    let extreme = match sidedness {
        Sidedness::TwoSided => (2 * wins_a.min(wins_b) + ties).min(cfg.n_resamples),
        Sidedness::AGreater => wins_b + ties,
    };
    let p = extreme as f64 / cfg.n_resamples as f64;
    let score_a = stats_a.corpus_score();
    let score_b = stats_b.corpus_score();
    let outcome = TestOutcome::new(
        p,
        score_a - score_b,
        TestMethod::Bootstrap,
        format!(
            "paired bootstrap, {} resamples, seed {}, {:?}",
            cfg.n_resamples, cfg.seed, sidedness
        ),
    );
    let significant = outcome.significant_at(cfg.alpha);
    Ok(MetricTest {
        outcome,
        score_a,
        score_b,
        wins_a,
        wins_b,
        ties,
        n_resamples: cfg.n_resamples,
        seed: cfg.seed,
        alpha: cfg.alpha,
        significant,
    })
}

/// Segment statistics keyed by campaign, then metric, then system.
pub type StatsStore = BTreeMap<String, BTreeMap<String, BTreeMap<String, SegmentStatsSet>>>;

/// Gathers per-segment statistics for `metrics` in every campaign.
///
/// Segment-level score sets provide their own scores (corpus score = mean).
/// Built-in metrics without segment-level sets are recomputed from texts when
/// outputs and references are present. Anything else (system-level only) is
/// absent from the store and cannot be bootstrap-tested.
pub fn collect_segment_stats(
    collection: &Collection,
    metrics: &[String],
    cfg: &MetricConfig,
) -> Result<StatsStore> {
    let mut store = StatsStore::new();
    for c in &collection.campaigns {
        let segs = c.segment_ids();
        let mut per_metric = BTreeMap::new();
        for m in metrics {
            let mut per_system = BTreeMap::new();
            match c.metric(m).map(|s| &s.scores) {
                Some(MetricScores::Segment(per)) => {
                    for (sys, scores) in per {
                        let values: Vec<f64> = if segs.is_empty() {
                            scores.values().copied().collect()
                        } else {
                            segs.iter().map(|s| scores[*s]).collect()
                        };
                        per_system.insert(sys.clone(), SegmentStatsSet::Mean(values));
                    }
                }
                _ => {
                    if let Some(builtin) = BuiltinMetric::lookup(m) {
                        if !c.outputs.is_empty() && c.references().is_some() {
                            per_system = score_campaign(c, builtin, cfg)?.1;
                        }
                    }
                }
            }
            if !per_system.is_empty() {
                per_metric.insert(m.clone(), per_system);
            }
        }
        store.insert(c.campaign_id.clone(), per_metric);
    }
    Ok(store)
}

/// Runs the paired bootstrap for every pair whose two systems have stats for `metric`.
/// Pairs without stats are absent from the result.
pub fn metric_tests<'a>(
    store: &StatsStore,
    pairs: impl IntoIterator<Item = &'a SystemPair>,
    metric: &str,
    cfg: &ResampleConfig,
) -> Result<BTreeMap<SystemPair, MetricTest>> {
    cfg.validate()?;
    let jobs: Vec<(&SystemPair, &SegmentStatsSet, &SegmentStatsSet)> = pairs
        .into_iter()
        .filter_map(|pair| {
            let per = store.get(&pair.campaign_id)?.get(metric)?;
            Some((pair, per.get(&pair.system_a)?, per.get(&pair.system_b)?))
        })
        .collect();
    jobs.into_par_iter()
        .map(|(pair, a, b)| Ok((pair.clone(), paired_bootstrap_metric_test(a, b, cfg, Sidedness::TwoSided)?)))
        .collect()
}
