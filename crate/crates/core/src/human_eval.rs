//! Human judgement aggregation and paired significance testing.
//!
//! System scores are plain means of the raw 0-100 judgements (no z-scoring).
//! System pairs are compared with a two-sided Wilcoxon signed-rank test over
//! per-unit score differences.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::data_model::{Campaign, SystemPair, DEFAULT_ALPHAS};
use crate::error::{Error, Result};

/// Significance decision shared by every test in the crate: `p <= alpha`.
pub fn is_significant(p: f64, alpha: f64) -> bool {
    p <= alpha
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HumanSystemScore {
    pub campaign_id: String,
    pub system_id: String,
    pub mean_score: f64,
    pub n_judgements: usize,
}

pub fn human_system_score(campaign: &Campaign, system_id: &str) -> Result<HumanSystemScore> {
    let scores: Vec<f64> = campaign
        .judgements
        .iter()
        .filter(|j| j.system_id == system_id)
        .map(|j| j.score)
        .collect();
    if scores.is_empty() {
        return Err(Error::NoJudgements {
            campaign: campaign.campaign_id.clone(),
            system: system_id.to_owned(),
        });
    }
    Ok(HumanSystemScore {
        campaign_id: campaign.campaign_id.clone(),
        system_id: system_id.to_owned(),
        mean_score: scores.iter().sum::<f64>() / scores.len() as f64,
        n_judgements: scores.len(),
    })
}

/// How judgements of two systems are matched into paired units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchingMode {
    /// One unit per (segment, annotator) that judged both systems; segments
    /// without a shared annotator fall back to a difference of segment means.
    #[default]
    AnnotatorAware,
    /// One unit per segment: difference of the per-segment mean scores.
    SegmentMean,
}

impl FromStr for MatchingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "annotator" | "annotator-aware" => Ok(Self::AnnotatorAware),
            "segment" | "segment-mean" => Ok(Self::SegmentMean),
            other => Err(Error::Parse(format!("unknown matching mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairedDifferences {
    pub pair: SystemPair,
    /// score(system_a) - score(system_b) per matched unit.
    pub diffs: Vec<f64>,
    /// Judgements that could not be matched and were dropped.
    pub unmatched: usize,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn paired_differences(
    campaign: &Campaign,
    pair: &SystemPair,
    mode: MatchingMode,
) -> Result<PairedDifferences> {
    // segment -> annotator -> scores, for each side
    type Side<'a> = BTreeMap<&'a str, BTreeMap<&'a str, Vec<f64>>>;
    let mut a: Side = BTreeMap::new();
    let mut b: Side = BTreeMap::new();
    for j in &campaign.judgements {
        let side = if j.system_id == pair.system_a {
            &mut a
        } else if j.system_id == pair.system_b {
            &mut b
        } else {
            continue;
        };
        side.entry(j.segment_id.as_str())
            .or_default()
            .entry(j.annotator_id.as_str())
            .or_default()
            .push(j.score);
    }

    // Campaign segment order first, then any judged segment not listed.
    let mut order: Vec<&str> = campaign.segment_ids();
    let listed: BTreeSet<&str> = order.iter().copied().collect();
    let extra: BTreeSet<&str> = a.keys().chain(b.keys()).copied().filter(|s| !listed.contains(s)).collect();
    order.extend(extra);

    let empty = BTreeMap::new();
    let count = |m: &BTreeMap<&str, Vec<f64>>| m.values().map(Vec::len).sum::<usize>();
    let mut diffs = Vec::new();
    let mut unmatched = 0usize;
    for seg in order {
        let sa = a.get(seg).unwrap_or(&empty);
        let sb = b.get(seg).unwrap_or(&empty);
        if sa.is_empty() || sb.is_empty() {
            unmatched += count(sa) + count(sb);
            continue;
        }
        let shared: Vec<&str> = sa.keys().filter(|k| sb.contains_key(*k)).copied().collect();
        if mode == MatchingMode::AnnotatorAware && !shared.is_empty() {
            for ann in &shared {
                diffs.push(mean(&sa[ann]) - mean(&sb[ann]));
            }
            unmatched += sa.iter().filter(|(k, _)| !sb.contains_key(*k)).map(|(_, v)| v.len()).sum::<usize>();
            unmatched += sb.iter().filter(|(k, _)| !sa.contains_key(*k)).map(|(_, v)| v.len()).sum::<usize>();
        } else {
            let all_a: Vec<f64> = sa.values().flatten().copied().collect();
            let all_b: Vec<f64> = sb.values().flatten().copied().collect();
            diffs.push(mean(&all_a) - mean(&all_b));
        }
    }
    if diffs.is_empty() {
        return Err(Error::NoMatchedUnits {
            campaign: campaign.campaign_id.clone(),
            system_a: pair.system_a.clone(),
            system_b: pair.system_b.clone(),
        });
    }
    Ok(PairedDifferences {
        pair: pair.clone(),
        diffs,
        unmatched,
    })
}

/// Treatment of zero differences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroHandling {
    /// Drop zeros before ranking.
    #[default]
    Discard,
    /// Rank zeros with the rest, then drop their ranks from the statistic.
    Pratt,
}

impl FromStr for ZeroHandling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "discard" | "wilcox" => Ok(Self::Discard),
            "pratt" => Ok(Self::Pratt),
            other => Err(Error::Parse(format!("unknown zero handling '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonConfig {
    pub zero_handling: ZeroHandling,
    /// Largest nonzero count that uses the exact null distribution.
    pub exact_max_n: usize,
    pub continuity_correction: bool,
}

impl Default for WilcoxonConfig {
    fn default() -> Self {
        Self {
            zero_handling: ZeroHandling::Discard,
            exact_max_n: 25,
            continuity_correction: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestMethod {
    Exact,
    Asymptotic,
    Bootstrap,
    /// No informative data (e.g. all differences zero); p is 1.
    Degenerate,
}

impl fmt::Display for TestMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TestMethod::Exact => "exact",
            TestMethod::Asymptotic => "asymptotic",
            TestMethod::Bootstrap => "bootstrap",
            TestMethod::Degenerate => "degenerate",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub p_value: f64,
    /// Sum of positive ranks for Wilcoxon; score difference for bootstrap tests.
    pub statistic: f64,
    pub decisions: Vec<(f64, bool)>,
    pub method: TestMethod,
    pub method_note: String,
}

impl TestOutcome {
    pub fn new(p_value: f64, statistic: f64, method: TestMethod, method_note: String) -> Self {
        let mut out = Self {
            p_value: p_value.clamp(0.0, 1.0),
            statistic,
            decisions: Vec::new(),
            method,
            method_note,
        };
        out.set_alphas(&DEFAULT_ALPHAS);
        out
    }

    pub fn set_alphas(&mut self, alphas: &[f64]) {
        self.decisions = alphas.iter().map(|&a| (a, is_significant(self.p_value, a))).collect();
    }

    pub fn is_degenerate(&self) -> bool {
        self.method == TestMethod::Degenerate
    }

    pub fn significant_at(&self, alpha: f64) -> bool {
        is_significant(self.p_value, alpha)
    }
}

/// Average ranks (1-based) of `values`, ties sharing the mean of their positions.
pub(crate) fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && values[idx[end]] == values[idx[start]] {
            end += 1;
        }
        let rank = (start + 1 + end) as f64 / 2.0;
        for &k in &idx[start..end] {
            ranks[k] = rank;
        }
        start = end;
    }
    ranks
}

/// Two-sided Wilcoxon signed-rank test.
///
/// Exact null distribution (by dynamic programming over doubled ranks, so
/// average ranks of ties stay integral) when the number of nonzero
/// differences is at most `cfg.exact_max_n`; otherwise the normal
/// approximation with tie-corrected variance and optional continuity correction.
pub fn wilcoxon_signed_rank(diffs: &[f64], cfg: &WilcoxonConfig) -> TestOutcome {
    let zeros = diffs.iter().filter(|d| **d == 0.0).count();
    let (ranks, signs): (Vec<f64>, Vec<bool>) = match cfg.zero_handling {
        ZeroHandling::Discard => {
            let nz: Vec<f64> = diffs.iter().copied().filter(|d| *d != 0.0).collect();
            let abs: Vec<f64> = nz.iter().map(|d| d.abs()).collect();
            (average_ranks(&abs), nz.iter().map(|d| *d > 0.0).collect())
        }
        ZeroHandling::Pratt => {
            let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
            let all = average_ranks(&abs);
            diffs
                .iter()
                .zip(all)
                .filter(|(d, _)| **d != 0.0)
                .map(|(d, r)| (r, *d > 0.0))
                .unzip()
        }
    };
    let n = ranks.len();
    if n == 0 {
        return TestOutcome::new(
            1.0,
            0.0,
            TestMethod::Degenerate,
            format!("all {} differences zero", diffs.len()),
        );
    }
    let w_plus: f64 = ranks.iter().zip(&signs).filter(|(_, s)| **s).map(|(r, _)| r).sum();

    if n <= cfg.exact_max_n {
        let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
        let total: usize = doubled.iter().sum();
        let mut counts = vec![0u64; total + 1];
        counts[0] = 1;
        let mut reach = 0usize;
        for &r in &doubled {
            for s in (0..=reach).rev() {
                if counts[s] != 0 {
                    counts[s + r] += counts[s];
                }
            }
            reach += r;
        }
        let w = (2.0 * w_plus).round() as usize;
        let lower: u64 = counts[..=w].iter().sum();
        let upper: u64 = counts[w..].iter().sum();
        let denom = (1u64 << n) as f64;
        let p = (2.0 * lower.min(upper) as f64 / denom).min(1.0);
        TestOutcome::new(
            p,
            w_plus,
            TestMethod::Exact,
            format!("exact, n={n}, zeros={zeros}"),
        )
    } else {
        let sum_r: f64 = ranks.iter().sum();
        let mean = sum_r / 2.0;
        let var: f64 = ranks.iter().map(|r| r * r).sum::<f64>() / 4.0;
        let mut dev = (w_plus - mean).abs();
        if cfg.continuity_correction {
            dev = (dev - 0.5).max(0.0);
        }
        let p = if var > 0.0 {
            let z = dev / var.sqrt();
            let normal = Normal::new(0.0, 1.0).expect("standard normal");
            (2.0 * normal.sf(z)).min(1.0)
        } else {
            1.0
        };
        TestOutcome::new(
            p,
            w_plus,
            TestMethod::Asymptotic,
            format!("normal approximation, n={n}, zeros={zeros}"),
        )
    }
}

/// Position of a p-value relative to a set of alpha levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceBand {
    pub significant_at: Vec<(f64, bool)>,
    /// "ns" or the strictest alpha the p-value passes.
    pub label: String,
    /// Significant at the loosest alpha but not at the strictest.
    pub within: bool,
}

pub fn significance_band(p: f64, alphas: &[f64]) -> SignificanceBand {
    let significant_at: Vec<(f64, bool)> = alphas.iter().map(|&a| (a, is_significant(p, a))).collect();
    let strictest = significant_at
        .iter()
        .filter(|(_, s)| *s)
        .map(|(a, _)| *a)
        .min_by(f64::total_cmp);
    let label = strictest.map_or_else(|| "ns".to_owned(), |a| a.to_string());
    let loose = alphas.iter().copied().max_by(f64::total_cmp);
    let strict = alphas.iter().copied().min_by(f64::total_cmp);
    let within = match (loose, strict) {
        (Some(hi), Some(lo)) if lo < hi => p > lo && p <= hi,
        _ => false,
    };
    SignificanceBand {
        significant_at,
        label,
        within,
    }
}
