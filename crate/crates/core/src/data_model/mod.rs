//! Campaign collections: segments, system outputs, human judgements and
//! metric scores, plus system-pair enumeration.
//!
//! A [`Collection`] is immutable once loaded. All metric scores held here are
//! orientation-normalized: lower-better metrics are negated at ingestion so a
//! larger stored value always means a better system.

mod convert;
mod external;
mod jsonl;
pub mod language;
mod subset;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

pub use convert::convert_tsv_release;
pub use external::{ingest_external_scores, read_external_scores, ExternalScore};
pub use jsonl::{load_collection, parse_collection, serialize_collection, write_collection};
pub use language::{Direction, ScriptClass};
pub use subset::{filter_pairs, PBand, SubsetSpec};

/// Alpha levels used when the manifest does not list its own.
pub const DEFAULT_ALPHAS: [f64; 3] = [0.05, 0.01, 0.001];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    HigherBetter,
    LowerBetter,
}

impl Orientation {
    /// Maps a raw score onto the higher-better scale (and back; the map is an involution).
    pub fn normalize(self, raw: f64) -> f64 {
        match self {
            Orientation::HigherBetter => raw,
            Orientation::LowerBetter => -raw,
        }
    }
}

impl std::str::FromStr for Orientation {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> crate::error::Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "higher-better" | "higher" | "up" => Ok(Self::HigherBetter),
            "lower-better" | "lower" | "down" => Ok(Self::LowerBetter),
            other => Err(crate::error::Error::Parse(format!("unknown orientation '{other}'"))),
        }
    }
}

/// Orientation of well-known error metrics, used when a score file does not declare one.
pub fn default_orientation(metric_name: &str) -> Orientation {
    match metric_name.to_ascii_lowercase().as_str() {
        "ter" | "character" | "eed" => Orientation::LowerBetter,
        _ => Orientation::HigherBetter,
    }
}

/// Metrics that score a hypothesis against the source only.
pub fn is_known_reference_free(metric_name: &str) -> bool {
    let m = metric_name.to_ascii_lowercase();
    m.ends_with("-src") || m.ends_with("_src") || m.ends_with("-qe")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Granularity {
    Segment,
    System,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub segment_id: String,
    pub source_text: String,
    pub reference_text: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemOutput {
    pub system_id: String,
    pub segment_id: String,
    pub hypothesis_text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Judgement {
    pub annotator_id: String,
    pub system_id: String,
    pub segment_id: String,
    pub score: f64,
}

/// Stored (normalized) scores of one metric in one campaign.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricScores {
    /// system_id -> segment_id -> score
    Segment(BTreeMap<String, BTreeMap<String, f64>>),
    /// system_id -> score
    System(BTreeMap<String, f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricScoreSet {
    pub metric_name: String,
    /// Orientation of the raw scores as ingested; `scores` are already normalized.
    pub orientation: Orientation,
    pub scores: MetricScores,
}

impl MetricScoreSet {
    pub fn granularity(&self) -> Granularity {
        match self.scores {
            MetricScores::Segment(_) => Granularity::Segment,
            MetricScores::System(_) => Granularity::System,
        }
    }

    pub fn systems(&self) -> Vec<&str> {
        match &self.scores {
            MetricScores::Segment(m) => m.keys().map(String::as_str).collect(),
            MetricScores::System(m) => m.keys().map(String::as_str).collect(),
        }
    }

    /// System-level score; segment-level sets are averaged.
    pub fn system_score(&self, system_id: &str) -> Option<f64> {
        match &self.scores {
            MetricScores::System(m) => m.get(system_id).copied(),
            MetricScores::Segment(m) => {
                let segs = m.get(system_id)?;
                if segs.is_empty() {
                    return None;
                }
                Some(segs.values().sum::<f64>() / segs.len() as f64)
            }
        }
    }

    /// Per-segment scores in the given segment order, if this is a segment-level set.
    pub fn segment_scores(&self, system_id: &str, segment_ids: &[&str]) -> Option<Vec<f64>> {
        match &self.scores {
            MetricScores::System(_) => None,
            MetricScores::Segment(m) => {
                let segs = m.get(system_id)?;
                segment_ids.iter().map(|s| segs.get(*s).copied()).collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LanguagePair {
    pub source: String,
    pub target: String,
}

impl LanguagePair {
    pub fn new(source: impl Into<String>, target: impl Into<String>) -> Self {
        Self {
            source: source.into(),
            target: target.into(),
        }
    }

    pub fn direction(&self) -> Direction {
        Direction::of(&self.source, &self.target)
    }

    pub fn target_script(&self) -> Option<ScriptClass> {
        language::script_class(&self.target)
    }
}

impl fmt::Display for LanguagePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.source, self.target)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Campaign {
    pub campaign_id: String,
    pub language_pair: LanguagePair,
    pub domain_tag: String,
    pub group_tag: String,
    pub segments: Vec<Segment>,
    pub outputs: Vec<SystemOutput>,
    pub judgements: Vec<Judgement>,
    pub metric_scores: Vec<MetricScoreSet>,
}

impl Campaign {
    pub fn new(campaign_id: impl Into<String>, language_pair: LanguagePair) -> Self {
        Self {
            campaign_id: campaign_id.into(),
            language_pair,
            domain_tag: String::new(),
            group_tag: String::new(),
            segments: Vec::new(),
            outputs: Vec::new(),
            judgements: Vec::new(),
            metric_scores: Vec::new(),
        }
    }

    /// Sorted system ids. Taken from the outputs when present, otherwise from
    /// judgements and score sets (collections that ship without texts).
    pub fn systems(&self) -> Vec<String> {
        let set: BTreeSet<&str> = if !self.outputs.is_empty() {
            self.outputs.iter().map(|o| o.system_id.as_str()).collect()
        } else {
            self.judgements
                .iter()
                .map(|j| j.system_id.as_str())
                .chain(self.metric_scores.iter().flat_map(|m| m.systems()))
                .collect()
        };
        set.into_iter().map(str::to_owned).collect()
    }

    pub fn segment_ids(&self) -> Vec<&str> {
        self.segments.iter().map(|s| s.segment_id.as_str()).collect()
    }

    pub fn metric(&self, metric_name: &str) -> Option<&MetricScoreSet> {
        self.metric_scores
            .iter()
            .find(|m| m.metric_name == metric_name)
    }

    /// Hypotheses of one system in segment order.
    pub fn hypotheses(&self, system_id: &str) -> Option<Vec<&str>> {
        let by_seg: BTreeMap<&str, &str> = self
            .outputs
            .iter()
            .filter(|o| o.system_id == system_id)
            .map(|o| (o.segment_id.as_str(), o.hypothesis_text.as_str()))
            .collect();
        if by_seg.is_empty() {
            return None;
        }
        self.segments
            .iter()
            .map(|s| by_seg.get(s.segment_id.as_str()).copied())
            .collect()
    }

    /// References in segment order, or `None` if any segment lacks one.
    pub fn references(&self) -> Option<Vec<&str>> {
        self.segments
            .iter()
            .map(|s| s.reference_text.as_deref())
            .collect()
    }

    pub fn has_judgements(&self) -> bool {
        !self.judgements.is_empty()
    }

    /// Adds a score set, replacing any existing set with the same name.
    pub fn upsert_metric(&mut self, set: MetricScoreSet) {
        match self
            .metric_scores
            .iter_mut()
            .find(|m| m.metric_name == set.metric_name)
        {
            Some(slot) => *slot = set,
            None => self.metric_scores.push(set),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    #[serde(default = "default_alphas")]
    pub alphas: Vec<f64>,
    #[serde(default)]
    pub orientations: BTreeMap<String, Orientation>,
    /// Metrics declared as not needing a reference.
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub reference_free: BTreeSet<String>,
}

fn default_alphas() -> Vec<f64> {
    DEFAULT_ALPHAS.to_vec()
}

impl Default for Manifest {
    fn default() -> Self {
        Self {
            schema_version: 1,
            alphas: default_alphas(),
            orientations: BTreeMap::new(),
            reference_free: BTreeSet::new(),
        }
    }
}

impl Manifest {
    pub fn orientation(&self, metric_name: &str) -> Orientation {
        self.orientations
            .get(metric_name)
            .copied()
            .unwrap_or_else(|| default_orientation(metric_name))
    }

    pub fn is_reference_free(&self, metric_name: &str) -> bool {
        self.reference_free.contains(metric_name) || is_known_reference_free(metric_name)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Collection {
    pub manifest: Manifest,
    pub campaigns: Vec<Campaign>,
}

impl Collection {
    pub fn campaign(&self, campaign_id: &str) -> Option<&Campaign> {
        self.campaigns.iter().find(|c| c.campaign_id == campaign_id)
    }

    pub fn campaign_mut(&mut self, campaign_id: &str) -> Option<&mut Campaign> {
        self.campaigns
            .iter_mut()
            .find(|c| c.campaign_id == campaign_id)
    }

    /// All metric names that appear in any campaign, sorted.
    pub fn metric_names(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self
            .campaigns
            .iter()
            .flat_map(|c| c.metric_scores.iter().map(|m| m.metric_name.as_str()))
            .collect();
        set.into_iter().map(str::to_owned).collect()
    }

    pub fn has_judgements(&self) -> bool {
        self.campaigns.iter().any(Campaign::has_judgements)
    }
}

/// An unordered system pair in canonical (lexicographic) order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SystemPair {
    pub campaign_id: String,
    pub system_a: String,
    pub system_b: String,
}

impl SystemPair {
    /// Builds a canonical pair; returns `None` when both ids are equal.
    pub fn new(campaign_id: &str, x: &str, y: &str) -> Option<Self> {
        let (a, b) = match x.cmp(y) {
            std::cmp::Ordering::Less => (x, y),
            std::cmp::Ordering::Greater => (y, x),
            std::cmp::Ordering::Equal => return None,
        };
        Some(Self {
            campaign_id: campaign_id.to_owned(),
            system_a: a.to_owned(),
            system_b: b.to_owned(),
        })
    }
}

impl fmt::Display for SystemPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}~{}", self.campaign_id, self.system_a, self.system_b)
    }
}

/// All k(k-1)/2 pairs of a campaign, ordered by (system_a, system_b).
pub fn enumerate_pairs(campaign: &Campaign) -> Vec<SystemPair> {
    let systems = campaign.systems();
    let mut pairs = Vec::with_capacity(systems.len() * systems.len().saturating_sub(1) / 2);
    for (i, a) in systems.iter().enumerate() {
        for b in &systems[i + 1..] {
            pairs.extend(SystemPair::new(&campaign.campaign_id, a, b));
        }
    }
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn campaign_with(systems: &[&str]) -> Campaign {
        let mut c = Campaign::new("c1", LanguagePair::new("en", "de"));
        c.segments.push(Segment {
            segment_id: "s1".into(),
            source_text: "x".into(),
            reference_text: Some("y".into()),
        });
        for s in systems {
            c.outputs.push(SystemOutput {
                system_id: (*s).into(),
                segment_id: "s1".into(),
                hypothesis_text: "y".into(),
            });
        }
        c
    }

    #[test]
    fn two_systems_give_one_pair() {
        let pairs = enumerate_pairs(&campaign_with(&["X", "Y"]));
        assert_eq!(pairs.len(), 1);
        assert_eq!((pairs[0].system_a.as_str(), pairs[0].system_b.as_str()), ("X", "Y"));
    }

    #[test]
    fn pair_counts_follow_k_choose_two() {
        for (k, expected) in [(2, 1), (3, 3), (4, 6), (5, 10)] {
            let names: Vec<String> = (0..k).map(|i| format!("sys{i}")).collect();
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            assert_eq!(enumerate_pairs(&campaign_with(&refs)).len(), expected);
        }
    }

    #[test]
    fn pairs_are_canonical() {
        let pairs = enumerate_pairs(&campaign_with(&["C", "A", "B"]));
        let got: Vec<(&str, &str)> = pairs
            .iter()
            .map(|p| (p.system_a.as_str(), p.system_b.as_str()))
            .collect();
        assert_eq!(got, vec![("A", "B"), ("A", "C"), ("B", "C")]);
    }

    #[test]
    fn same_system_is_not_a_pair() {
        assert!(SystemPair::new("c", "A", "A").is_none());
        assert_eq!(SystemPair::new("c", "B", "A"), SystemPair::new("c", "A", "B"));
    }

    #[test]
    fn segment_sets_average_to_system_level() {
        let mut per = BTreeMap::new();
        per.insert(
            "A".to_string(),
            BTreeMap::from([("s1".to_string(), 0.2), ("s2".to_string(), 0.4)]),
        );
        let set = MetricScoreSet {
            metric_name: "COMET".into(),
            orientation: Orientation::HigherBetter,
            scores: MetricScores::Segment(per),
        };
        assert!((set.system_score("A").unwrap() - 0.3).abs() < 1e-12);
        assert_eq!(set.segment_scores("A", &["s2", "s1"]), Some(vec![0.4, 0.2]));
        assert_eq!(set.system_score("B"), None);
    }

    #[test]
    fn error_metrics_default_to_lower_better() {
        assert_eq!(default_orientation("TER"), Orientation::LowerBetter);
        assert_eq!(default_orientation("CharacTER"), Orientation::LowerBetter);
        assert_eq!(default_orientation("COMET"), Orientation::HigherBetter);
    }
}
