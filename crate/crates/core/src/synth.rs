//! Random but realistic-looking collections for tests, demos and benchmarks.
//!
//! Each system has a latent quality. Hypotheses are references with a
//! quality-dependent share of tokens replaced, judgements are noisy functions
//! of quality, and two external metrics are attached: a segment-level
//! higher-better `SEG-QE` and a system-level lower-better `SYS-ERR`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data_model::{
    Campaign, Collection, Judgement, LanguagePair, Manifest, MetricScoreSet, MetricScores, Orientation,
    Segment, SystemOutput,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub max_campaigns: usize,
    pub max_systems: usize,
    pub max_segments: usize,
    /// Words per reference sentence (upper bound).
    pub max_words: usize,
    pub annotators: usize,
    /// Probability that a (system, segment, annotator) judgement is missing.
    pub drop_rate: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            max_campaigns: 20,
            max_systems: 4,
            max_segments: 50,
            max_words: 12,
            annotators: 3,
            drop_rate: 0.2,
        }
    }
}

const PAIRS: [(&str, &str); 10] = [
    ("de", "en"),
    ("en", "de"),
    ("cs", "en"),
    ("en", "zh"),
    ("ru", "en"),
    ("en", "ja"),
    ("de", "fr"),
    ("en", "ru"),
    ("fi", "en"),
    ("en", "cs"),
];

pub const SEGMENT_METRIC: &str = "SEG-QE";
pub const SYSTEM_METRIC: &str = "SYS-ERR";

/// Generates a valid collection; equal seeds give equal collections.
pub fn random_collection(seed: u64, cfg: &SynthConfig) -> Collection {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut manifest = Manifest::default();
    manifest.orientations.insert(SYSTEM_METRIC.to_owned(), Orientation::LowerBetter);
    let n_campaigns = rng.random_range(1..=cfg.max_campaigns.max(1));
    let campaigns = (0..n_campaigns).map(|i| random_campaign(&mut rng, i, cfg)).collect();
    Collection { manifest, campaigns }
}

fn random_campaign(rng: &mut ChaCha8Rng, index: usize, cfg: &SynthConfig) -> Campaign {
    let (src, tgt) = PAIRS[rng.random_range(0..PAIRS.len())];
    let mut c = Campaign::new(format!("c{index:02}"), LanguagePair::new(src, tgt));
    c.domain_tag = if rng.random_bool(0.5) { "news" } else { "talks" }.to_owned();
    c.group_tag = if rng.random_bool(0.5) { "incremental" } else { "independent" }.to_owned();
    let n_systems = rng.random_range(2..=cfg.max_systems.max(2));
    let n_segments = rng.random_range(1..=cfg.max_segments.max(1));
    let systems: Vec<(String, f64)> = (0..n_systems)
        .map(|s| (format!("sys{s}"), rng.random_range(0.0..1.0)))
        .collect();

    let mut seg_scores: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
    for g in 0..n_segments {
        let segment_id = format!("s{g:03}");
        let words = rng.random_range(1..=cfg.max_words.max(1));
        let reference: Vec<String> = (0..words).map(|_| format!("w{}", rng.random_range(0..40))).collect();
        let difficulty: f64 = rng.random_range(-10.0..10.0);
        c.segments.push(Segment {
            segment_id: segment_id.clone(),
            source_text: format!("src {g}"),
            reference_text: Some(reference.join(" ")),
        });
        for (sys, q) in &systems {
            let hyp: Vec<String> = reference
                .iter()
                .map(|w| {
                    if rng.random_bool(0.7 * (1.0 - q) + 0.05) {
                        format!("w{}", rng.random_range(0..40))
                    } else {
                        w.clone()
                    }
                })
                .collect();
            c.outputs.push(SystemOutput {
                system_id: sys.clone(),
                segment_id: segment_id.clone(),
                hypothesis_text: hyp.join(" "),
            });
            for a in 0..cfg.annotators {
                if rng.random_bool(cfg.drop_rate) {
                    continue;
                }
                let raw = 40.0 + 40.0 * q + difficulty + rng.random_range(-15.0..15.0);
                c.judgements.push(Judgement {
                    annotator_id: format!("r{a}"),
                    system_id: sys.clone(),
                    segment_id: segment_id.clone(),
                    score: raw.round().clamp(0.0, 100.0),
                });
            }
            seg_scores
                .entry(sys.clone())
                .or_default()
                .insert(segment_id.clone(), q + rng.random_range(-0.3..0.3));
        }
    }
    // Every system needs at least one judgement.
    for (sys, q) in &systems {
        if !c.judgements.iter().any(|j| &j.system_id == sys) {
            c.judgements.push(Judgement {
                annotator_id: "r0".into(),
                system_id: sys.clone(),
                segment_id: c.segments[0].segment_id.clone(),
                score: (40.0 + 40.0 * q).round(),
            });
        }
    }
    c.metric_scores.push(MetricScoreSet {
        metric_name: SEGMENT_METRIC.to_owned(),
        orientation: Orientation::HigherBetter,
        scores: MetricScores::Segment(seg_scores),
    });
    let sys_scores = systems
        .iter()
        .map(|(s, q)| (s.clone(), -((1.0 - q) * 50.0 + rng.random_range(-5.0..5.0))))
        .collect();
    c.metric_scores.push(MetricScoreSet {
        metric_name: SYSTEM_METRIC.to_owned(),
        orientation: Orientation::LowerBetter,
        scores: MetricScores::System(sys_scores),
    });
    c
}
