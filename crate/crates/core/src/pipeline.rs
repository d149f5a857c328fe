//! End-to-end runs: the `compare` verdict and the full analysis bundle.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data_model::{
    enumerate_pairs, serialize_collection, Collection, Direction, ScriptClass, SubsetSpec, SystemPair,
    DEFAULT_ALPHAS,
};
use crate::error::{Error, Result};
use crate::metrics::{score_campaign, segment_stats, BuiltinMetric, MetricConfig};
use crate::pairwise::{
    accuracy_table, build_delta_records, delta_correlations, AccuracyTable, DeltaCorrelation, DeltaRecord,
    HumanTestConfig,
};
use crate::report::{
    format_p, render_accuracy_table, render_correlation_table, render_quadrant_table, RenderOptions,
};
use crate::stats::{
    bootstrap_accuracy_clusters, collect_segment_stats, metric_tests, paired_bootstrap_metric_test,
    quadrant_analysis, ClusterReport, ResampleConfig, Sidedness, StatsStore, DEFAULT_CLUSTER_RESAMPLES,
    DEFAULT_SEED, DEFAULT_SIGTEST_RESAMPLES,
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    /// SHA-256 of the canonical serialization of the input collection.
    pub collection_hash: String,
    pub seed: u64,
    pub alphas: Vec<f64>,
    pub cluster_resamples: usize,
    pub sigtest_resamples: usize,
    pub command_line: String,
    pub timestamp: String,
}

/// SHA-256 (hex) of the collection's canonical JSONL form.
pub fn collection_hash(collection: &Collection) -> String {
    let digest = Sha256::digest(serialize_collection(collection).as_bytes());
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

pub fn now_timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ABetter,
    BBetter,
    Tied,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::ABetter => "A-better",
            Self::BBetter => "B-better",
            Self::Tied => "tied",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareConfig {
    pub metric: BuiltinMetric,
    pub metric_cfg: MetricConfig,
    pub resample: ResampleConfig,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self {
            metric: BuiltinMetric::Bleu,
            metric_cfg: MetricConfig::default(),
            resample: ResampleConfig::sigtest(DEFAULT_SEED),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareResult {
    pub verdict: Verdict,
    pub p_value: f64,
    pub metric: String,
    /// Raw metric scores (TER as an edit rate, lower is better).
    pub score_a: f64,
    pub score_b: f64,
    pub n_segments: usize,
    pub n_resamples: usize,
    pub seed: u64,
    pub alpha: f64,
}

/// Scores two hypothesis files against one reference file and runs the
/// paired bootstrap. "tied" iff the difference is not significant at `alpha`.
pub fn cmd_compare(references: &[&str], hyp_a: &[&str], hyp_b: &[&str], cfg: &CompareConfig) -> Result<CompareResult> {
    if references.is_empty() || hyp_a.is_empty() || hyp_b.is_empty() {
        return Err(Error::Input("empty input file".into()));
    }
    if hyp_a.len() != references.len() || hyp_b.len() != references.len() {
        return Err(Error::Input(format!(
            "line counts differ: reference {}, A {}, B {}",
            references.len(),
            hyp_a.len(),
            hyp_b.len()
        )));
    }
    let a = segment_stats(cfg.metric, hyp_a, references, &cfg.metric_cfg)?;
    let b = segment_stats(cfg.metric, hyp_b, references, &cfg.metric_cfg)?;
    let t = paired_bootstrap_metric_test(&a, &b, &cfg.resample, Sidedness::TwoSided)?;
    let verdict = if !t.significant {
        Verdict::Tied
    } else if t.score_a > t.score_b {
        Verdict::ABetter
    } else {
        Verdict::BBetter
    };
    let orient = cfg.metric.orientation();
    Ok(CompareResult {
        verdict,
        p_value: t.outcome.p_value,
        metric: cfg.metric.name().to_owned(),
        score_a: orient.normalize(t.score_a),
        score_b: orient.normalize(t.score_b),
        n_segments: references.len(),
        n_resamples: t.n_resamples,
        seed: t.seed,
        alpha: cfg.resample.alpha,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// Metrics to evaluate; `None` = every metric present in the collection
    /// plus the built-in metrics wherever texts and references exist.
    pub metrics: Option<Vec<String>>,
    pub human: HumanTestConfig,
    pub metric_cfg: MetricConfig,
    /// Overrides the collection's alphas.
    pub alphas: Option<Vec<f64>>,
    pub seed: u64,
    /// 0 disables the tied-with-best bootstrap.
    pub cluster_resamples: usize,
    /// 0 disables the metric significance test and quadrant analysis.
    pub sigtest_resamples: usize,
    pub confidence: f64,
    /// Human alpha for the quadrant analysis.
    pub human_alpha: f64,
    /// Metric-test alpha.
    pub metric_alpha: f64,
    pub intersect_metrics: bool,
    pub render: RenderOptions,
    pub command_line: String,
    /// Fixed timestamp for reproducible bundles; `None` = now.
    pub timestamp: Option<String>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            metrics: None,
            human: HumanTestConfig::default(),
            metric_cfg: MetricConfig::default(),
            alphas: None,
            seed: DEFAULT_SEED,
            cluster_resamples: DEFAULT_CLUSTER_RESAMPLES,
            sigtest_resamples: DEFAULT_SIGTEST_RESAMPLES,
            confidence: 0.95,
            human_alpha: 0.05,
            metric_alpha: 0.05,
            intersect_metrics: false,
            render: RenderOptions::default(),
            command_line: String::new(),
            timestamp: None,
        }
    }
}

impl PipelineConfig {
    fn resample(&self, n: usize) -> ResampleConfig {
        ResampleConfig {
            n_resamples: n,
            seed: self.seed,
            confidence: self.confidence,
            alpha: self.metric_alpha,
        }
    }
}

/// One titled table of a bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub title: String,
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub manifest: RunManifest,
    pub notices: Vec<String>,
    pub sections: Vec<Section>,
}

impl ReportBundle {
    pub fn section(&self, title: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.title == title)
    }

    /// Single text document: manifest, notices, then every section.
    pub fn render(&self) -> String {
        let mut out = String::from("# mtpairs report\n\n## Run manifest\n\n```json\n");
        out.push_str(&serde_json::to_string_pretty(&self.manifest).unwrap_or_default());
        out.push_str("\n```\n");
        if !self.notices.is_empty() {
            out.push_str("\n## Notices\n\n");
            for n in &self.notices {
                let _ = writeln!(out, "- {n}");
            }
        }
        for s in &self.sections {
            let _ = write!(out, "\n## {}\n\n{}", s.title, s.body);
        }
        out
    }
}

pub const SECTION_SCORES: &str = "System scores";
pub const SECTION_ACCURACY: &str = "Pairwise accuracy by human significance";
pub const SECTION_SUBSETS: &str = "Pairwise accuracy by language subset";
pub const SECTION_GROUPS: &str = "Pairwise accuracy by group";
pub const SECTION_QUADRANTS: &str = "Metric significance vs human significance";
pub const SECTION_CORRELATIONS: &str = "Delta correlations";
pub const SECTION_SIGTESTS: &str = "Metric significance tests";

/// Adds built-in metric score sets to campaigns that have texts and
/// references but no stored scores for that metric.
pub fn score_builtin_metrics(collection: &mut Collection, metrics: &[BuiltinMetric], cfg: &MetricConfig) -> Result<usize> {
    let mut added = 0;
    for c in &mut collection.campaigns {
        if c.outputs.is_empty() || c.references().is_none() {
            continue;
        }
        for &m in metrics {
            if c.metric(m.name()).is_none() {
                let (set, _) = score_campaign(c, m, cfg)?;
                c.upsert_metric(set);
                added += 1;
            }
        }
    }
    Ok(added)
}

fn stage<T>(name: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Input(m) => Error::Input(format!("{name}: {m}")),
        other => other,
    })
}

/// Runs every analysis on `collection` and renders the tables.
///
/// Without human judgements only system scores and metric significance tests
/// are produced, with a notice saying so.
pub fn cmd_pipeline(collection: &Collection, cfg: &PipelineConfig) -> Result<ReportBundle> {
    let mut collection = collection.clone();
    let alphas = cfg.alphas.clone().unwrap_or_else(|| {
        if collection.manifest.alphas.is_empty() {
            DEFAULT_ALPHAS.to_vec()
        } else {
            collection.manifest.alphas.clone()
        }
    });
    collection.manifest.alphas = alphas.clone();
    let manifest = RunManifest {
        tool_version: TOOL_VERSION.to_owned(),
        collection_hash: collection_hash(&collection),
        seed: cfg.seed,
        alphas: alphas.clone(),
        cluster_resamples: cfg.cluster_resamples,
        sigtest_resamples: cfg.sigtest_resamples,
        command_line: cfg.command_line.clone(),
        timestamp: cfg.timestamp.clone().unwrap_or_else(now_timestamp),
    };

    let mut notices = Vec::new();
    let builtins: Vec<BuiltinMetric> = match &cfg.metrics {
        Some(ms) => ms.iter().filter_map(|m| BuiltinMetric::lookup(m)).collect(),
        None => BuiltinMetric::ALL.to_vec(),
    };
    stage("score", score_builtin_metrics(&mut collection, &builtins, &cfg.metric_cfg))?;
    let metrics: Vec<String> = match &cfg.metrics {
        Some(ms) => ms.clone(),
        None => collection.metric_names(),
    };
    let mut sections = vec![Section {
        title: SECTION_SCORES.to_owned(),
        body: render_system_scores(&collection, &metrics),
    }];

    let sig_cfg = cfg.resample(cfg.sigtest_resamples);
    let store = if cfg.sigtest_resamples > 0 {
        Some(stage("sigtest", collect_segment_stats(&collection, &metrics, &cfg.metric_cfg))?)
    } else {
        None
    };

    if !collection.has_judgements() {
        notices.push("collection has no human judgements: only system scores and metric significance tests are reported".to_owned());
        if let Some(store) = &store {
            let pairs: Vec<SystemPair> = collection.campaigns.iter().flat_map(enumerate_pairs).collect();
            sections.push(Section {
                title: SECTION_SIGTESTS.to_owned(),
                body: render_sigtests(store, &pairs, &metrics, &sig_cfg)?,
            });
        }
        return Ok(ReportBundle { manifest, notices, sections });
    }

    let records = stage(
        "human-test",
        build_delta_records(&collection, &metrics, &cfg.human, cfg.intersect_metrics, &mut notices),
    )?;

    // Accuracy by significance band.
    let table = accuracy_table(&records, &metrics, &alphas);
    sections.push(Section {
        title: SECTION_ACCURACY.to_owned(),
        body: accuracy_section(&records, &metrics, &table, cfg, &mut notices)?,
    });

    // Language subsets.
    let mut subset_cols: Vec<(String, SubsetSpec)> = Vec::new();
    for d in [Direction::IntoEnglish, Direction::FromEnglish, Direction::NonEnglish] {
        subset_cols.push((d.as_str().to_owned(), SubsetSpec { direction: Some(d), ..SubsetSpec::all() }));
    }
    for s in [ScriptClass::Latin, ScriptClass::NonLatin, ScriptClass::Logogram] {
        subset_cols.push((s.as_str().to_owned(), SubsetSpec { script: Some(s), ..SubsetSpec::all() }));
    }
    let table = AccuracyTable::build(&records, &metrics, &subset_cols, 0);
    sections.push(Section {
        title: SECTION_SUBSETS.to_owned(),
        body: accuracy_section(&records, &metrics, &table, cfg, &mut notices)?,
    });

    // Groups (e.g. campaign editions or domains) when tagged.
    let groups: BTreeSet<&str> = records.iter().map(|r| r.group.as_str()).filter(|g| !g.is_empty()).collect();
    if !groups.is_empty() {
        let cols: Vec<(String, SubsetSpec)> = groups
            .iter()
            .map(|g| ((*g).to_owned(), SubsetSpec { group: Some((*g).to_owned()), ..SubsetSpec::all() }))
            .collect();
        let table = AccuracyTable::build(&records, &metrics, &cols, 0);
        sections.push(Section {
            title: SECTION_GROUPS.to_owned(),
            body: accuracy_section(&records, &metrics, &table, cfg, &mut notices)?,
        });
    }

    if let Some(store) = &store {
        let pairs: Vec<SystemPair> = records.iter().map(|r| r.pair.clone()).collect();
        let mut reports = Vec::new();
        for m in &metrics {
            let tests = stage("sigtest", metric_tests(store, &pairs, m, &sig_cfg))?;
            if tests.is_empty() {
                notices.push(format!("metric '{m}' has no segment-level statistics; left out of the significance analysis"));
                continue;
            }
            reports.push(quadrant_analysis(&records, m, cfg.human_alpha, &tests));
        }
        reports.sort_by(|a, b| {
            b.accuracy_significant
                .unwrap_or(-1.0)
                .total_cmp(&a.accuracy_significant.unwrap_or(-1.0))
                .then_with(|| a.metric.cmp(&b.metric))
        });
        sections.push(Section {
            title: SECTION_QUADRANTS.to_owned(),
            body: render_quadrant_table(&reports, &cfg.render),
        });
    }

    let corr: Vec<(String, Option<DeltaCorrelation>)> = metrics
        .iter()
        .map(|m| match delta_correlations(&records, m, &SubsetSpec::all()) {
            Ok(c) => Ok((m.clone(), Some(c))),
            Err(e) if e.is_degenerate() => {
                notices.push(format!("correlation for '{m}' undefined: {e}"));
                Ok((m.clone(), None))
            }
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    sections.push(Section {
        title: SECTION_CORRELATIONS.to_owned(),
        body: render_correlation_table(&corr, &cfg.render),
    });

    Ok(ReportBundle { manifest, notices, sections })
}

fn accuracy_section(
    records: &[DeltaRecord],
    metrics: &[String],
    table: &AccuracyTable,
    cfg: &PipelineConfig,
    notices: &mut Vec<String>,
) -> Result<String> {
    let mut clusters: Vec<Option<ClusterReport>> = Vec::new();
    if cfg.cluster_resamples > 0 {
        let ccfg = cfg.resample(cfg.cluster_resamples);
        for col in &table.columns {
            match bootstrap_accuracy_clusters(records, metrics, &col.spec, &ccfg) {
                Ok(c) => clusters.push(Some(c)),
                Err(Error::EmptySubset(_)) => clusters.push(None),
                Err(e) => return Err(e),
            }
        }
    }
    let refs: Vec<Option<&ClusterReport>> = clusters.iter().map(Option::as_ref).collect();
    let partial = table.partial_metrics();
    if !partial.is_empty() {
        notices.push(format!(
            "metrics evaluated on fewer pairs than the human n: {}",
            partial.into_iter().collect::<Vec<_>>().join(", ")
        ));
    }
    render_accuracy_table(table, &refs, &cfg.render)
}

fn render_system_scores(collection: &Collection, metrics: &[String]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "| Campaign | System | {} |", metrics.join(" | "));
    let _ = writeln!(out, "|{}", "---|".repeat(metrics.len() + 2));
    for c in &collection.campaigns {
        for sys in c.systems() {
            let cells: Vec<String> = metrics
                .iter()
                .map(|m| {
                    c.metric(m)
                        .and_then(|set| set.system_score(&sys).map(|v| set.orientation.normalize(v)))
                        .map_or_else(|| "-".to_owned(), |v| format!("{v:.4}"))
                })
                .collect();
            let _ = writeln!(out, "| {} | {} | {} |", c.campaign_id, sys, cells.join(" | "));
        }
    }
    out
}

fn render_sigtests(store: &StatsStore, pairs: &[SystemPair], metrics: &[String], cfg: &ResampleConfig) -> Result<String> {
    let mut out = String::from("| Pair | Metric | Delta | p | Significant |\n|---|---|---|---|---|\n");
    let mut rows: BTreeMap<(SystemPair, String), String> = BTreeMap::new();
    for m in metrics {
        for (pair, t) in metric_tests(store, pairs, m, cfg)? {
            let line = format!(
                "| {} | {} | {:.4} | {} | {} |",
                pair,
                m,
                t.score_a - t.score_b,
                format_p(t.outcome.p_value),
                if t.significant { "yes" } else { "no" }
            );
            rows.insert((pair, m.clone()), line);
        }
    }
    for line in rows.values() {
        let _ = writeln!(out, "{line}");
    }
    Ok(out)
}
