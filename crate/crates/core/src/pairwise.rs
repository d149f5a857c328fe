//! System-pair deltas, pairwise ranking accuracy and delta correlations.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::data_model::{
    enumerate_pairs, filter_pairs, Collection, Direction, LanguagePair, PBand, ScriptClass,
    SubsetSpec, SystemPair,
};
use crate::error::{Error, Result};
use crate::human_eval::{
    human_system_score, paired_differences, wilcoxon_signed_rank, MatchingMode, TestOutcome,
    WilcoxonConfig, average_ranks,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaRecord {
    pub pair: SystemPair,
    /// mean human score of system_a minus that of system_b.
    pub human_delta: f64,
    pub human_p: f64,
    /// Orientation-normalized metric score of system_a minus system_b.
    pub metric_deltas: BTreeMap<String, f64>,
    pub language_pair: LanguagePair,
    pub direction: Direction,
    pub script: Option<ScriptClass>,
    pub domain: String,
    pub group: String,
}

impl DeltaRecord {
    /// The same pair with system order reversed.
    pub fn reversed(&self) -> Self {
        let mut r = self.clone();
        std::mem::swap(&mut r.pair.system_a, &mut r.pair.system_b);
        r.human_delta = -r.human_delta;
        for v in r.metric_deltas.values_mut() {
            *v = -*v;
        }
        r
    }

    /// Whether the metric delta has the same sign as the human delta; `None` if
    /// the metric was not scored for this pair.
    pub fn agrees(&self, metric: &str) -> Option<bool> {
        self.metric_deltas
            .get(metric)
            .map(|d| sign(*d) == sign(self.human_delta))
    }
}

/// Sign with sign(0) = 0 (also for -0.0).
pub fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HumanTestConfig {
    pub matching: MatchingMode,
    pub wilcoxon: WilcoxonConfig,
}

/// Human-side comparison of one system pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairHumanTest {
    pub pair: SystemPair,
    pub human_delta: f64,
    pub outcome: TestOutcome,
    pub n_units: usize,
    pub unmatched: usize,
}

/// Wilcoxon test on every pair of every judged campaign.
/// Pairs without matched units get a degenerate outcome (p = 1) and a warning.
pub fn human_tests(
    collection: &Collection,
    cfg: &HumanTestConfig,
    warnings: &mut Vec<String>,
) -> Result<Vec<PairHumanTest>> {
    let mut out = Vec::new();
    for campaign in &collection.campaigns {
        if !campaign.has_judgements() {
            warnings.push(format!(
                "campaign '{}' has no human judgements; skipped",
                campaign.campaign_id
            ));
            continue;
        }
        for pair in enumerate_pairs(campaign) {
            let a = human_system_score(campaign, &pair.system_a)?;
            let b = human_system_score(campaign, &pair.system_b)?;
            let (mut outcome, n_units, unmatched) =
                match paired_differences(campaign, &pair, cfg.matching) {
                    Ok(d) => (wilcoxon_signed_rank(&d.diffs, &cfg.wilcoxon), d.diffs.len(), d.unmatched),
                    Err(Error::NoMatchedUnits { .. }) => {
                        warnings.push(format!("pair {pair}: no matched judgement units, p set to 1"));
                        (
                            TestOutcome::new(1.0, 0.0, crate::human_eval::TestMethod::Degenerate, "no matched units".into()),
                            0,
                            0,
                        )
                    }
                    Err(e) => return Err(e),
                };
            outcome.set_alphas(&collection.manifest.alphas);
            out.push(PairHumanTest {
                human_delta: a.mean_score - b.mean_score,
                pair,
                outcome,
                n_units,
                unmatched,
            });
        }
    }
    Ok(out)
}

/// Builds one delta record per system pair of every judged campaign.
///
/// A metric missing for either system of a pair is left out of that record
/// (with a warning). With `intersect`, records missing any of `metrics` are
/// dropped entirely so every metric is evaluated on the same pairs.
pub fn build_delta_records(
    collection: &Collection,
    metrics: &[String],
    cfg: &HumanTestConfig,
    intersect: bool,
    warnings: &mut Vec<String>,
) -> Result<Vec<DeltaRecord>> {
    let tests = human_tests(collection, cfg, warnings)?;
    let mut records = Vec::with_capacity(tests.len());
    for t in tests {
        let campaign = collection
            .campaign(&t.pair.campaign_id)
            .expect("tested pair belongs to collection");
        let mut metric_deltas = BTreeMap::new();
        for m in metrics {
            let scores = campaign.metric(m).and_then(|set| {
                Some((set.system_score(&t.pair.system_a)?, set.system_score(&t.pair.system_b)?))
            });
            match scores {
                Some((a, b)) => {
                    metric_deltas.insert(m.clone(), a - b);
                }
                None => warnings.push(format!("pair {}: no '{m}' score; excluded for that metric", t.pair)),
            }
        }
        if intersect && metric_deltas.len() < metrics.len() {
            continue;
        }
        let lp = campaign.language_pair.clone();
        records.push(DeltaRecord {
            pair: t.pair,
            human_delta: t.human_delta,
            human_p: t.outcome.p_value,
            metric_deltas,
            direction: lp.direction(),
            script: lp.target_script(),
            language_pair: lp,
            domain: campaign.domain_tag.clone(),
            group: campaign.group_tag.clone(),
        });
    }
    Ok(records)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyResult {
    pub metric_name: String,
    pub n_pairs: usize,
    pub n_agree: usize,
    pub accuracy: f64,
}

/// Fraction of pairs in `subset` whose metric delta sign equals the human delta sign.
pub fn accuracy(records: &[DeltaRecord], metric: &str, subset: &SubsetSpec) -> Result<AccuracyResult> {
    let selected = filter_pairs(records, subset);
    accuracy_of(&selected, metric).ok_or_else(|| Error::EmptySubset(format!("{subset} for {metric}")))
}

/// Accuracy over already-selected records; `None` when no record has the metric.
pub fn accuracy_of(records: &[DeltaRecord], metric: &str) -> Option<AccuracyResult> {
    let (n_pairs, n_agree) = records
        .iter()
        .filter_map(|r| r.agrees(metric))
        .fold((0, 0), |(n, k), a| (n + 1, k + usize::from(a)));
    (n_pairs > 0).then(|| AccuracyResult {
        metric_name: metric.to_owned(),
        n_pairs,
        n_agree,
        accuracy: n_agree as f64 / n_pairs as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaCorrelation {
    pub pearson: f64,
    pub spearman: f64,
    pub n: usize,
}

pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ConstantDeltas);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Spearman's rho: Pearson over average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    pearson(&average_ranks(x), &average_ranks(y))
}

/// Pearson and Spearman correlation of (metric delta, human delta) points.
pub fn delta_correlations(
    records: &[DeltaRecord],
    metric: &str,
    subset: &SubsetSpec,
) -> Result<DeltaCorrelation> {
    let (x, y): (Vec<f64>, Vec<f64>) = filter_pairs(records, subset)
        .iter()
        .filter_map(|r| r.metric_deltas.get(metric).map(|d| (*d, r.human_delta)))
        .unzip();
    if x.len() < 3 {
        return Err(Error::TooFewRecords { needed: 3, got: x.len() });
    }
    Ok(DeltaCorrelation {
        pearson: pearson(&x, &y)?,
        spearman: spearman(&x, &y)?,
        n: x.len(),
    })
}

/// Order-sensitive fingerprint of the pairs in a subset (FNV-1a).
pub fn subset_fingerprint(records: &[DeltaRecord]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for r in records {
        for part in [&r.pair.campaign_id, &r.pair.system_a, &r.pair.system_b] {
            for b in part.bytes().chain(std::iter::once(0xff)) {
                h ^= u64::from(b);
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        }
    }
    h
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableColumn {
    pub label: String,
    pub spec: SubsetSpec,
    /// Pairs in the subset (human side).
    pub n: usize,
    pub fingerprint: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub metric: String,
    pub cells: Vec<Option<AccuracyResult>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyTable {
    pub columns: Vec<TableColumn>,
    pub rows: Vec<TableRow>,
}

/// Columns All, one per alpha (p <= alpha), and Within (strictest < p <= loosest).
pub fn significance_columns(alphas: &[f64]) -> Vec<(String, SubsetSpec)> {
    let mut cols = vec![("All".to_owned(), SubsetSpec::all())];
    for &a in alphas {
        cols.push((a.to_string(), SubsetSpec::all().with_band(PBand::significant(a))));
    }
    let hi = alphas.iter().copied().max_by(f64::total_cmp);
    let lo = alphas.iter().copied().min_by(f64::total_cmp);
    if let (Some(hi), Some(lo)) = (hi, lo) {
        if lo < hi {
            cols.push(("Within".to_owned(), SubsetSpec::all().with_band(PBand::within(lo, hi))));
        }
    }
    cols
}

impl AccuracyTable {
    /// Accuracy of every metric in every column; rows sorted by `sort_column`
    /// descending (ties by the remaining columns left to right, then name).
    pub fn build(
        records: &[DeltaRecord],
        metrics: &[String],
        columns: &[(String, SubsetSpec)],
        sort_column: usize,
    ) -> Self {
        let subsets: Vec<Vec<DeltaRecord>> = columns.iter().map(|(_, s)| filter_pairs(records, s)).collect();
        let columns: Vec<TableColumn> = columns
            .iter()
            .zip(&subsets)
            .map(|((label, spec), sub)| TableColumn {
                label: label.clone(),
                spec: spec.clone(),
                n: sub.len(),
                fingerprint: subset_fingerprint(sub),
            })
            .collect();
        let mut rows: Vec<TableRow> = metrics
            .iter()
            .map(|m| TableRow {
                metric: m.clone(),
                cells: subsets.iter().map(|sub| accuracy_of(sub, m)).collect(),
            })
            .collect();
        let key = |row: &TableRow, c: usize| row.cells.get(c).and_then(|x| x.as_ref()).map_or(-1.0, |a| a.accuracy);
        let order: Vec<usize> = std::iter::once(sort_column)
            .chain((0..columns.len()).filter(|&c| c != sort_column))
            .collect();
        rows.sort_by(|a, b| {
            for &c in &order {
                let o = key(b, c).total_cmp(&key(a, c));
                if o.is_ne() {
                    return o;
                }
            }
            a.metric.cmp(&b.metric)
        });
        Self { columns, rows }
    }

    /// Metrics whose per-column n differs from the column's pair count.
    pub fn partial_metrics(&self) -> BTreeSet<String> {
        self.rows
            .iter()
            .filter(|r| {
                r.cells
                    .iter()
                    .zip(&self.columns)
                    .any(|(cell, col)| cell.as_ref().map_or(0, |a| a.n_pairs) != col.n)
            })
            .map(|r| r.metric.clone())
            .collect()
    }
}

/// Table with columns All / each alpha / Within, sorted on the first alpha column.
pub fn accuracy_table(records: &[DeltaRecord], metrics: &[String], alphas: &[f64]) -> AccuracyTable {
    let columns = significance_columns(alphas);
    let sort = if alphas.is_empty() { 0 } else { 1 };
    AccuracyTable::build(records, metrics, &columns, sort)
}

/// One scatter point: (metric delta, human delta, direction).
pub fn scatter_points(records: &[DeltaRecord], metric: &str) -> Vec<(f64, f64, Direction)> {
    records
        .iter()
        .filter_map(|r| r.metric_deltas.get(metric).map(|d| (*d, r.human_delta, r.direction)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data_model::parse_collection;

    pub(crate) fn rec(id: usize, human: f64, metric: f64, p: f64) -> DeltaRecord {
        let lp = LanguagePair::new("en", "de");
        DeltaRecord {
            pair: SystemPair::new(&format!("c{id}"), "A", "B").unwrap(),
            human_delta: human,
            human_p: p,
            metric_deltas: BTreeMap::from([("M".to_owned(), metric)]),
            direction: lp.direction(),
            script: lp.target_script(),
            language_pair: lp,
            domain: String::new(),
            group: String::new(),
        }
    }

    #[test]
    fn hand_counted_accuracy() {
        let recs = vec![
            rec(0, 2.0, 1.0, 0.5),
            rec(1, -3.0, 0.5, 0.5),
            rec(2, 1.0, 1.0, 0.5),
            rec(3, -1.0, -2.0, 0.5),
        ];
        let a = accuracy(&recs, "M", &SubsetSpec::all()).unwrap();
        assert_eq!((a.n_agree, a.n_pairs), (3, 4));
        assert_eq!(a.accuracy, 0.75);
    }

    #[test]
    fn identical_deltas_are_fully_accurate() {
        let recs: Vec<_> = (0..5).map(|i| rec(i, i as f64 - 2.0, i as f64 - 2.0, 0.5)).collect();
        assert_eq!(accuracy(&recs, "M", &SubsetSpec::all()).unwrap().accuracy, 1.0);
    }

    #[test]
    fn zero_metric_delta_only_agrees_with_zero_human_delta() {
        assert_eq!(rec(0, 1.0, 0.0, 0.5).agrees("M"), Some(false));
        assert_eq!(rec(0, 0.0, 0.0, 0.5).agrees("M"), Some(true));
        assert_eq!(rec(0, 0.0, -0.0, 0.5).agrees("M"), Some(true));
        assert_eq!(rec(0, 0.0, 0.0, 0.5).agrees("X"), None);
    }

    #[test]
    fn empty_subset_is_error() {
        let recs = vec![rec(0, 1.0, 1.0, 0.5)];
        let spec: SubsetSpec = "alpha=0.05".parse().unwrap();
        assert!(matches!(accuracy(&recs, "M", &spec), Err(Error::EmptySubset(_))));
    }

    #[test]
    fn correlations() {
        let recs: Vec<_> = [1.0, -2.0, 3.0, 0.5].iter().enumerate().map(|(i, &d)| rec(i, d, d, 0.5)).collect();
        let c = delta_correlations(&recs, "M", &SubsetSpec::all()).unwrap();
        assert!((c.pearson - 1.0).abs() < 1e-12 && (c.spearman - 1.0).abs() < 1e-12);
        let recs: Vec<_> = [1.0, -2.0, 3.0, 0.5].iter().enumerate().map(|(i, &d)| rec(i, d, -d, 0.5)).collect();
        let c = delta_correlations(&recs, "M", &SubsetSpec::all()).unwrap();
        assert!((c.pearson + 1.0).abs() < 1e-12 && (c.spearman + 1.0).abs() < 1e-12);
        let flat: Vec<_> = (0..4).map(|i| rec(i, i as f64, 1.0, 0.5)).collect();
        assert!(matches!(delta_correlations(&flat, "M", &SubsetSpec::all()), Err(Error::ConstantDeltas)));
    }

    #[test]
    fn table_columns_and_sorting() {
        let mut recs = vec![
            rec(0, 1.0, 1.0, 0.0001),
            rec(1, 1.0, -1.0, 0.02),
            rec(2, -1.0, -1.0, 0.3),
        ];
        for r in &mut recs {
            let h = r.human_delta;
            r.metric_deltas.insert("Human".into(), h);
        }
        let t = accuracy_table(&recs, &["M".into(), "Human".into()], &[0.05, 0.01, 0.001]);
        let labels: Vec<&str> = t.columns.iter().map(|c| c.label.as_str()).collect();
        assert_eq!(labels, vec!["All", "0.05", "0.01", "0.001", "Within"]);
        let ns: Vec<usize> = t.columns.iter().map(|c| c.n).collect();
        assert_eq!(ns, vec![3, 2, 1, 1, 1]);
        assert_eq!(t.rows[0].metric, "Human");
        assert!(t.rows[0].cells.iter().all(|c| c.as_ref().unwrap().accuracy == 1.0));
        assert!(t.partial_metrics().is_empty());
    }

    #[test]
    fn builds_records_from_collection() {
        let text = r#"{"kind":"manifest","schema_version":1}
{"kind":"campaign","campaign_id":"c1","source_lang":"de","target_lang":"en"}
{"kind":"judgement","campaign_id":"c1","annotator_id":"r","system_id":"A","segment_id":"s1","score":70}
{"kind":"judgement","campaign_id":"c1","annotator_id":"r","system_id":"B","segment_id":"s1","score":65}
{"kind":"judgement","campaign_id":"c1","annotator_id":"r","system_id":"C","segment_id":"s1","score":65}
{"kind":"metric_scores","campaign_id":"c1","metric_name":"BLEU","granularity":"system","scores":[{"system_id":"A","score":30},{"system_id":"B","score":28},{"system_id":"C","score":28}]}"#;
        let c = parse_collection(text).unwrap();
        let mut w = Vec::new();
        let recs = build_delta_records(&c, &["BLEU".into()], &HumanTestConfig::default(), false, &mut w).unwrap();
        assert_eq!(recs.len(), 3);
        assert_eq!(recs[0].human_delta, 5.0);
        assert_eq!(recs[0].metric_deltas["BLEU"], 2.0);
        assert_eq!(recs[2].metric_deltas["BLEU"], 0.0);
        assert_eq!(recs[0].direction, Direction::IntoEnglish);
        assert!(w.is_empty());

        let recs = build_delta_records(&c, &["BLEU".into(), "COMET".into()], &HumanTestConfig::default(), true, &mut w).unwrap();
        assert!(recs.is_empty());
        assert!(!w.is_empty());
    }

    #[test]
    fn reversal_negates_and_keeps_agreement() {
        let r = rec(0, 2.0, -1.0, 0.1);
        let rev = r.reversed();
        assert_eq!(rev.human_delta, -2.0);
        assert_eq!(rev.metric_deltas["M"], 1.0);
        assert_eq!(r.agrees("M"), rev.agrees("M"));
    }
}
