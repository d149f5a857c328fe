//! JSONL collection format.
//!
//! One JSON object per line, tagged by `kind`:
//!
//! ```text
//! {"kind":"manifest","schema_version":1,"alphas":[0.05,0.01,0.001],"orientations":{"TER":"lower-better"}}
//! {"kind":"campaign","campaign_id":"c1","source_lang":"de","target_lang":"en","domain":"news","group":"independent"}
//! {"kind":"segment","campaign_id":"c1","segment_id":"s1","source_text":"...","reference_text":"..."}
//! {"kind":"output","campaign_id":"c1","system_id":"A","segment_id":"s1","hypothesis_text":"..."}
//! {"kind":"judgement","campaign_id":"c1","annotator_id":"r1","system_id":"A","segment_id":"s1","score":71}
//! {"kind":"metric_scores","campaign_id":"c1","metric_name":"TER","granularity":"system","scores":[{"system_id":"A","score":0.42}]}
//! ```
//!
//! Scores in the file are raw; lower-better metrics are negated on load and
//! negated back on write.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{
    Campaign, Collection, Granularity, Judgement, LanguagePair, Manifest, MetricScoreSet,
    MetricScores, Orientation, Segment, SystemOutput,
};
use crate::error::{at_path, Error, LoadError, LoadErrorKind, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Record {
    Manifest(Manifest),
    Campaign(CampaignRecord),
    Segment(SegmentRecord),
    Output(OutputRecord),
    Judgement(JudgementRecord),
    MetricScores(MetricScoresRecord),
}

#[derive(Debug, Serialize, Deserialize)]
struct CampaignRecord {
    campaign_id: String,
    source_lang: String,
    target_lang: String,
    #[serde(default)]
    domain: String,
    #[serde(default)]
    group: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct SegmentRecord {
    campaign_id: String,
    segment_id: String,
    source_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reference_text: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct OutputRecord {
    campaign_id: String,
    system_id: String,
    segment_id: String,
    hypothesis_text: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct JudgementRecord {
    campaign_id: String,
    annotator_id: String,
    system_id: String,
    segment_id: String,
    score: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct MetricScoresRecord {
    campaign_id: String,
    metric_name: String,
    granularity: Granularity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    orientation: Option<Orientation>,
    scores: Vec<ScoreEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ScoreEntry {
    system_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    segment_id: Option<String>,
    score: f64,
}

pub fn load_collection(path: impl AsRef<Path>) -> Result<Collection> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(at_path(path))?;
    parse_collection(&text)
}

pub fn write_collection(collection: &Collection, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, serialize_collection(collection)).map_err(at_path(path))?;
    Ok(())
}

fn schema(campaign: Option<&str>, line: usize, msg: impl Into<String>) -> Error {
    LoadError::new(LoadErrorKind::Schema, campaign, line, msg).into()
}

fn reference(campaign: Option<&str>, line: usize, msg: impl Into<String>) -> Error {
    LoadError::new(LoadErrorKind::Reference, campaign, line, msg).into()
}

fn coverage(campaign: Option<&str>, line: usize, msg: impl Into<String>) -> Error {
    LoadError::new(LoadErrorKind::Coverage, campaign, line, msg).into()
}

struct Pending {
    campaign: Campaign,
    line: usize,
    segment_index: HashMap<String, usize>,
    output_keys: HashSet<(String, String)>,
    metric_lines: Vec<usize>,
}

/// Parses and validates a JSONL collection.
pub fn parse_collection(text: &str) -> Result<Collection> {
    let mut manifest: Option<Manifest> = None;
    let mut order: Vec<String> = Vec::new();
    let mut pending: HashMap<String, Pending> = HashMap::new();
    let mut children: Vec<(usize, Record)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(raw)
            .map_err(|e| schema(None, line, format!("invalid JSON: {e}")))?;
        let campaign_hint = value
            .get("campaign_id")
            .and_then(Value::as_str)
            .map(str::to_owned);
        let record: Record = serde_json::from_value(value)
            .map_err(|e| schema(campaign_hint.as_deref(), line, e.to_string()))?;
        match record {
            Record::Manifest(m) => {
                if manifest.is_some() {
                    return Err(schema(None, line, "duplicate manifest"));
                }
                if m.schema_version != SCHEMA_VERSION {
                    return Err(schema(
                        None,
                        line,
                        format!("unsupported schema_version {}", m.schema_version),
                    ));
                }
                if m.alphas.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
                    return Err(schema(None, line, "alpha levels must lie in (0, 1)"));
                }
                manifest = Some(m);
            }
            Record::Campaign(c) => {
                if pending.contains_key(&c.campaign_id) {
                    return Err(schema(Some(&c.campaign_id), line, "duplicate campaign_id"));
                }
                if c.source_lang.is_empty() || c.target_lang.is_empty() {
                    return Err(schema(Some(&c.campaign_id), line, "empty language code"));
                }
                let mut campaign =
                    Campaign::new(c.campaign_id.clone(), LanguagePair::new(c.source_lang, c.target_lang));
                campaign.domain_tag = c.domain;
                campaign.group_tag = c.group;
                order.push(c.campaign_id.clone());
                pending.insert(
                    c.campaign_id,
                    Pending {
                        campaign,
                        line,
                        segment_index: HashMap::new(),
                        output_keys: HashSet::new(),
                        metric_lines: Vec::new(),
                    },
                );
            }
            other => children.push((line, other)),
        }
    }
    let manifest = manifest.ok_or_else(|| schema(None, 0, "missing manifest record"))?;

    // Segments first so later records can be checked against them regardless of file order.
    children.sort_by_key(|(line, r)| {
        let rank = match r {
            Record::Segment(_) => 0,
            Record::Output(_) => 1,
            Record::Judgement(_) => 2,
            _ => 3,
        };
        (rank, *line)
    });

    for (line, record) in children {
        match record {
            Record::Segment(s) => {
                let p = lookup(&mut pending, &s.campaign_id, line)?;
                if s.source_text.is_empty() {
                    return Err(schema(Some(&s.campaign_id), line, "empty source_text"));
                }
                if p.segment_index.contains_key(&s.segment_id) {
                    return Err(schema(
                        Some(&s.campaign_id),
                        line,
                        format!("duplicate segment_id '{}'", s.segment_id),
                    ));
                }
                p.segment_index
                    .insert(s.segment_id.clone(), p.campaign.segments.len());
                p.campaign.segments.push(Segment {
                    segment_id: s.segment_id,
                    source_text: s.source_text,
                    reference_text: s.reference_text,
                });
            }
            Record::Output(o) => {
                let p = lookup(&mut pending, &o.campaign_id, line)?;
                if !p.segment_index.contains_key(&o.segment_id) {
                    return Err(reference(
                        Some(&o.campaign_id),
                        line,
                        format!("output for unknown segment '{}'", o.segment_id),
                    ));
                }
                if !p
                    .output_keys
                    .insert((o.system_id.clone(), o.segment_id.clone()))
                {
                    return Err(schema(
                        Some(&o.campaign_id),
                        line,
                        format!(
                            "duplicate output for system '{}' segment '{}'",
                            o.system_id, o.segment_id
                        ),
                    ));
                }
                p.campaign.outputs.push(SystemOutput {
                    system_id: o.system_id,
                    segment_id: o.segment_id,
                    hypothesis_text: o.hypothesis_text,
                });
            }
            Record::Judgement(j) => {
                let p = lookup(&mut pending, &j.campaign_id, line)?;
                if !(j.score.is_finite() && (0.0..=100.0).contains(&j.score)) {
                    return Err(schema(
                        Some(&j.campaign_id),
                        line,
                        format!("judgement score {} outside [0, 100]", j.score),
                    ));
                }
                if !p.segment_index.is_empty() && !p.segment_index.contains_key(&j.segment_id) {
                    return Err(reference(
                        Some(&j.campaign_id),
                        line,
                        format!("judgement for unknown segment '{}'", j.segment_id),
                    ));
                }
                if !p.output_keys.is_empty()
                    && !p
                        .output_keys
                        .contains(&(j.system_id.clone(), j.segment_id.clone()))
                {
                    return Err(reference(
                        Some(&j.campaign_id),
                        line,
                        format!(
                            "judgement for unknown system/segment '{}'/'{}'",
                            j.system_id, j.segment_id
                        ),
                    ));
                }
                p.campaign.judgements.push(Judgement {
                    annotator_id: j.annotator_id,
                    system_id: j.system_id,
                    segment_id: j.segment_id,
                    score: j.score,
                });
            }
            Record::MetricScores(m) => {
                let p = lookup(&mut pending, &m.campaign_id, line)?;
                let set = build_score_set(&manifest, &p.campaign, m, line)?;
                p.metric_lines.push(line);
                p.campaign.metric_scores.push(set);
            }
            Record::Manifest(_) | Record::Campaign(_) => unreachable!(),
        }
    }

    let mut campaigns = Vec::with_capacity(order.len());
    for id in order {
        let p = pending.remove(&id).expect("campaign registered");
        validate_campaign(&manifest, &p)?;
        campaigns.push(p.campaign);
    }
    Ok(Collection {
        manifest,
        campaigns,
    })
}

fn lookup<'a>(
    pending: &'a mut HashMap<String, Pending>,
    campaign_id: &str,
    line: usize,
) -> Result<&'a mut Pending> {
    pending
        .get_mut(campaign_id)
        .ok_or_else(|| reference(Some(campaign_id), line, "record for unknown campaign"))
}

fn build_score_set(
    manifest: &Manifest,
    campaign: &Campaign,
    m: MetricScoresRecord,
    line: usize,
) -> Result<MetricScoreSet> {
    let cid = m.campaign_id.as_str();
    if campaign.metric(&m.metric_name).is_some() {
        return Err(schema(
            Some(cid),
            line,
            format!("duplicate score set for metric '{}'", m.metric_name),
        ));
    }
    let declared = manifest.orientations.get(&m.metric_name).copied();
    let orientation = match (m.orientation, declared) {
        (Some(a), Some(b)) if a != b => {
            return Err(schema(
                Some(cid),
                line,
                format!("orientation of '{}' conflicts with manifest", m.metric_name),
            ))
        }
        (Some(a), _) => a,
        (None, Some(b)) => b,
        (None, None) => manifest.orientation(&m.metric_name),
    };
    let systems: BTreeSet<&str> = campaign.outputs.iter().map(|o| o.system_id.as_str()).collect();
    let segment_ids: HashSet<&str> = campaign.segment_ids().into_iter().collect();
    let mut per_segment: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
    let mut per_system: BTreeMap<String, f64> = BTreeMap::new();
    for entry in m.scores {
        if !entry.score.is_finite() {
            return Err(schema(Some(cid), line, "non-finite metric score"));
        }
        if !systems.is_empty() && !systems.contains(entry.system_id.as_str()) {
            return Err(reference(
                Some(cid),
                line,
                format!("score for unknown system '{}'", entry.system_id),
            ));
        }
        let value = orientation.normalize(entry.score);
        match (m.granularity, entry.segment_id) {
            (Granularity::Segment, Some(seg)) => {
                if !segment_ids.is_empty() && !segment_ids.contains(seg.as_str()) {
                    return Err(reference(
                        Some(cid),
                        line,
                        format!("score for unknown segment '{seg}'"),
                    ));
                }
                let slot = per_segment.entry(entry.system_id.clone()).or_default();
                if slot.insert(seg.clone(), value).is_some() {
                    return Err(schema(
                        Some(cid),
                        line,
                        format!("duplicate score for '{}'/'{seg}'", entry.system_id),
                    ));
                }
            }
            (Granularity::Segment, None) => {
                return Err(schema(
                    Some(cid),
                    line,
                    "segment-granularity score without segment_id",
                ))
            }
            (Granularity::System, Some(_)) => {
                return Err(schema(
                    Some(cid),
                    line,
                    "system-granularity score with segment_id",
                ))
            }
            (Granularity::System, None) => {
                if per_system.insert(entry.system_id.clone(), value).is_some() {
                    return Err(schema(
                        Some(cid),
                        line,
                        format!("duplicate score for '{}'", entry.system_id),
                    ));
                }
            }
        }
    }
    let scores = match m.granularity {
        Granularity::Segment => MetricScores::Segment(per_segment),
        Granularity::System => MetricScores::System(per_system),
    };
    Ok(MetricScoreSet {
        metric_name: m.metric_name,
        orientation,
        scores,
    })
}

fn validate_campaign(manifest: &Manifest, p: &Pending) -> Result<()> {
    let c = &p.campaign;
    let cid = Some(c.campaign_id.as_str());
    let systems = c.systems();
    if systems.len() < 2 {
        return Err(schema(
            cid,
            p.line,
            format!("campaign needs at least two systems, found {}", systems.len()),
        ));
    }
    let n_segments = c.segments.len();
    if !c.outputs.is_empty() {
        for s in &systems {
            let covered = p.output_keys.iter().filter(|(sys, _)| sys == s).count();
            if covered != n_segments {
                return Err(coverage(
                    cid,
                    p.line,
                    format!("system '{s}' has outputs for {covered} of {n_segments} segments"),
                ));
            }
        }
    }
    for (set, &line) in c.metric_scores.iter().zip(&p.metric_lines) {
        check_set_coverage(c, set, line)?;
    }
    if c.segments.iter().any(|s| s.reference_text.is_none()) {
        if let Some((set, &line)) = c
            .metric_scores
            .iter()
            .zip(&p.metric_lines)
            .find(|(set, _)| !manifest.is_reference_free(&set.metric_name))
        {
            return Err(schema(
                cid,
                line,
                format!(
                    "metric '{}' needs references but some segments have none",
                    set.metric_name
                ),
            ));
        }
    }
    Ok(())
}

fn check_set_coverage(c: &Campaign, set: &MetricScoreSet, line: usize) -> Result<()> {
    let n_segments = c.segments.len();
    if let MetricScores::Segment(per) = &set.scores {
        for (sys, segs) in per {
            if n_segments > 0 && segs.len() != n_segments {
                return Err(coverage(
                    Some(&c.campaign_id),
                    line,
                    format!(
                        "metric '{}' scores {} of {n_segments} segments for system '{sys}'",
                        set.metric_name,
                        segs.len()
                    ),
                ));
            }
        }
    }
    Ok(())
}

/// Validates an externally supplied score set against a loaded campaign.
/// `line` locates the first row of the set in its source file.
pub(crate) fn external_score_set(
    manifest: &Manifest,
    campaign: &Campaign,
    metric_name: &str,
    granularity: Granularity,
    orientation: Option<Orientation>,
    rows: Vec<(Option<String>, String, f64)>,
    line: usize,
) -> Result<MetricScoreSet> {
    let record = MetricScoresRecord {
        campaign_id: campaign.campaign_id.clone(),
        metric_name: metric_name.to_owned(),
        granularity,
        orientation,
        scores: rows
            .into_iter()
            .map(|(segment_id, system_id, score)| ScoreEntry {
                system_id,
                segment_id,
                score,
            })
            .collect(),
    };
    let set = build_score_set(manifest, campaign, record, line)?;
    check_set_coverage(campaign, &set, line)?;
    if campaign.segments.iter().any(|s| s.reference_text.is_none())
        && !manifest.is_reference_free(metric_name)
    {
        return Err(schema(
            Some(&campaign.campaign_id),
            line,
            format!("metric '{metric_name}' needs references but some segments have none"),
        ));
    }
    Ok(set)
}

fn line<T: Serialize>(out: &mut String, record: &T) {
    out.push_str(&serde_json::to_string(record).expect("records serialize"));
    out.push('\n');
}

/// Writes a collection back to JSONL, restoring raw score orientation.
pub fn serialize_collection(collection: &Collection) -> String {
    let mut out = String::new();
    line(&mut out, &Record::Manifest(collection.manifest.clone()));
    for c in &collection.campaigns {
        let cid = &c.campaign_id;
        line(
            &mut out,
            &Record::Campaign(CampaignRecord {
                campaign_id: cid.clone(),
                source_lang: c.language_pair.source.clone(),
                target_lang: c.language_pair.target.clone(),
                domain: c.domain_tag.clone(),
                group: c.group_tag.clone(),
            }),
        );
        for s in &c.segments {
            line(
                &mut out,
                &Record::Segment(SegmentRecord {
                    campaign_id: cid.clone(),
                    segment_id: s.segment_id.clone(),
                    source_text: s.source_text.clone(),
                    reference_text: s.reference_text.clone(),
                }),
            );
        }
        for o in &c.outputs {
            line(
                &mut out,
                &Record::Output(OutputRecord {
                    campaign_id: cid.clone(),
                    system_id: o.system_id.clone(),
                    segment_id: o.segment_id.clone(),
                    hypothesis_text: o.hypothesis_text.clone(),
                }),
            );
        }
        for j in &c.judgements {
            line(
                &mut out,
                &Record::Judgement(JudgementRecord {
                    campaign_id: cid.clone(),
                    annotator_id: j.annotator_id.clone(),
                    system_id: j.system_id.clone(),
                    segment_id: j.segment_id.clone(),
                    score: j.score,
                }),
            );
        }
        for set in &c.metric_scores {
            let raw = |v: f64| set.orientation.normalize(v);
            let scores = match &set.scores {
                MetricScores::Segment(per) => per
                    .iter()
                    .flat_map(|(sys, segs)| {
                        segs.iter().map(move |(seg, v)| ScoreEntry {
                            system_id: sys.clone(),
                            segment_id: Some(seg.clone()),
                            score: raw(*v),
                        })
                    })
                    .collect(),
                MetricScores::System(per) => per
                    .iter()
                    .map(|(sys, v)| ScoreEntry {
                        system_id: sys.clone(),
                        segment_id: None,
                        score: raw(*v),
                    })
                    .collect(),
            };
            line(
                &mut out,
                &Record::MetricScores(MetricScoresRecord {
                    campaign_id: cid.clone(),
                    metric_name: set.metric_name.clone(),
                    granularity: set.granularity(),
                    orientation: Some(set.orientation),
                    scores,
                }),
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = r#"{"kind":"manifest","schema_version":1,"orientations":{"TER":"lower-better"}}"#;

    fn campaign_lines(id: &str) -> String {
        format!(
            r#"{{"kind":"campaign","campaign_id":"{id}","source_lang":"de","target_lang":"en","domain":"news","group":"independent"}}
{{"kind":"segment","campaign_id":"{id}","segment_id":"s1","source_text":"Hallo","reference_text":"Hello"}}
{{"kind":"output","campaign_id":"{id}","system_id":"A","segment_id":"s1","hypothesis_text":"Hello"}}
{{"kind":"output","campaign_id":"{id}","system_id":"B","segment_id":"s1","hypothesis_text":"Hi"}}
{{"kind":"judgement","campaign_id":"{id}","annotator_id":"r1","system_id":"A","segment_id":"s1","score":80}}
{{"kind":"judgement","campaign_id":"{id}","annotator_id":"r1","system_id":"B","segment_id":"s1","score":60}}
{{"kind":"metric_scores","campaign_id":"{id}","metric_name":"TER","granularity":"system","scores":[{{"system_id":"A","score":0.42}},{{"system_id":"B","score":0.5}}]}}
"#
        )
    }

    fn two_campaigns() -> String {
        format!("{HEADER}\n{}{}", campaign_lines("c1"), campaign_lines("c2"))
    }

    #[test]
    fn loads_two_campaigns() {
        let c = parse_collection(&two_campaigns()).unwrap();
        assert_eq!(c.campaigns.len(), 2);
        assert_eq!(c.campaigns[0].systems(), vec!["A", "B"]);
        assert_eq!(c.campaigns[1].judgements.len(), 2);
    }

    #[test]
    fn lower_better_scores_are_negated() {
        let c = parse_collection(&two_campaigns()).unwrap();
        let ter = c.campaigns[0].metric("TER").unwrap();
        assert_eq!(ter.system_score("A"), Some(-0.42));
        assert_eq!(ter.orientation, Orientation::LowerBetter);
    }

    #[test]
    fn roundtrip_is_identity() {
        let c = parse_collection(&two_campaigns()).unwrap();
        let again = parse_collection(&serialize_collection(&c)).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn out_of_range_judgement_names_record() {
        let text = two_campaigns().replace(r#""score":80"#, r#""score":101"#);
        let err = parse_collection(&text).unwrap_err();
        match err {
            Error::Load(e) => {
                assert_eq!(e.kind, LoadErrorKind::Schema);
                assert_eq!(e.campaign_id.as_deref(), Some("c1"));
                assert_eq!(e.record, 6);
                assert!(e.message.contains("101"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_system_in_judgement_is_referential() {
        let text = two_campaigns().replacen(
            r#""system_id":"B","segment_id":"s1","score":60"#,
            r#""system_id":"Z","segment_id":"s1","score":60"#,
            1,
        );
        let err = parse_collection(&text).unwrap_err();
        assert!(matches!(err, Error::Load(ref e) if e.kind == LoadErrorKind::Reference), "{err}");
    }

    #[test]
    fn missing_output_is_coverage_violation() {
        let text = format!(
            "{HEADER}\n{}{}",
            campaign_lines("c1"),
            r#"{"kind":"segment","campaign_id":"c1","segment_id":"s2","source_text":"x","reference_text":"y"}"#
        );
        let err = parse_collection(&text).unwrap_err();
        assert!(matches!(err, Error::Load(ref e) if e.kind == LoadErrorKind::Coverage), "{err}");
    }

    #[test]
    fn mistyped_field_is_schema_violation() {
        let text = two_campaigns().replacen(r#""score":80"#, r#""score":"eighty""#, 1);
        let err = parse_collection(&text).unwrap_err();
        assert!(matches!(err, Error::Load(ref e) if e.kind == LoadErrorKind::Schema && e.record == 6));
    }

    #[test]
    fn single_system_campaign_rejected() {
        let text = format!(
            "{HEADER}\n{}",
            r#"{"kind":"campaign","campaign_id":"c1","source_lang":"de","target_lang":"en"}
{"kind":"segment","campaign_id":"c1","segment_id":"s1","source_text":"x","reference_text":"y"}
{"kind":"output","campaign_id":"c1","system_id":"A","segment_id":"s1","hypothesis_text":"y"}"#
        );
        assert!(parse_collection(&text).is_err());
    }

    #[test]
    fn missing_reference_requires_reference_free_metrics() {
        let body = r#"{"kind":"campaign","campaign_id":"c1","source_lang":"de","target_lang":"en"}
{"kind":"segment","campaign_id":"c1","segment_id":"s1","source_text":"x"}
{"kind":"output","campaign_id":"c1","system_id":"A","segment_id":"s1","hypothesis_text":"y"}
{"kind":"output","campaign_id":"c1","system_id":"B","segment_id":"s1","hypothesis_text":"z"}
{"kind":"metric_scores","campaign_id":"c1","metric_name":"METRIC","granularity":"system","scores":[{"system_id":"A","score":1},{"system_id":"B","score":2}]}"#;
        let strict = format!("{HEADER}\n{body}");
        assert!(parse_collection(&strict).is_err());
        let declared = format!(
            "{}\n{body}",
            r#"{"kind":"manifest","schema_version":1,"reference_free":["METRIC"]}"#
        );
        assert!(parse_collection(&declared).is_ok());
        let qe = format!("{HEADER}\n{}", body.replace("METRIC", "COMET-src"));
        assert!(parse_collection(&qe).is_ok());
    }

    #[test]
    fn orientation_conflict_rejected() {
        let text = two_campaigns().replacen(
            r#""granularity":"system","#,
            r#""granularity":"system","orientation":"higher-better","#,
            1,
        );
        assert!(parse_collection(&text).is_err());
    }

    #[test]
    fn missing_manifest_rejected() {
        assert!(parse_collection(&campaign_lines("c1")).is_err());
    }
}
