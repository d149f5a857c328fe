//! Ingestion of externally computed metric scores.
//!
//! Rows are JSONL objects `{metric_name, campaign_id, system_id, segment_id?, score}`.
//! Rows carrying a `segment_id` form a segment-level set; rows without form a
//! system-level set. A (campaign, metric) group may not mix the two.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::jsonl::external_score_set;
use super::{Collection, Granularity, Orientation};
use crate::error::{at_path, Error, LoadError, LoadErrorKind, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalScore {
    pub metric_name: String,
    pub campaign_id: String,
    pub system_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segment_id: Option<String>,
    pub score: f64,
}

/// Reads an external score file, returning rows with their 1-based line numbers.
pub fn read_external_scores(path: impl AsRef<Path>) -> Result<Vec<(usize, ExternalScore)>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(at_path(path))?;
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let row: ExternalScore = serde_json::from_str(raw).map_err(|e| {
            Error::Load(LoadError::new(
                LoadErrorKind::Schema,
                None,
                idx + 1,
                e.to_string(),
            ))
        })?;
        rows.push((idx + 1, row));
    }
    Ok(rows)
}

/// Attaches external scores to a collection, returning the extended collection.
///
/// Orientation comes from `orientations` when given, else from the manifest
/// (falling back to the built-in table of error metrics). Existing sets with
/// the same metric name are replaced.
pub fn ingest_external_scores(
    mut collection: Collection,
    rows: Vec<(usize, ExternalScore)>,
    orientations: &BTreeMap<String, Orientation>,
) -> Result<Collection> {
    type Key = (String, String);
    let mut groups: BTreeMap<Key, (usize, Option<Granularity>, Vec<(Option<String>, String, f64)>)> =
        BTreeMap::new();
    for (line, row) in rows {
        let granularity = if row.segment_id.is_some() {
            Granularity::Segment
        } else {
            Granularity::System
        };
        let entry = groups
            .entry((row.campaign_id.clone(), row.metric_name.clone()))
            .or_insert((line, None, Vec::new()));
        match entry.1 {
            Some(g) if g != granularity => {
                return Err(LoadError::new(
                    LoadErrorKind::Schema,
                    Some(&row.campaign_id),
                    line,
                    format!("metric '{}' mixes segment and system rows", row.metric_name),
                )
                .into())
            }
            _ => entry.1 = Some(granularity),
        }
        entry.2.push((row.segment_id, row.system_id, row.score));
    }

    for ((campaign_id, metric_name), (line, granularity, rows)) in groups {
        let orientation = orientations
            .get(&metric_name)
            .copied()
            .unwrap_or_else(|| collection.manifest.orientation(&metric_name));
        collection
            .manifest
            .orientations
            .insert(metric_name.clone(), orientation);
        let campaign = collection.campaign(&campaign_id).ok_or_else(|| {
            LoadError::new(
                LoadErrorKind::Reference,
                Some(&campaign_id),
                line,
                "score for unknown campaign",
            )
        })?;
        let mut replaced = campaign.clone();
        replaced.metric_scores.retain(|m| m.metric_name != metric_name);
        let set = external_score_set(
            &collection.manifest,
            &replaced,
            &metric_name,
            granularity.expect("group has rows"),
            Some(orientation),
            rows,
            line,
        )?;
        replaced.upsert_metric(set);
        *collection
            .campaign_mut(&campaign_id)
            .expect("campaign exists") = replaced;
    }
    Ok(collection)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data_model::parse_collection;

    fn base() -> Collection {
        parse_collection(
            r#"{"kind":"manifest","schema_version":1}
{"kind":"campaign","campaign_id":"c1","source_lang":"en","target_lang":"de"}
{"kind":"segment","campaign_id":"c1","segment_id":"s1","source_text":"a","reference_text":"b"}
{"kind":"segment","campaign_id":"c1","segment_id":"s2","source_text":"c","reference_text":"d"}
{"kind":"output","campaign_id":"c1","system_id":"A","segment_id":"s1","hypothesis_text":"b"}
{"kind":"output","campaign_id":"c1","system_id":"A","segment_id":"s2","hypothesis_text":"d"}
{"kind":"output","campaign_id":"c1","system_id":"B","segment_id":"s1","hypothesis_text":"x"}
{"kind":"output","campaign_id":"c1","system_id":"B","segment_id":"s2","hypothesis_text":"y"}"#,
        )
        .unwrap()
    }

    fn row(metric: &str, sys: &str, seg: Option<&str>, score: f64) -> ExternalScore {
        ExternalScore {
            metric_name: metric.into(),
            campaign_id: "c1".into(),
            system_id: sys.into(),
            segment_id: seg.map(str::to_owned),
            score,
        }
    }

    #[test]
    fn segment_rows_average_to_system_scores() {
        let rows = vec![
            (1, row("COMET", "A", Some("s1"), 0.5)),
            (2, row("COMET", "A", Some("s2"), 0.7)),
            (3, row("COMET", "B", Some("s1"), 0.1)),
            (4, row("COMET", "B", Some("s2"), 0.2)),
        ];
        let c = ingest_external_scores(base(), rows, &BTreeMap::new()).unwrap();
        let set = c.campaigns[0].metric("COMET").unwrap();
        assert_eq!(set.granularity(), Granularity::Segment);
        assert!((set.system_score("A").unwrap() - 0.6).abs() < 1e-12);
    }

    #[test]
    fn ter_rows_are_negated() {
        let rows = vec![(1, row("TER", "A", None, 0.42)), (2, row("TER", "B", None, 0.5))];
        let c = ingest_external_scores(base(), rows, &BTreeMap::new()).unwrap();
        assert_eq!(c.campaigns[0].metric("TER").unwrap().system_score("A"), Some(-0.42));
    }

    #[test]
    fn partial_segment_coverage_rejected() {
        let rows = vec![(1, row("COMET", "A", Some("s1"), 0.5))];
        let err = ingest_external_scores(base(), rows, &BTreeMap::new()).unwrap_err();
        assert!(matches!(err, Error::Load(ref e) if e.kind == LoadErrorKind::Coverage));
    }

    #[test]
    fn mixed_granularity_rejected() {
        let rows = vec![
            (1, row("X", "A", Some("s1"), 0.5)),
            (2, row("X", "B", None, 0.5)),
        ];
        assert!(ingest_external_scores(base(), rows, &BTreeMap::new()).is_err());
    }
}
