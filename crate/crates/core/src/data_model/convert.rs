//! Converter from a flat TSV layout to a [`Collection`].
//!
//! Expected files in the directory (header row required, tab-separated):
//!
//! * `judgements.tsv`: campaign_id, source_lang, target_lang, domain, group,
//!   annotator_id, system_id, segment_id, score
//! * `segments.tsv` (optional): campaign_id, segment_id, source_text, reference_text
//! * `outputs.tsv` (optional): campaign_id, system_id, segment_id, hypothesis_text
//! * `system_scores.tsv` (optional): campaign_id, system_id, metric_name, score
//!
//! Raw metric scores are oriented by the manifest (error metrics such as TER
//! are negated). The column names are the only contract; adapt a public data
//! release by renaming its columns into this layout.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use super::{
    parse_collection, serialize_collection, Campaign, Collection, Judgement, LanguagePair,
    Manifest, MetricScoreSet, MetricScores, Segment, SystemOutput,
};
use crate::error::{Error, Result};

type Row = HashMap<String, String>;

fn read_tsv(path: &Path) -> Result<Vec<(usize, Row)>> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .quoting(false)
        .from_path(path)
        .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?
        .iter()
        .map(str::to_owned)
        .collect();
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
        let row = headers
            .iter()
            .cloned()
            .zip(rec.iter().map(str::to_owned))
            .collect();
        rows.push((i + 2, row));
    }
    Ok(rows)
}

fn field<'a>(row: &'a Row, name: &str, file: &str, line: usize) -> Result<&'a str> {
    row.get(name)
        .map(String::as_str)
        .ok_or_else(|| Error::Input(format!("{file}:{line}: missing column '{name}'")))
}

fn number(row: &Row, name: &str, file: &str, line: usize) -> Result<f64> {
    let raw = field(row, name, file, line)?;
    raw.parse()
        .map_err(|_| Error::Input(format!("{file}:{line}: '{raw}' is not a number")))
}

/// Builds a validated collection from the TSV layout described above.
pub fn convert_tsv_release(dir: impl AsRef<Path>, manifest: Manifest) -> Result<Collection> {
    let dir = dir.as_ref();
    let mut campaigns: BTreeMap<String, Campaign> = BTreeMap::new();

    for (line, row) in read_tsv(&dir.join("judgements.tsv"))? {
        let f = |n: &str| field(&row, n, "judgements.tsv", line).map(str::to_owned);
        let cid = f("campaign_id")?;
        let campaign = match campaigns.get_mut(&cid) {
            Some(c) => c,
            None => {
                let mut c = Campaign::new(cid.clone(), LanguagePair::new(f("source_lang")?, f("target_lang")?));
                c.domain_tag = f("domain").unwrap_or_default();
                c.group_tag = f("group").unwrap_or_default();
                campaigns.entry(cid.clone()).or_insert(c)
            }
        };
        campaign.judgements.push(Judgement {
            annotator_id: f("annotator_id")?,
            system_id: f("system_id")?,
            segment_id: f("segment_id")?,
            score: number(&row, "score", "judgements.tsv", line)?,
        });
    }

    let segments = dir.join("segments.tsv");
    if segments.exists() {
        for (line, row) in read_tsv(&segments)? {
            let f = |n: &str| field(&row, n, "segments.tsv", line).map(str::to_owned);
            let cid = f("campaign_id")?;
            let reference = f("reference_text").ok().filter(|r| !r.is_empty());
            let c = campaigns
                .get_mut(&cid)
                .ok_or_else(|| Error::Input(format!("segments.tsv:{line}: unknown campaign '{cid}'")))?;
            c.segments.push(Segment {
                segment_id: f("segment_id")?,
                source_text: f("source_text")?,
                reference_text: reference,
            });
        }
    }

    let outputs = dir.join("outputs.tsv");
    if outputs.exists() {
        for (line, row) in read_tsv(&outputs)? {
            let f = |n: &str| field(&row, n, "outputs.tsv", line).map(str::to_owned);
            let cid = f("campaign_id")?;
            let c = campaigns
                .get_mut(&cid)
                .ok_or_else(|| Error::Input(format!("outputs.tsv:{line}: unknown campaign '{cid}'")))?;
            c.outputs.push(SystemOutput {
                system_id: f("system_id")?,
                segment_id: f("segment_id")?,
                hypothesis_text: f("hypothesis_text")?,
            });
        }
    }

    let scores = dir.join("system_scores.tsv");
    if scores.exists() {
        let mut sets: BTreeMap<(String, String), BTreeMap<String, f64>> = BTreeMap::new();
        for (line, row) in read_tsv(&scores)? {
            let f = |n: &str| field(&row, n, "system_scores.tsv", line).map(str::to_owned);
            let metric = f("metric_name")?;
            let raw = number(&row, "score", "system_scores.tsv", line)?;
            let value = manifest.orientation(&metric).normalize(raw);
            sets.entry((f("campaign_id")?, metric))
                .or_default()
                .insert(f("system_id")?, value);
        }
        for ((cid, metric), per_system) in sets {
            let c = campaigns
                .get_mut(&cid)
                .ok_or_else(|| Error::Input(format!("system_scores.tsv: unknown campaign '{cid}'")))?;
            c.metric_scores.push(MetricScoreSet {
                orientation: manifest.orientation(&metric),
                metric_name: metric,
                scores: MetricScores::System(per_system),
            });
        }
    }

    let collection = Collection {
        manifest,
        campaigns: campaigns.into_values().collect(),
    };
    // Run the full loader validation over the assembled records.
    parse_collection(&serialize_collection(&collection))
}
