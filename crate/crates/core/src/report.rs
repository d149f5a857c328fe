//! Plain-text rendering of accuracy, quadrant and correlation tables.
//!
//! Rendering is pure: the same inputs always produce byte-identical text.
//! Tied-with-best flags are read from [`ClusterReport`]s, never recomputed.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pairwise::AccuracyTable;
use crate::stats::{ClusterReport, QuadrantReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableStyle {
    #[default]
    Markdown,
    Tsv,
}

impl FromStr for TableStyle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "markdown" | "md" => Ok(Self::Markdown),
            "tsv" => Ok(Self::Tsv),
            other => Err(Error::Parse(format!("unknown table style '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenderOptions {
    pub style: TableStyle,
    /// Decimals for percentages.
    pub precision: usize,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            style: TableStyle::Markdown,
            precision: 1,
        }
    }
}

const NOT_COMPARABLE: &str = "Accuracies across columns are not comparable: each column is computed on a different set of system pairs.";

fn pct(x: f64, precision: usize) -> String {
    format!("{:.*}", precision, 100.0 * x)
}

fn join_row(style: TableStyle, cells: &[String]) -> String {
    match style {
        TableStyle::Markdown => format!("| {} |", cells.join(" | ")),
        TableStyle::Tsv => cells.join("\t"),
    }
}

fn separator(n: usize) -> String {
    format!("|{}", "---|".repeat(n))
}

/// Renders an accuracy table with one optional cluster report per column.
///
/// Markdown: the best metric of a column is bold; metrics tied with it are
/// bold with a `†`. TSV: cells in the best cluster (best included) carry a
/// trailing `*`. Fails with [`Error::SubsetMismatch`] if a cluster report was
/// computed on a different set of pairs than its column.
pub fn render_accuracy_table(
    table: &AccuracyTable,
    clusters: &[Option<&ClusterReport>],
    opts: &RenderOptions,
) -> Result<String> {
    if !clusters.is_empty() && clusters.len() != table.columns.len() {
        return Err(Error::SubsetMismatch(format!(
            "{} cluster reports for {} columns",
            clusters.len(),
            table.columns.len()
        )));
    }
    for (col, cl) in table.columns.iter().zip(clusters) {
        if let Some(cl) = cl {
            if cl.fingerprint != col.fingerprint || cl.n_pairs != col.n {
                return Err(Error::SubsetMismatch(format!(
                    "column '{}' ({} pairs) vs cluster report on '{}' ({} pairs)",
                    col.label, col.n, cl.subset, cl.n_pairs
                )));
            }
        }
    }
    let style = opts.style;
    let mut out = String::new();
    let mut header = vec!["Metric".to_owned()];
    header.extend(table.columns.iter().map(|c| c.label.clone()));
    let _ = writeln!(out, "{}", join_row(style, &header));
    if style == TableStyle::Markdown {
        let _ = writeln!(out, "{}", separator(header.len()));
    }
    let mut n_row = vec!["n".to_owned()];
    n_row.extend(table.columns.iter().map(|c| format!("n={}", c.n)));
    let _ = writeln!(out, "{}", join_row(style, &n_row));

    let partial = table.partial_metrics();
    let mut any_tie = false;
    for row in &table.rows {
        let mut name = row.metric.clone();
        if partial.contains(&row.metric) {
            name.push('‡');
        }
        let mut cells = vec![name];
        for (c, cell) in row.cells.iter().enumerate() {
            let Some(acc) = cell else {
                cells.push("-".to_owned());
                continue;
            };
            let v = pct(acc.accuracy, opts.precision);
            let cl = clusters.get(c).copied().flatten();
            let best = cl.is_some_and(|cl| cl.best_metric == row.metric);
            let tied = cl.is_some_and(|cl| cl.tied_with_best.contains(&row.metric));
            cells.push(match style {
                TableStyle::Markdown if best => format!("**{v}**"),
                TableStyle::Markdown if tied => {
                    any_tie = true;
                    format!("**{v}**†")
                }
                TableStyle::Tsv if best || tied => format!("{v}*"),
                _ => v,
            });
        }
        let _ = writeln!(out, "{}", join_row(style, &cells));
    }

    let mut notes = Vec::new();
    if let Some(cl) = clusters.iter().flatten().next() {
        match style {
            TableStyle::Markdown if any_tie => notes.push(format!(
                "† tied with the best metric (bold) of the column: bootstrap over pairs, {} resamples, seed {}, confidence {}.",
                cl.n_resamples, cl.seed, cl.confidence
            )),
            TableStyle::Tsv => notes.push(format!(
                "* best or tied with best: bootstrap over pairs, {} resamples, seed {}, confidence {}.",
                cl.n_resamples, cl.seed, cl.confidence
            )),
            _ => {}
        }
    }
    if !partial.is_empty() {
        notes.push("‡ computed on fewer pairs than the column n (scores missing for some systems).".to_owned());
    }
    let mut prints: Vec<u64> = table.columns.iter().filter(|c| c.n > 0).map(|c| c.fingerprint).collect();
    prints.dedup();
    if prints.len() > 1 {
        notes.push(NOT_COMPARABLE.to_owned());
    }
    write_notes(&mut out, style, &notes);
    Ok(out)
}

fn write_notes(out: &mut String, style: TableStyle, notes: &[String]) {
    if notes.is_empty() {
        return;
    }
    if style == TableStyle::Markdown {
        out.push('\n');
    }
    for n in notes {
        let _ = match style {
            TableStyle::Markdown => writeln!(out, "{n}"),
            TableStyle::Tsv => writeln!(out, "# {n}"),
        };
    }
}

/// Parsed TSV accuracy table: column labels, column n, and per-metric cells
/// (`None` for dashes) with the tied-with-best marker.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedTable {
    pub columns: Vec<String>,
    pub n: Vec<usize>,
    pub rows: Vec<(String, Vec<Option<(f64, bool)>>)>,
}

/// Reads back the output of [`render_accuracy_table`] in TSV style.
pub fn parse_accuracy_tsv(text: &str) -> Result<ParsedTable> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.is_empty());
    let bad = |m: &str| Error::Parse(format!("accuracy TSV: {m}"));
    let header = lines.next().ok_or_else(|| bad("missing header"))?;
    let columns: Vec<String> = header.split('\t').skip(1).map(str::to_owned).collect();
    let n_line = lines.next().ok_or_else(|| bad("missing n row"))?;
    let n = n_line
        .split('\t')
        .skip(1)
        .map(|c| c.trim_start_matches("n=").parse::<usize>().map_err(|_| bad(c)))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for line in lines {
        let mut it = line.split('\t');
        let metric = it.next().unwrap_or_default().trim_end_matches('‡').to_owned();
        let cells = it
            .map(|c| {
                if c == "-" {
                    return Ok(None);
                }
                let (v, tied) = match c.strip_suffix('*') {
                    Some(v) => (v, true),
                    None => (c, false),
                };
                v.parse::<f64>().map(|x| Some((x, tied))).map_err(|_| bad(c))
            })
            .collect::<Result<Vec<_>>>()?;
        if cells.len() != columns.len() {
            return Err(bad(&format!("row '{metric}' has {} cells", cells.len())));
        }
        rows.push((metric, cells));
    }
    Ok(ParsedTable { columns, n, rows })
}

/// One row per metric: accuracy without the metric test, accuracy over
/// metric-significant pairs only, and the type-II count with its rate.
pub fn render_quadrant_table(reports: &[QuadrantReport], opts: &RenderOptions) -> String {
    let style = opts.style;
    let p = opts.precision;
    let mut out = String::new();
    let header: Vec<String> = ["Metric", "Accuracy", "Accuracy (significant only)", "Type II (rate)"]
        .iter()
        .map(|s| (*s).to_owned())
        .collect();
    let _ = writeln!(out, "{}", join_row(style, &header));
    if style == TableStyle::Markdown {
        let _ = writeln!(out, "{}", separator(header.len()));
    }
    for r in reports {
        let fmt = |x: Option<f64>| x.map_or_else(|| "-".to_owned(), |v| pct(v, p));
        let cells = vec![
            r.metric.clone(),
            fmt(r.accuracy_no_test),
            fmt(r.accuracy_significant),
            format!("{} ({}%)", r.type_ii, pct(r.type_ii_rate, p)),
        ];
        let _ = writeln!(out, "{}", join_row(style, &cells));
    }
    if let Some(r) = reports.first() {
        let note = format!(
            "Human significance at alpha {}; type II = human-significant pairs the metric test calls tied; rate over all pairs the metric test calls tied.",
            r.human_alpha
        );
        write_notes(&mut out, style, &[note]);
    }
    out
}

/// Correlation rows: metric, Pearson, Spearman, n.
pub fn render_correlation_table(rows: &[(String, Option<crate::pairwise::DeltaCorrelation>)], opts: &RenderOptions) -> String {
    let style = opts.style;
    let mut out = String::new();
    let header: Vec<String> = ["Metric", "Pearson", "Spearman", "n"].iter().map(|s| (*s).to_owned()).collect();
    let _ = writeln!(out, "{}", join_row(style, &header));
    if style == TableStyle::Markdown {
        let _ = writeln!(out, "{}", separator(header.len()));
    }
    for (m, c) in rows {
        let cells = match c {
            Some(c) => vec![m.clone(), format!("{:.3}", c.pearson), format!("{:.3}", c.spearman), c.n.to_string()],
            None => vec![m.clone(), "-".into(), "-".into(), "0".into()],
        };
        let _ = writeln!(out, "{}", join_row(style, &cells));
    }
    out
}

/// Formats a p-value with three decimals.
pub fn format_p(p: f64) -> String {
    format!("{p:.3}")
}

#[cfg(test)]
mod tests {
    use std::collections::{BTreeMap, BTreeSet};

    use super::*;
    use crate::data_model::{LanguagePair, SubsetSpec, SystemPair};
    use crate::pairwise::{accuracy_table, DeltaRecord};

    fn rec(i: usize, m1: f64, m2: f64, p: f64) -> DeltaRecord {
        let lp = LanguagePair::new("en", "de");
        DeltaRecord {
            pair: SystemPair::new(&format!("c{i}"), "A", "B").unwrap(),
            human_delta: 1.0,
            human_p: p,
            metric_deltas: BTreeMap::from([("M1".to_owned(), m1), ("M2".to_owned(), m2)]),
            direction: lp.direction(),
            script: lp.target_script(),
            language_pair: lp,
            domain: String::new(),
            group: String::new(),
        }
    }

    fn records() -> Vec<DeltaRecord> {
        vec![rec(0, 1.0, 1.0, 0.5), rec(1, 1.0, -1.0, 0.01), rec(2, -1.0, 1.0, 0.5), rec(3, 1.0, 1.0, 0.0001)]
    }

    fn cluster(table: &AccuracyTable, col: usize, best: &str, tied: &[&str]) -> ClusterReport {
        ClusterReport {
            subset: table.columns[col].spec.to_string(),
            fingerprint: table.columns[col].fingerprint,
            n_pairs: table.columns[col].n,
            best_metric: best.to_owned(),
            tied_with_best: tied.iter().map(|s| (*s).to_owned()).collect::<BTreeSet<_>>(),
            win_fraction: BTreeMap::new(),
            accuracy: BTreeMap::new(),
            n_resamples: 1000,
            seed: 1,
            confidence: 0.95,
        }
    }

    #[test]
    fn best_bold_and_tie_marker() {
        let metrics = vec!["M1".to_owned(), "M2".to_owned()];
        let t = accuracy_table(&records(), &metrics, &[0.05]);
        let c0 = cluster(&t, 0, "M1", &["M1", "M2"]);
        let md = render_accuracy_table(&t, &[Some(&c0), None], &RenderOptions::default()).unwrap();
        assert!(md.contains("**75.0**"), "{md}");
        assert!(md.contains("**75.0**†"), "{md}");
        assert!(md.contains("† tied"));
        let tsv = render_accuracy_table(&t, &[Some(&c0), None], &RenderOptions { style: TableStyle::Tsv, precision: 1 }).unwrap();
        assert!(tsv.contains("75.0*"));
    }

    #[test]
    fn empty_column_renders_dashes() {
        let metrics = vec!["M1".to_owned()];
        let t = accuracy_table(&records(), &metrics, &[0.00001]);
        let md = render_accuracy_table(&t, &[], &RenderOptions::default()).unwrap();
        assert!(md.contains("n=0"));
        assert!(md.lines().any(|l| l.starts_with("| M1 |") && l.ends_with("| - |")), "{md}");
    }

    #[test]
    fn fingerprint_mismatch_is_an_error() {
        let metrics = vec!["M1".to_owned()];
        let t = accuracy_table(&records(), &metrics, &[0.05]);
        let c = cluster(&t, 1, "M1", &["M1"]);
        let err = render_accuracy_table(&t, &[Some(&c), None], &RenderOptions::default()).unwrap_err();
        assert!(matches!(err, Error::SubsetMismatch(_)));
    }

    #[test]
    fn tsv_round_trip() {
        let metrics = vec!["M1".to_owned(), "M2".to_owned()];
        let t = accuracy_table(&records(), &metrics, &[0.05, 0.01, 0.001]);
        let c1 = cluster(&t, 1, "M1", &["M1"]);
        let opts = RenderOptions { style: TableStyle::Tsv, precision: 1 };
        let text = render_accuracy_table(&t, &[None, Some(&c1), None, None, None], &opts).unwrap();
        let parsed = parse_accuracy_tsv(&text).unwrap();
        assert_eq!(parsed.n, t.columns.iter().map(|c| c.n).collect::<Vec<_>>());
        for (row, (m, cells)) in t.rows.iter().zip(&parsed.rows) {
            assert_eq!(&row.metric, m);
            for (orig, back) in row.cells.iter().zip(cells) {
                let want = orig.as_ref().map(|a| (100.0 * a.accuracy * 10.0).round() / 10.0);
                assert_eq!(want, back.map(|b| b.0));
            }
        }
        assert!(text.contains("not comparable"));
        assert_eq!(text, render_accuracy_table(&t, &[None, Some(&c1), None, None, None], &opts).unwrap());
    }

    #[test]
    fn same_subset_columns_have_no_footnote() {
        let metrics = vec!["M1".to_owned()];
        let cols = vec![("a".to_owned(), SubsetSpec::all()), ("b".to_owned(), SubsetSpec::all())];
        let t = AccuracyTable::build(&records(), &metrics, &cols, 0);
        let md = render_accuracy_table(&t, &[], &RenderOptions::default()).unwrap();
        assert!(!md.contains("not comparable"));
    }

    fn quadrant(acc: f64, acc_sig: f64, type_ii: usize, eq: usize) -> QuadrantReport {
        QuadrantReport {
            metric: "M".into(),
            truly_differing: 0,
            type_i: 0,
            type_ii,
            equal_quality: eq,
            type_ii_rate: if type_ii + eq == 0 { 0.0 } else { type_ii as f64 / (type_ii + eq) as f64 },
            accuracy_no_test: Some(acc),
            accuracy_significant: Some(acc_sig),
            n_significant: 1,
            skipped: 0,
            human_alpha: 0.05,
        }
    }

    #[test]
    fn quadrant_rows() {
        let text = render_quadrant_table(&[quadrant(0.834, 0.951, 204, 975), quadrant(1.0, 1.0, 0, 0)], &RenderOptions::default());
        assert!(text.contains("| M | 83.4 | 95.1 | 204 (17.3%) |"), "{text}");
        assert!(text.contains("| M | 100.0 | 100.0 | 0 (0.0%) |"));
    }

    #[test]
    fn p_formatting() {
        assert_eq!(format_p(0.01234), "0.012");
        assert_eq!(format_p(1.0), "1.000");
    }
}
