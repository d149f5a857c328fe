//! Subset selection over system-pair delta records.

use std::fmt;
use std::str::FromStr;

use super::{Direction, ScriptClass};
use crate::error::Error;
use crate::pairwise::DeltaRecord;

/// Human p-value band `lower < p <= upper`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PBand {
    pub lower_exclusive: Option<f64>,
    pub upper_inclusive: Option<f64>,
}

impl PBand {
    /// Pairs significant at `alpha` (p <= alpha).
    pub fn significant(alpha: f64) -> Self {
        Self {
            lower_exclusive: None,
            upper_inclusive: Some(alpha),
        }
    }

    /// Pairs significant at `loose` but not at `strict`.
    pub fn within(strict: f64, loose: f64) -> Self {
        Self {
            lower_exclusive: Some(strict),
            upper_inclusive: Some(loose),
        }
    }

    pub fn contains(&self, p: f64) -> bool {
        self.lower_exclusive.is_none_or(|lo| p > lo) && self.upper_inclusive.is_none_or(|hi| p <= hi)
    }
}

/// Conjunction of optional predicates over a pair's campaign tags and human p-value.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SubsetSpec {
    pub direction: Option<Direction>,
    pub script: Option<ScriptClass>,
    pub language_pair: Option<String>,
    pub domain: Option<String>,
    pub group: Option<String>,
    pub human_p: Option<PBand>,
}

impl SubsetSpec {
    pub fn all() -> Self {
        Self::default()
    }

    pub fn with_band(mut self, band: PBand) -> Self {
        self.human_p = Some(band);
        self
    }

    pub fn is_all(&self) -> bool {
        *self == Self::default()
    }

    pub fn matches(&self, r: &DeltaRecord) -> bool {
        self.direction.is_none_or(|d| r.direction == d)
            && self.script.is_none_or(|s| r.script == Some(s))
            && self
                .language_pair
                .as_ref()
                .is_none_or(|lp| r.language_pair.to_string().eq_ignore_ascii_case(lp))
            && self.domain.as_ref().is_none_or(|d| &r.domain == d)
            && self.group.as_ref().is_none_or(|g| &r.group == g)
            && self.human_p.is_none_or(|b| b.contains(r.human_p))
    }
}

impl fmt::Display for SubsetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<String> = Vec::new();
        if let Some(d) = self.direction {
            terms.push(d.to_string());
        }
        if let Some(s) = self.script {
            terms.push(s.to_string());
        }
        if let Some(lp) = &self.language_pair {
            terms.push(format!("lang={lp}"));
        }
        if let Some(d) = &self.domain {
            terms.push(format!("domain={d}"));
        }
        if let Some(g) = &self.group {
            terms.push(format!("group={g}"));
        }
        if let Some(b) = self.human_p {
            match (b.lower_exclusive, b.upper_inclusive) {
                (None, Some(hi)) => terms.push(format!("alpha={hi}")),
                (Some(lo), Some(hi)) => terms.push(format!("within={lo}:{hi}")),
                (Some(lo), None) => terms.push(format!("p>{lo}")),
                (None, None) => {}
            }
        }
        if terms.is_empty() {
            f.write_str("all")
        } else {
            f.write_str(&terms.join(","))
        }
    }
}

impl FromStr for SubsetSpec {
    type Err = Error;

    /// Comma-separated terms, e.g. `into-en,alpha=0.05`, `logogram`, `group=incremental`,
    /// `within` (0.001 < p <= 0.05), `within=0.001:0.05`, `p>0.05`, `lang=en-de`, `all`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let mut spec = SubsetSpec::default();
        for term in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (key, value) = match term.split_once('=') {
                Some((k, v)) => (k.trim(), Some(v.trim())),
                None => (term, None),
            };
            let bad = || Error::Parse(format!("invalid subset term '{term}'"));
            let num = |v: &str| v.parse::<f64>().map_err(|_| bad());
            match (key, value) {
                ("all", None) => {}
                ("direction", Some(v)) => spec.direction = Some(v.parse()?),
                ("script", Some(v)) => spec.script = Some(v.parse()?),
                ("lang", Some(v)) => spec.language_pair = Some(v.to_owned()),
                ("domain", Some(v)) => spec.domain = Some(v.to_owned()),
                ("group", Some(v)) => spec.group = Some(v.to_owned()),
                ("alpha", Some(v)) => spec.human_p = Some(PBand::significant(num(v)?)),
                ("within", None) => spec.human_p = Some(PBand::within(0.001, 0.05)),
                ("within", Some(v)) => {
                    let (lo, hi) = v.split_once(':').ok_or_else(bad)?;
                    spec.human_p = Some(PBand::within(num(lo)?, num(hi)?));
                }
                (k, None) if k.starts_with("p>") => {
                    let band = spec.human_p.get_or_insert(PBand {
                        lower_exclusive: None,
                        upper_inclusive: None,
                    });
                    band.lower_exclusive = Some(num(&k[2..])?);
                }
                (k, None) => {
                    if let Ok(d) = k.parse::<Direction>() {
                        spec.direction = Some(d);
                    } else if let Ok(sc) = k.parse::<ScriptClass>() {
                        spec.script = Some(sc);
                    } else {
                        return Err(bad());
                    }
                }
                _ => return Err(bad()),
            }
        }
        Ok(spec)
    }
}

/// Records matching `spec`, in input order. The subset size is the length of the result.
///
/// A domain, group or language-pair value that occurs nowhere in `records`
/// yields an empty subset and a logged warning.
pub fn filter_pairs(records: &[DeltaRecord], spec: &SubsetSpec) -> Vec<DeltaRecord> {
    let unknown = |tag: &str, value: &Option<String>, get: &dyn Fn(&DeltaRecord) -> String| {
        if let Some(v) = value {
            if !records.iter().any(|r| get(r).eq_ignore_ascii_case(v)) {
                log::warn!("subset {tag} '{v}' matches no system pair");
            }
        }
    };
    unknown("domain", &spec.domain, &|r| r.domain.clone());
    unknown("group", &spec.group, &|r| r.group.clone());
    unknown("language pair", &spec.language_pair, &|r| r.language_pair.to_string());
    records.iter().filter(|r| spec.matches(r)).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data_model::{LanguagePair, SystemPair};
    use std::collections::BTreeMap;

    fn record(src: &str, tgt: &str, p: f64) -> DeltaRecord {
        let lp = LanguagePair::new(src, tgt);
        DeltaRecord {
            pair: SystemPair::new("c", "A", "B").unwrap(),
            human_delta: 1.0,
            human_p: p,
            metric_deltas: BTreeMap::new(),
            direction: lp.direction(),
            script: lp.target_script(),
            language_pair: lp,
            domain: "news".into(),
            group: "independent".into(),
        }
    }

    #[test]
    fn into_english_selects_target_english() {
        let recs = vec![record("de", "en", 0.5), record("en", "de", 0.5), record("ja", "en", 0.5)];
        let spec: SubsetSpec = "into-en".parse().unwrap();
        let out = filter_pairs(&recs, &spec);
        assert_eq!(out.len(), 2);
        assert!(out.iter().all(|r| r.language_pair.target == "en"));
    }

    #[test]
    fn within_band_is_half_open() {
        let spec: SubsetSpec = "within".parse().unwrap();
        let ps = [0.0005, 0.001, 0.0011, 0.04, 0.05, 0.051];
        let recs: Vec<_> = ps.iter().map(|&p| record("de", "en", p)).collect();
        let kept: Vec<f64> = filter_pairs(&recs, &spec).iter().map(|r| r.human_p).collect();
        assert_eq!(kept, vec![0.0011, 0.04, 0.05]);
    }

    #[test]
    fn unmatched_tag_gives_empty_subset() {
        let recs = vec![record("de", "en", 0.5)];
        let spec: SubsetSpec = "domain=medical".parse().unwrap();
        assert!(filter_pairs(&recs, &spec).is_empty());
    }

    #[test]
    fn parse_and_display_roundtrip() {
        for s in ["all", "into-en,alpha=0.05", "logogram,group=incremental", "within=0.001:0.05"] {
            let spec: SubsetSpec = s.parse().unwrap();
            assert_eq!(spec.to_string().parse::<SubsetSpec>().unwrap(), spec, "{s}");
        }
        assert!("bogus".parse::<SubsetSpec>().is_err());
        assert!("direction=sideways".parse::<SubsetSpec>().is_err());
    }

    #[test]
    fn significance_subsets_nest() {
        let ps = [0.2, 0.04, 0.009, 0.0009, 0.03, 0.0];
        let recs: Vec<_> = ps.iter().map(|&p| record("de", "en", p)).collect();
        let n: Vec<usize> = [0.05, 0.01, 0.001]
            .iter()
            .map(|&a| filter_pairs(&recs, &SubsetSpec::all().with_band(PBand::significant(a))).len())
            .collect();
        assert_eq!(n, vec![5, 3, 2]);
    }
}
