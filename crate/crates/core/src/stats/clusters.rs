use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{resample_indices, ResampleConfig};
use crate::data_model::{filter_pairs, SubsetSpec};
use crate::error::{Error, Result};
use crate::pairwise::{subset_fingerprint, DeltaRecord};

/// Metrics statistically tied with the most accurate one on a subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub subset: String,
    pub fingerprint: u64,
    pub n_pairs: usize,
    pub best_metric: String,
    pub tied_with_best: BTreeSet<String>,
    /// Fraction of resamples in which the best metric was strictly more accurate.
    pub win_fraction: BTreeMap<String, f64>,
    pub accuracy: BTreeMap<String, f64>,
    pub n_resamples: usize,
    pub seed: u64,
    pub confidence: f64,
}

/// (agreements, scored pairs) counts compared exactly by cross-multiplication.
fn beats(best: (u64, u64), other: (u64, u64)) -> bool {
    match (best.1, other.1) {
        (0, _) => false,
        (_, 0) => true,
        (nb, no) => best.0 * no > other.0 * nb,
    }
}

/// Bootstrap over system pairs: the best metric on the full subset is
/// compared with every other metric on each resample; a metric beaten in
/// fewer than `confidence` of the resamples is tied with the best.
///
/// Ties for best on the full subset go to the metric listed first.
pub fn bootstrap_accuracy_clusters(
    records: &[DeltaRecord],
    metrics: &[String],
    subset: &SubsetSpec,
    cfg: &ResampleConfig,
) -> Result<ClusterReport> {
    cfg.validate()?;
    let selected = filter_pairs(records, subset);
    if selected.is_empty() {
        return Err(Error::EmptySubset(subset.to_string()));
    }
    // agreement[m][i]: Some(agrees) when metric m scored pair i
    let scored: Vec<(&String, Vec<Option<bool>>)> = metrics
        .iter()
        .map(|m| (m, selected.iter().map(|r| r.agrees(m)).collect::<Vec<_>>()))
        .filter(|(_, a)| a.iter().any(Option::is_some))
        .collect();
    if scored.is_empty() {
        return Err(Error::EmptySubset(format!("{subset}: no metric scored")));
    }
    let tally = |agree: &[Option<bool>], idx: &mut dyn Iterator<Item = usize>| -> (u64, u64) {
        idx.fold((0, 0), |(k, n), i| match agree[i] {
            Some(a) => (k + u64::from(a), n + 1),
            None => (k, n),
        })
    };
    let n = selected.len();
    let full: Vec<(u64, u64)> = scored.iter().map(|(_, a)| tally(a, &mut (0..n))).collect();
    let mut best = 0;
    for (i, counts) in full.iter().enumerate().skip(1) {
        if beats(*counts, full[best]) {
            best = i;
        }
    }

    let wins: Vec<u64> = (0..cfg.n_resamples)
        .into_par_iter()
        .map(|r| {
            let idx = resample_indices(cfg.seed, r, n);
            let counts: Vec<(u64, u64)> = scored.iter().map(|(_, a)| tally(a, &mut idx.iter().copied())).collect();
            counts.iter().map(|c| u64::from(beats(counts[best], *c))).collect::<Vec<u64>>()
        })
        .reduce(
            || vec![0; scored.len()],
            |mut acc, w| {
                for (a, b) in acc.iter_mut().zip(w) {
                    *a += b;
                }
                acc
            },
        );

    let mut win_fraction = BTreeMap::new();
    let mut accuracy = BTreeMap::new();
    let mut tied = BTreeSet::new();
    for (i, (m, _)) in scored.iter().enumerate() {
        let frac = wins[i] as f64 / cfg.n_resamples as f64;
        if frac < cfg.confidence {
            tied.insert((*m).clone());
        }
        win_fraction.insert((*m).clone(), frac);
        accuracy.insert((*m).clone(), full[i].0 as f64 / full[i].1 as f64);
    }
    Ok(ClusterReport {
        subset: subset.to_string(),
        fingerprint: subset_fingerprint(&selected),
        n_pairs: n,
        best_metric: scored[best].0.clone(),
        tied_with_best: tied,
        win_fraction,
        accuracy,
        n_resamples: cfg.n_resamples,
        seed: cfg.seed,
        confidence: cfg.confidence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data_model::{LanguagePair, SystemPair};

    fn records(n: usize, correct: &[(&str, &dyn Fn(usize) -> bool)]) -> Vec<DeltaRecord> {
        (0..n)
            .map(|i| {
                let lp = LanguagePair::new("en", "de");
                DeltaRecord {
                    pair: SystemPair::new(&format!("c{i}"), "A", "B").unwrap(),
                    human_delta: 1.0,
                    human_p: 0.01,
                    metric_deltas: correct
                        .iter()
                        .map(|(m, f)| ((*m).to_owned(), if f(i) { 1.0 } else { -1.0 }))
                        .collect(),
                    direction: lp.direction(),
                    script: lp.target_script(),
                    language_pair: lp,
                    domain: String::new(),
                    group: String::new(),
                }
            })
            .collect()
    }

    fn names(ms: &[&str]) -> Vec<String> {
        ms.iter().map(|s| (*s).to_owned()).collect()
    }

    #[test]
    fn identical_metrics_are_tied() {
        let f = |i: usize| i % 3 != 0;
        let recs = records(60, &[("A", &f), ("B", &f)]);
        let rep = bootstrap_accuracy_clusters(&recs, &names(&["A", "B"]), &SubsetSpec::all(), &ResampleConfig::sigtest(1)).unwrap();
        assert_eq!(rep.win_fraction["B"], 0.0);
        assert!(rep.tied_with_best.contains("B"));
        assert_eq!(rep.best_metric, "A");
    }

    #[test]
    fn dominated_metric_is_not_tied() {
        let recs = records(200, &[("A", &|_| true), ("B", &|_| false)]);
        let rep = bootstrap_accuracy_clusters(&recs, &names(&["B", "A"]), &SubsetSpec::all(), &ResampleConfig::sigtest(1)).unwrap();
        assert_eq!(rep.best_metric, "A");
        assert_eq!(rep.win_fraction["B"], 1.0);
        assert!(!rep.tied_with_best.contains("B"));
        assert!(rep.tied_with_best.contains("A"));
    }

    #[test]
    fn empty_subset_rejected() {
        let recs = records(5, &[("A", &|_| true)]);
        let spec: SubsetSpec = "alpha=0.001".parse().unwrap();
        assert!(bootstrap_accuracy_clusters(&recs, &names(&["A"]), &spec, &ResampleConfig::sigtest(1)).is_err());
    }

    #[test]
    fn cross_multiplication() {
        assert!(beats((3, 4), (2, 4)));
        assert!(!beats((2, 4), (1, 2)));
        assert!(beats((1, 1), (0, 0)));
        assert!(!beats((0, 0), (1, 1)));
    }
}
