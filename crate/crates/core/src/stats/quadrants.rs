//! Agreement between the human significance test and a metric significance test.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::MetricTest;
use crate::data_model::SystemPair;
use crate::human_eval::is_significant;
use crate::pairwise::DeltaRecord;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadrantReport {
    pub metric: String,
    /// Human and metric test both significant.
    pub truly_differing: usize,
    /// Metric significant, human not.
    pub type_i: usize,
    /// Human significant, metric not.
    pub type_ii: usize,
    /// Neither significant.
    pub equal_quality: usize,
    /// type_ii / (type_ii + equal_quality): share of metric-non-significant pairs that humans separate.
    pub type_ii_rate: f64,
    /// Accuracy over all analyzed pairs.
    pub accuracy_no_test: Option<f64>,
    /// Accuracy over pairs the metric test calls significant.
    pub accuracy_significant: Option<f64>,
    pub n_significant: usize,
    /// Records without metric test results.
    pub skipped: usize,
    pub human_alpha: f64,
}

impl QuadrantReport {
    pub fn n_pairs(&self) -> usize {
        self.truly_differing + self.type_i + self.type_ii + self.equal_quality
    }
}

/// Classifies each pair by (human significant at `human_alpha`, metric test significant).
pub fn quadrant_analysis(
    records: &[DeltaRecord],
    metric: &str,
    human_alpha: f64,
    tests: &BTreeMap<SystemPair, MetricTest>,
) -> QuadrantReport {
    let mut rep = QuadrantReport {
        metric: metric.to_owned(),
        truly_differing: 0,
        type_i: 0,
        type_ii: 0,
        equal_quality: 0,
        type_ii_rate: 0.0,
        accuracy_no_test: None,
        accuracy_significant: None,
        n_significant: 0,
        skipped: 0,
        human_alpha,
    };
    let (mut agree_all, mut n_all, mut agree_sig) = (0usize, 0usize, 0usize);
    for r in records {
        let (Some(test), Some(agrees)) = (tests.get(&r.pair), r.agrees(metric)) else {
            rep.skipped += 1;
            continue;
        };
        let human = is_significant(r.human_p, human_alpha);
        match (human, test.significant) {
            (true, true) => rep.truly_differing += 1,
            (false, true) => rep.type_i += 1,
            (true, false) => rep.type_ii += 1,
            (false, false) => rep.equal_quality += 1,
        }
        n_all += 1;
        agree_all += usize::from(agrees);
        if test.significant {
            rep.n_significant += 1;
            agree_sig += usize::from(agrees);
        }
    }
    let non_sig = rep.type_ii + rep.equal_quality;
    if non_sig > 0 {
        rep.type_ii_rate = rep.type_ii as f64 / non_sig as f64;
    }
    if n_all > 0 {
        rep.accuracy_no_test = Some(agree_all as f64 / n_all as f64);
    }
    if rep.n_significant > 0 {
        rep.accuracy_significant = Some(agree_sig as f64 / rep.n_significant as f64);
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data_model::LanguagePair;
    use crate::human_eval::{TestMethod, TestOutcome};

    fn rec(i: usize, human: f64, metric: f64, p: f64) -> DeltaRecord {
        let lp = LanguagePair::new("en", "de");
        DeltaRecord {
            pair: SystemPair::new(&format!("c{i}"), "A", "B").unwrap(),
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

    fn test(p: f64) -> MetricTest {
        MetricTest {
            outcome: TestOutcome::new(p, 0.0, TestMethod::Bootstrap, String::new()),
            score_a: 0.0,
            score_b: 0.0,
            wins_a: 0,
            wins_b: 0,
            ties: 0,
            n_resamples: 1000,
            seed: 0,
            alpha: 0.05,
            significant: p <= 0.05,
        }
    }

    #[test]
    fn perfect_metric_has_no_errors() {
        let recs: Vec<_> = (0..4).map(|i| rec(i, 1.0 + i as f64, 1.0 + i as f64, 0.001)).collect();
        let tests = recs.iter().map(|r| (r.pair.clone(), test(0.0))).collect();
        let q = quadrant_analysis(&recs, "M", 0.05, &tests);
        assert_eq!((q.type_i, q.type_ii, q.truly_differing), (0, 0, 4));
        assert_eq!(q.accuracy_no_test, Some(1.0));
        assert_eq!(q.accuracy_significant, Some(1.0));
        assert_eq!(q.type_ii_rate, 0.0);
    }

    #[test]
    fn rejecting_everything_makes_significant_pairs_type_ii() {
        let recs = vec![rec(0, 1.0, 1.0, 0.01), rec(1, 1.0, -1.0, 0.02), rec(2, 1.0, 1.0, 0.5)];
        let tests = recs.iter().map(|r| (r.pair.clone(), test(1.0))).collect();
        let q = quadrant_analysis(&recs, "M", 0.05, &tests);
        assert_eq!((q.type_ii, q.equal_quality, q.truly_differing, q.type_i), (2, 1, 0, 0));
        assert!((q.type_ii_rate - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(q.accuracy_significant, None);
        assert_eq!(q.n_pairs(), 3);
    }

    #[test]
    fn missing_tests_are_skipped() {
        let recs = vec![rec(0, 1.0, 1.0, 0.01), rec(1, 1.0, 1.0, 0.01)];
        let tests = BTreeMap::from([(recs[0].pair.clone(), test(0.0))]);
        let q = quadrant_analysis(&recs, "M", 0.05, &tests);
        assert_eq!((q.n_pairs(), q.skipped), (1, 1));
    }
}
