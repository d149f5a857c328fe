use std::collections::HashMap;
use std::ops::AddAssign;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CHAR_ORDER: usize = 6;
pub const DEFAULT_BETA: f64 = 2.0;

/// Character n-gram counts for orders 1..=6, whitespace removed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ChrfSegmentStats {
    pub matches: [u64; CHAR_ORDER],
    pub hyp_ngrams: [u64; CHAR_ORDER],
    pub ref_ngrams: [u64; CHAR_ORDER],
}

impl AddAssign<&ChrfSegmentStats> for ChrfSegmentStats {
    fn add_assign(&mut self, rhs: &ChrfSegmentStats) {
        for n in 0..CHAR_ORDER {
            self.matches[n] += rhs.matches[n];
            self.hyp_ngrams[n] += rhs.hyp_ngrams[n];
            self.ref_ngrams[n] += rhs.ref_ngrams[n];
        }
    }
}

fn char_ngrams(chars: &[char], n: usize) -> HashMap<&[char], u64> {
    let mut counts = HashMap::new();
    if chars.len() >= n {
        for w in chars.windows(n) {
            *counts.entry(w).or_insert(0) += 1;
        }
    }
    counts
}

pub fn chrf_segment_stats(hyp: &str, reference: &str) -> ChrfSegmentStats {
    let h: Vec<char> = hyp.chars().filter(|c| !c.is_whitespace()).collect();
    let r: Vec<char> = reference.chars().filter(|c| !c.is_whitespace()).collect();
    let mut stats = ChrfSegmentStats::default();
    for n in 1..=CHAR_ORDER {
        let hc = char_ngrams(&h, n);
        let rc = char_ngrams(&r, n);
        stats.hyp_ngrams[n - 1] = hc.values().sum();
        stats.ref_ngrams[n - 1] = rc.values().sum();
        stats.matches[n - 1] = hc
            .iter()
            .map(|(g, c)| (*c).min(rc.get(g).copied().unwrap_or(0)))
            .sum();
    }
    stats
}

impl ChrfSegmentStats {
    /// ChrF (0-100): precision and recall are averaged over the orders where
    /// either side has n-grams, then combined into F-beta.
    pub fn score(&self, beta: f64) -> f64 {
        let mut precision = 0.0;
        let mut recall = 0.0;
        let mut orders = 0usize;
        for n in 0..CHAR_ORDER {
            let (h, r, m) = (self.hyp_ngrams[n], self.ref_ngrams[n], self.matches[n]);
            if h == 0 && r == 0 {
                continue;
            }
            if h > 0 {
                precision += m as f64 / h as f64;
            }
            if r > 0 {
                recall += m as f64 / r as f64;
            }
            orders += 1;
        }
        if orders == 0 {
            return 0.0;
        }
        precision /= orders as f64;
        recall /= orders as f64;
        let b2 = beta * beta;
        let denom = b2 * precision + recall;
        if denom == 0.0 {
            return 0.0;
        }
        100.0 * (1.0 + b2) * precision * recall / denom
    }
}

pub fn corpus_chrf(stats: &[ChrfSegmentStats], beta: f64) -> Result<f64> {
    if stats.is_empty() {
        return Err(Error::NoSegments);
    }
    let mut total = ChrfSegmentStats::default();
    for s in stats {
        total += s;
    }
    Ok(total.score(beta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_is_100() {
        let s = chrf_segment_stats("the cat sat on the mat", "the cat sat on the mat");
        assert_eq!(corpus_chrf(&[s], DEFAULT_BETA).unwrap(), 100.0);
    }

    #[test]
    fn abc_vs_abd() {
        // Hand count: order 1 {a,b,c} vs {a,b,d}: 2 of 3; order 2 {ab,bc} vs {ab,bd}: 1 of 2;
        // order 3 {abc} vs {abd}: 0 of 1; orders 4-6 empty on both sides.
        // P = R = (2/3 + 1/2 + 0) / 3 = 7/18, so F = 7/18.
        let s = chrf_segment_stats("abc", "abd");
        assert_eq!(s.matches[..3], [2, 1, 0]);
        assert_eq!(s.hyp_ngrams[3..], [0, 0, 0]);
        let got = corpus_chrf(&[s], DEFAULT_BETA).unwrap();
        assert!((got - 100.0 * 7.0 / 18.0).abs() < 1e-12, "{got}");
    }

    #[test]
    fn disjoint_alphabets_are_zero() {
        let s = chrf_segment_stats("abc def", "xyz uvw");
        assert_eq!(corpus_chrf(&[s], DEFAULT_BETA).unwrap(), 0.0);
    }

    #[test]
    fn whitespace_is_ignored() {
        assert_eq!(chrf_segment_stats("a b c", "abc"), chrf_segment_stats("abc", "abc"));
    }

    #[test]
    fn recall_weighted_more_than_precision() {
        // Hypothesis contained in the reference: precision 1, recall < 1.
        let short = chrf_segment_stats("abcd", "abcdefgh");
        // Reference contained in the hypothesis: recall 1, precision < 1.
        let long = chrf_segment_stats("abcdefgh", "abcd");
        assert!(short.score(2.0) < long.score(2.0));
    }

    #[test]
    fn empty_is_error() {
        assert!(corpus_chrf(&[], 2.0).is_err());
    }
}
