use std::collections::HashMap;
use std::ops::AddAssign;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 4;

/// Clipped n-gram match counts for orders 1..=4 plus lengths.
/// Summing segment stats gives the corpus stats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BleuSegmentStats {
    pub matches: [u64; MAX_ORDER],
    pub hyp_ngrams: [u64; MAX_ORDER],
    pub hyp_length: u64,
    pub ref_length: u64,
}

impl AddAssign<&BleuSegmentStats> for BleuSegmentStats {
    fn add_assign(&mut self, rhs: &BleuSegmentStats) {
        for n in 0..MAX_ORDER {
            self.matches[n] += rhs.matches[n];
            self.hyp_ngrams[n] += rhs.hyp_ngrams[n];
        }
        self.hyp_length += rhs.hyp_length;
        self.ref_length += rhs.ref_length;
    }
}

fn ngram_counts<T: AsRef<str>>(tokens: &[T], n: usize) -> HashMap<Vec<&str>, u64> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            let key: Vec<&str> = w.iter().map(AsRef::as_ref).collect();
            *counts.entry(key).or_insert(0) += 1;
        }
    }
    counts
}

pub fn bleu_segment_stats<H: AsRef<str>, R: AsRef<str>>(hyp: &[H], reference: &[R]) -> BleuSegmentStats {
    let mut stats = BleuSegmentStats {
        hyp_length: hyp.len() as u64,
        ref_length: reference.len() as u64,
        ..Default::default()
    };
    for n in 1..=MAX_ORDER {
        let hyp_counts = ngram_counts(hyp, n);
        let ref_counts = ngram_counts(reference, n);
        stats.hyp_ngrams[n - 1] = hyp.len().saturating_sub(n - 1) as u64;
        stats.matches[n - 1] = hyp_counts
            .iter()
            .map(|(g, c)| (*c).min(ref_counts.get(g).copied().unwrap_or(0)))
            .sum();
    }
    stats
}

impl BleuSegmentStats {
    /// BLEU (0-100) of these (summed) statistics.
    ///
    /// No smoothing: any order with hypothesis n-grams but zero matches gives 0.
    /// Orders without any hypothesis n-gram are skipped unless `strict`, in
    /// which case they also give 0.
    pub fn score(&self, strict: bool) -> f64 {
        if self.hyp_length == 0 {
            return 0.0;
        }
        let mut log_sum = 0.0;
        let mut orders = 0usize;
        for n in 0..MAX_ORDER {
            if self.hyp_ngrams[n] == 0 {
                if strict {
                    return 0.0;
                }
                continue;
            }
            if self.matches[n] == 0 {
                return 0.0;
            }
            log_sum += (self.matches[n] as f64 / self.hyp_ngrams[n] as f64).ln();
            orders += 1;
        }
        let precision = (log_sum / orders as f64).exp();
        let brevity = if self.hyp_length < self.ref_length {
            (1.0 - self.ref_length as f64 / self.hyp_length as f64).exp()
        } else {
            1.0
        };
        100.0 * brevity * precision
    }
}

pub fn corpus_bleu(stats: &[BleuSegmentStats], strict: bool) -> Result<f64> {
    if stats.is_empty() {
        return Err(Error::NoSegments);
    }
    let mut total = BleuSegmentStats::default();
    for s in stats {
        total += s;
    }
    Ok(total.score(strict))
}
