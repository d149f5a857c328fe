//! Resampling machinery.
//!
//! Every resample draws its indices from its own ChaCha8 stream, keyed by
//! `(seed, resample index)`, so results do not depend on how resamples are
//! scheduled across threads.

mod clusters;
mod quadrants;
mod sigtest;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use clusters::{bootstrap_accuracy_clusters, ClusterReport};
pub use quadrants::{quadrant_analysis, QuadrantReport};
pub use sigtest::{
    collect_segment_stats, metric_tests, paired_bootstrap_metric_test, MetricTest, Sidedness,
    StatsStore,
};

use crate::error::{Error, Result};

pub const DEFAULT_CLUSTER_RESAMPLES: usize = 10_000;
pub const DEFAULT_SIGTEST_RESAMPLES: usize = 1_000;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResampleConfig {
    pub n_resamples: usize,
    pub seed: u64,
    pub confidence: f64,
    pub alpha: f64,
}

impl ResampleConfig {
    /// Defaults for accuracy confidence clusters (10 000 resamples).
    pub fn clusters(seed: u64) -> Self {
        Self {
            n_resamples: DEFAULT_CLUSTER_RESAMPLES,
            seed,
            confidence: 0.95,
            alpha: 0.05,
        }
    }

    /// Defaults for the paired bootstrap metric test (1 000 resamples).
    pub fn sigtest(seed: u64) -> Self {
        Self {
            n_resamples: DEFAULT_SIGTEST_RESAMPLES,
            ..Self::clusters(seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_resamples < 100 {
            return Err(Error::InvalidConfig(format!(
                "n_resamples must be at least 100, got {}",
                self.n_resamples
            )));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "confidence must lie in (0, 1), got {}",
                self.confidence
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// Generator for one resample.
pub fn resample_rng(seed: u64, resample: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(resample as u64);
    rng
}

/// `n` indices drawn uniformly with replacement from `0..n` for one resample.
pub fn resample_indices(seed: u64, resample: usize, n: usize) -> Vec<usize> {
    let mut rng = resample_rng(seed, resample);
    (0..n).map(|_| rng.random_range(0..n)).collect()
}
