//! Sample-size weighted aggregation of correlation coefficients across groups
//! (Hunter–Schmidt style bare-bones meta-analysis).

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{at_path, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationObservation {
    pub group_label: String,
    pub r: f64,
    pub n: u64,
}

impl CorrelationObservation {
    pub fn new(group_label: impl Into<String>, r: f64, n: u64) -> Result<Self> {
        let obs = Self {
            group_label: group_label.into(),
            r,
            n,
        };
        obs.validate()?;
        Ok(obs)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.r.is_finite() || self.r.abs() > 1.0 {
            return Err(Error::Input(format!(
                "correlation for '{}' must lie in [-1, 1], got {}",
                self.group_label, self.r
            )));
        }
        if self.n < 2 {
            return Err(Error::Input(format!(
                "sample size for '{}' must be at least 2, got {}",
                self.group_label, self.n
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetaResult {
    pub r: f64,
    pub n_total: u64,
    pub n_groups: usize,
}

/// `r = Σ nᵢ·rᵢ / Σ nᵢ`.
pub fn hunter_schmidt(observations: &[CorrelationObservation]) -> Result<MetaResult> {
    if observations.is_empty() {
        return Err(Error::Input("no correlation observations to aggregate".into()));
    }
    let mut weighted = 0.0;
    let mut n_total = 0u64;
    for o in observations {
        o.validate()?;
        weighted += o.n as f64 * o.r;
        n_total += o.n;
    }
    Ok(MetaResult {
        r: (weighted / n_total as f64).clamp(-1.0, 1.0),
        n_total,
        n_groups: observations.len(),
    })
}

/// Reads `group<TAB>r<TAB>n` rows. A header line whose `r` column is not numeric is skipped.
pub fn read_observations(path: &Path) -> Result<Vec<CorrelationObservation>> {
    let mut text = String::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(at_path(path))?;
    parse_observations(&text)
}

pub fn parse_observations(text: &str) -> Result<Vec<CorrelationObservation>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(Error::Parse(format!("line {}: expected 3 tab-separated columns", i + 1)));
        }
        let Ok(r) = cols[1].trim().parse::<f64>() else {
            if i == 0 {
                continue;
            }
            return Err(Error::Parse(format!("line {}: bad correlation '{}'", i + 1, cols[1])));
        };
        let n = cols[2]
            .trim()
            .parse::<u64>()
            .map_err(|_| Error::Parse(format!("line {}: bad sample size '{}'", i + 1, cols[2])))?;
        out.push(CorrelationObservation::new(cols[0].trim(), r, n)?);
    }
    Ok(out)
}
