use std::fmt;

use thiserror::Error;

/// Category of a collection-loading failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoadErrorKind {
    /// A field is missing, mistyped, or out of range.
    Schema,
    /// A record points at a campaign, system, or segment that does not exist.
    Reference,
    /// A system does not cover the campaign's full segment set.
    Coverage,
}

impl fmt::Display for LoadErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LoadErrorKind::Schema => "schema violation",
            LoadErrorKind::Reference => "referential violation",
            LoadErrorKind::Coverage => "coverage violation",
        })
    }
}

/// A validation failure while loading a collection, located by campaign and record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadError {
    pub kind: LoadErrorKind,
    pub campaign_id: Option<String>,
    /// 1-based line number of the offending record; 0 when the problem is campaign-wide.
    pub record: usize,
    pub message: String,
}

impl LoadError {
    pub(crate) fn new(
        kind: LoadErrorKind,
        campaign_id: Option<&str>,
        record: usize,
        message: impl Into<String>,
    ) -> Self {
        Self {
            kind,
            campaign_id: campaign_id.map(str::to_owned),
            record,
            message: message.into(),
        }
    }
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if let Some(c) = &self.campaign_id {
            write!(f, " in campaign '{c}'")?;
        }
        if self.record > 0 {
            write!(f, " at record {}", self.record)?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for LoadError {}

/// Prefixes an I/O error with the file it concerns.
pub fn at_path(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Load(#[from] LoadError),

    #[error("no segments")]
    NoSegments,

    #[error("empty reference for TER")]
    EmptyReference,

    #[error("unsupported metric '{0}': only bleu, chrf and ter are built in; ingest other metrics as external score files")]
    UnsupportedMetric(String),

    #[error("missing references in campaign '{campaign}' for metric '{metric}'")]
    MissingReferences { campaign: String, metric: String },

    #[error("unknown system '{system}' in campaign '{campaign}'")]
    UnknownSystem { campaign: String, system: String },

    #[error("unknown campaign '{0}'")]
    UnknownCampaign(String),

    #[error("no judgements for system '{system}' in campaign '{campaign}'")]
    NoJudgements { campaign: String, system: String },

    #[error("no matched units between '{system_a}' and '{system_b}' in campaign '{campaign}'")]
    NoMatchedUnits {
        campaign: String,
        system_a: String,
        system_b: String,
    },

    #[error("empty subset: {0}")]
    EmptySubset(String),

    #[error("constant deltas: correlation undefined")]
    ConstantDeltas,

    #[error("at least {needed} records required, got {got}")]
    TooFewRecords { needed: usize, got: usize },

    #[error("segment sets differ between compared systems")]
    SegmentSetMismatch,

    #[error("segment stats required for metric '{0}'")]
    SegmentStatsRequired(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("subset mismatch between results and clusters in column '{0}'")]
    SubsetMismatch(String),

    #[error("{0}")]
    Input(String),
}

impl Error {
    /// True for failures caused by degenerate statistics rather than bad input.
    pub fn is_degenerate(&self) -> bool {
        matches!(
            self,
            Error::ConstantDeltas
                | Error::EmptySubset(_)
                | Error::TooFewRecords { .. }
                | Error::NoMatchedUnits { .. }
                | Error::NoSegments
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
