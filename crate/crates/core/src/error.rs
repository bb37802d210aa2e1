use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Why a thin-plate-spline system could not be solved.
#[derive(Debug, Clone, PartialEq, Error, serde::Serialize, serde::Deserialize)]
pub enum SingularReason {
    #[error("duplicate sample coordinates at indices {first} and {second}")]
    DuplicatePoints { first: usize, second: usize },
    #[error("sample coordinates are coplanar or collinear (affine block is rank deficient)")]
    DegenerateAffine,
    #[error("condition estimate {condition:.3e} exceeds {limit:.1e}")]
    IllConditioned { condition: f64, limit: f64 },
    #[error("zero pivot in LU factorization")]
    ZeroPivot,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("point ({lon}, {lat}, {depth}) lies outside the region")]
    OutsideRegion { lon: f64, lat: f64, depth: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("singular TPS system: {0}")]
    SingularSystem(SingularReason),

    #[error("trace(I - H) vanishes at lambda = {lambda:e}; the lambda grid is too small for n = {n}")]
    DegenerateGcv { lambda: f64, n: usize },

    #[error("every block is empty or singular; nothing was fitted")]
    AllBlocksEmpty,

    #[error("no fitted block covers normalized point ({0:.6}, {1:.6}, {2:.6})")]
    NoCoveringBlock(f64, f64, f64),

    #[error("rank-deficient regression: {0}")]
    RankDeficient(String),

    #[error("glider left the region at ({lon:.4}, {lat:.4}), t = {t} s")]
    ExitedRegion { lon: f64, lat: f64, t: f64 },

    #[error("every velocity ratio was excluded")]
    NoRatioPairs,

    #[error("formation `{formation}` failed: {source}")]
    Formation {
        formation: String,
        #[source]
        source: Box<Error>,
    },

    #[error("every candidate formation failed")]
    AllFormationsFailed,

    #[error("{path}: row {row}: {message}")]
    Parse { path: PathBuf, row: usize, message: String },

    #[error("{path}: missing column `{column}`")]
    MissingColumn { path: PathBuf, column: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: `{field}`: {message}")]
    Schema {
        path: PathBuf,
        field: String,
        message: String,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable tag, used in CLI error payloads.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidRegion(_) => "invalid_region",
            Error::InvalidGrid(_) => "invalid_grid",
            Error::OutsideRegion { .. } => "outside_region",
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::TooFewSamples { .. } => "too_few_samples",
            Error::SingularSystem(_) => "singular_system",
            Error::DegenerateGcv { .. } => "degenerate_gcv",
            Error::AllBlocksEmpty => "all_blocks_empty",
            Error::NoCoveringBlock(..) => "no_covering_block",
            Error::RankDeficient(_) => "rank_deficient",
            Error::ExitedRegion { .. } => "exited_region",
            Error::NoRatioPairs => "no_ratio_pairs",
            Error::Formation { .. } => "formation_failed",
            Error::AllFormationsFailed => "all_formations_failed",
            Error::Parse { .. } => "parse",
            Error::MissingColumn { .. } => "missing_column",
            Error::Io { .. } => "io",
            Error::Schema { .. } => "schema",
            Error::Json { .. } => "json",
            Error::Csv(_) => "csv",
        }
    }
}
