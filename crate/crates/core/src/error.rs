use std::path::PathBuf;

use thiserror::Error;

/// Pipeline stage tag attached to aggregated errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Validate,
    Preprocess,
    BeatDetect,
    AaExtract,
    Features,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Stage::Validate => "validate",
            Stage::Preprocess => "preprocess",
            Stage::BeatDetect => "beat_detect",
            Stage::AaExtract => "aa_extract",
            Stage::Features => "features",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("insufficient length: need {needed} samples, have {actual}")]
    InsufficientLength { needed: usize, actual: usize },
    #[error("signal too short: need at least {needed} samples, have {actual}")]
    TooShort { needed: usize, actual: usize },
    #[error("unsupported rate: {0}")]
    UnsupportedRate(String),
    #[error("no beats found in {seconds:.1} s of signal")]
    NoBeatsFound { seconds: f64 },
    #[error("too few beats: need {needed}, have {actual}")]
    TooFewBeats { needed: usize, actual: usize },
    #[error("degenerate window set: all windows are zero")]
    DegenerateSet,
    #[error("zero total detail energy")]
    ZeroEnergy,
    #[error("mean R-peak magnitude is zero")]
    ZeroRPeak,
    #[error("only one class present")]
    SingleClass,
    #[error("too few members per class: class {class} has {count}, need {needed}")]
    TooFewPerClass { class: String, count: usize, needed: usize },
    #[error("invalid record: {0}")]
    InvalidRecord(String),
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },
    #[error("all {count} records failed")]
    AllRecordsFailed { count: usize },
    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn at(stage: Stage) -> impl FnOnce(Error) -> Error {
        move |e| Error::Stage { stage, source: Box::new(e) }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
        let path = path.into();
        move |source| Error::Io { path, source }
    }

    /// Process exit status for this error: 2 for usage and configuration
    /// problems, 3 for data errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidConfig(_) | Error::InvalidSpec(_) => 2,
            _ => 3,
        }
    }

    /// Stage tag if this error was raised inside the feature pipeline.
    pub fn stage(&self) -> Option<Stage> {
        match self {
            Error::Stage { stage, .. } => Some(*stage),
            _ => None,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
