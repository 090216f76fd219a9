//! Single-lead ECG records, validation and fixed-length segmentation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Nominal sampling rate of pipeline-conformant records (Hz).
pub const NOMINAL_FS: f64 = 1000.0;
/// Analysis window length (s).
pub const ANALYSIS_WINDOW_S: f64 = 20.0;

/// Post-procedure outcome of a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Label {
    SrMaintained,
    AfRelapse,
    Unlabeled,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::SrMaintained => "SR_MAINTAINED",
            Label::AfRelapse => "AF_RELAPSE",
            Label::Unlabeled => "UNLABELED",
        }
    }

    /// `true` for the positive (sinus-rhythm maintained) class.
    pub fn is_positive(self) -> bool {
        self == Label::SrMaintained
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "SR_MAINTAINED" => Ok(Label::SrMaintained),
            "AF_RELAPSE" => Ok(Label::AfRelapse),
            "UNLABELED" | "" => Ok(Label::Unlabeled),
            other => Err(Error::InvalidRecord(format!("unknown label '{other}'"))),
        }
    }
}

/// Raw single-lead ECG in millivolts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcgRecord<T> {
    pub record_id: String,
    pub lead: String,
    pub fs: T,
    pub samples: Vec<T>,
    pub label: Label,
}

impl<T: Real> EcgRecord<T> {
    pub fn new(record_id: impl Into<String>, fs: T, samples: Vec<T>) -> Self {
        Self {
            record_id: record_id.into(),
            lead: "V1".to_string(),
            fs,
            samples,
            label: Label::Unlabeled,
        }
    }

    pub fn with_label(mut self, label: Label) -> Self {
        self.label = label;
        self
    }

    pub fn duration_s(&self) -> T {
        T::from_usize_lossy(self.samples.len()) / self.fs
    }

    /// The `window_s`-second excerpt starting at `offset_s`.
    pub fn excerpt(&self, offset_s: T, window_s: T) -> Result<EcgRecord<T>> {
        let start = samples_for(offset_s, self.fs);
        let len = samples_for(window_s, self.fs);
        let end = start + len;
        if end > self.samples.len() {
            return Err(Error::InsufficientLength { needed: end, actual: self.samples.len() });
        }
        Ok(EcgRecord {
            record_id: self.record_id.clone(),
            lead: self.lead.clone(),
            fs: self.fs,
            samples: self.samples[start..end].to_vec(),
            label: self.label,
        })
    }
}

/// A single constraint violation found by [`validate_record`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    BadSamplingRate,
    TooShort { needed: usize, actual: usize },
    NonFinite { index: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::BadSamplingRate => f.write_str("sampling rate must be positive and finite"),
            Violation::TooShort { needed, actual } => {
                write!(f, "too short for 20 s window ({actual} < {needed} samples)")
            }
            Violation::NonFinite { index } => write!(f, "non-finite sample at index {index}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationResult {
    pub violations: Vec<Violation>,
}

impl ValidationResult {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_ok() {
            return Ok(());
        }
        let msg = self.violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ");
        Err(Error::InvalidRecord(msg))
    }
}

/// Checks sampling rate, 20 s minimum length and finiteness. Never fails; every
/// violation is reported.
pub fn validate_record<T: Real>(rec: &EcgRecord<T>) -> ValidationResult {
    let mut violations = Vec::new();
    let fs_ok = rec.fs.is_finite() && rec.fs > T::zero();
    if !fs_ok {
        violations.push(Violation::BadSamplingRate);
    } else {
        let needed = samples_for(T::lit(ANALYSIS_WINDOW_S), rec.fs);
        if rec.samples.len() < needed {
            violations.push(Violation::TooShort { needed, actual: rec.samples.len() });
        }
    }
    // Only the first offending sample is reported.
    if let Some(index) = rec.samples.iter().position(|x| !x.is_finite()) {
        violations.push(Violation::NonFinite { index });
    }
    ValidationResult { violations }
}

/// Non-overlapping, contiguous segmentation starting at sample 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SegmentPlan {
    pub segment_len_s: f64,
    pub n_segments: usize,
}

impl Default for SegmentPlan {
    fn default() -> Self {
        Self { segment_len_s: 0.8, n_segments: 25 }
    }
}

impl SegmentPlan {
    pub fn segment_len(&self, fs: f64) -> usize {
        (self.segment_len_s * fs).round() as usize
    }

    /// Start index of every segment.
    pub fn offsets(&self, fs: f64) -> Vec<usize> {
        let len = self.segment_len(fs);
        (0..self.n_segments).map(|i| i * len).collect()
    }
}

/// Splits `signal` into `plan.n_segments` equal slices; trailing samples are dropped.
pub fn segment<'a, T: Real>(signal: &'a [T], fs: T, plan: &SegmentPlan) -> Result<Vec<&'a [T]>> {
    let len = plan.segment_len(fs.as_f64());
    let needed = len * plan.n_segments;
    if len == 0 || signal.len() < needed {
        return Err(Error::InsufficientLength { needed, actual: signal.len() });
    }
    Ok(signal[..needed].chunks_exact(len).collect())
}

pub(crate) fn samples_for<T: Real>(seconds: T, fs: T) -> usize {
    (seconds * fs).round().to_usize().unwrap_or(0)
}
