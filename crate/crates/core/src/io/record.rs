//! Plain-text ECG record: `key: value` header lines, a `---` separator, then
//! one sample per line.
//!
//! ```text
//! record_id: p001
//! fs: 1000
//! lead: V1
//! units: mV
//! label: SR_MAINTAINED
//! n_samples: 20000
//! ---
//! 0.0123
//! ...
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal::{EcgRecord, Label};

/// Amplitude units accepted in record headers; samples are stored in mV.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Units {
    Microvolt,
    Millivolt,
    Volt,
}

impl Units {
    pub fn to_millivolt(self) -> f64 {
        match self {
            Units::Microvolt => 1e-3,
            Units::Millivolt => 1.0,
            Units::Volt => 1e3,
        }
    }
}

impl std::str::FromStr for Units {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "uV" | "µV" | "microvolt" => Ok(Units::Microvolt),
            "mV" | "millivolt" => Ok(Units::Millivolt),
            "V" | "volt" => Ok(Units::Volt),
            other => Err(format!("unknown units '{other}'")),
        }
    }
}

const REQUIRED: [&str; 6] = ["record_id", "fs", "lead", "units", "label", "n_samples"];

/// Parses record text; `origin` names the source in error messages.
pub fn parse_record<T: Real>(text: &str, origin: &Path) -> Result<EcgRecord<T>> {
    let err = |line: usize, message: String| Error::Parse { path: origin.into(), message: format!("line {line}: {message}") };
    let mut header = HashMap::new();
    let mut lines = text.lines().enumerate();
    let mut separated = false;
    for (i, line) in lines.by_ref() {
        let line = line.trim();
        if line == "---" {
            separated = true;
            break;
        }
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once(':').ok_or_else(|| err(i + 1, format!("expected 'key: value', got '{line}'")))?;
        if header.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
            return Err(err(i + 1, format!("duplicate header key '{}'", k.trim())));
        }
    }
    if !separated {
        return Err(err(0, "missing '---' separator".into()));
    }
    for key in REQUIRED {
        if !header.contains_key(key) {
            return Err(err(0, format!("missing header field '{key}'")));
        }
    }
    let fs: f64 = header["fs"].parse().map_err(|_| err(0, format!("invalid fs '{}'", header["fs"])))?;
    let units: Units = header["units"].parse().map_err(|m| err(0, m))?;
    let label: Label = header["label"].parse().map_err(|_| err(0, format!("invalid label '{}'", header["label"])))?;
    let declared: usize =
        header["n_samples"].parse().map_err(|_| err(0, format!("invalid n_samples '{}'", header["n_samples"])))?;
    let scale = units.to_millivolt();
    let mut samples = Vec::with_capacity(declared);
    for (i, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| err(i + 1, format!("invalid sample '{line}'")))?;
        samples.push(T::lit(v * scale));
    }
    if samples.len() != declared {
        return Err(err(0, format!("header declares {declared} samples, body has {}", samples.len())));
    }
    Ok(EcgRecord {
        record_id: header["record_id"].clone(),
        lead: header["lead"].clone(),
        fs: T::lit(fs),
        samples,
        label,
    })
}

pub fn read_record<T: Real>(path: &Path) -> Result<EcgRecord<T>> {
    let text = std::fs::read_to_string(path).map_err(Error::io(path))?;
    parse_record(&text, path)
}

/// Record text in mV; values use the shortest representation that reads back exactly.
pub fn format_record<T: Real>(rec: &EcgRecord<T>) -> String {
    let mut out = String::with_capacity(rec.samples.len() * 12 + 128);
    let _ = writeln!(out, "record_id: {}", rec.record_id);
    let _ = writeln!(out, "fs: {}", rec.fs);
    let _ = writeln!(out, "lead: {}", rec.lead);
    out.push_str("units: mV\n");
    let _ = writeln!(out, "label: {}", rec.label);
    let _ = writeln!(out, "n_samples: {}", rec.samples.len());
    out.push_str("---\n");
    for v in &rec.samples {
        let _ = writeln!(out, "{v}");
    }
    out
}

pub fn write_record<T: Real>(path: &Path, rec: &EcgRecord<T>) -> Result<()> {
    std::fs::write(path, format_record(rec)).map_err(Error::io(path))
}
