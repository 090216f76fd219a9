//! File formats: record files, cohort manifests, feature tables, run
//! configuration and JSON reports.

mod config;
mod manifest;
mod record;
mod table;

use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

pub use config::RunConfig;
pub use manifest::{CohortManifest, ManifestEntry};
pub use record::{format_record, parse_record, read_record, write_record, Units};
pub use table::{
    read_error_table, read_feature_table, table_dataset, write_csv_rows, write_error_table, write_feature_table,
    FeatureError,
};

/// Pretty-printed JSON followed by a newline.
pub fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Parse { path: path.into(), message: e.to_string() })?;
    text.push('\n');
    std::fs::write(path, text).map_err(Error::io(path))
}

pub fn read_json<D: serde::de::DeserializeOwned>(path: &Path) -> Result<D> {
    let text = std::fs::read_to_string(path).map_err(Error::io(path))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse { path: path.into(), message: e.to_string() })
}
