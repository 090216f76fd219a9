//! TOML list of labelled record files.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::Label;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Relative paths are resolved against the manifest's directory.
    pub path: PathBuf,
    pub label: Label,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortManifest {
    pub dataset_id: String,
    #[serde(default)]
    pub notes: String,
    #[serde(default)]
    pub records: Vec<ManifestEntry>,
}

impl CohortManifest {
    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for e in &self.records {
            if !seen.insert(&e.path) {
                return Err(Error::InvalidConfig(format!("duplicate manifest path {}", e.path.display())));
            }
            if e.label == Label::Unlabeled {
                return Err(Error::InvalidConfig(format!("{} has no outcome label", e.path.display())));
            }
        }
        Ok(())
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let m: Self = toml::from_str(text).map_err(|e| Error::Parse { path: origin.into(), message: e.to_string() })?;
        m.validate()?;
        Ok(m)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(Error::io(path))?;
        Self::parse(&text, path)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = toml::to_string(self).map_err(|e| Error::Parse { path: path.into(), message: e.to_string() })?;
        std::fs::write(path, text).map_err(Error::io(path))
    }

    /// Entry paths made absolute relative to `manifest_path`'s directory.
    pub fn resolved_paths(&self, manifest_path: &Path) -> Vec<PathBuf> {
        let base = manifest_path.parent().unwrap_or(Path::new(""));
        self.records.iter().map(|e| if e.path.is_absolute() { e.path.clone() } else { base.join(&e.path) }).collect()
    }
}
