//! Run configuration: every stage parameter plus the seed.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::CvConfig;
use crate::features::FeatureConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// Master seed; overrides `cv.seed`.
    pub seed: u64,
    pub features: FeatureConfig,
    pub cv: CvConfig,
    pub selection_repetitions: usize,
    /// Feature subset evaluated by default.
    pub model: Vec<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            features: FeatureConfig::default(),
            cv: CvConfig::default(),
            selection_repetitions: 50,
            model: vec!["RWEs7".into(), "SWEnV".into()],
        }
    }
}

fn merge(base: &mut toml::Value, over: toml::Value) {
    match (base, over) {
        (toml::Value::Table(b), toml::Value::Table(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

impl RunConfig {
    /// Cross-validation settings with the master seed applied.
    pub fn cv_config(&self) -> CvConfig {
        CvConfig { seed: self.seed, ..self.cv }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    /// `self` with every key present in `text` replaced by the file's value.
    pub fn overlay_toml(&self, text: &str, origin: &Path) -> Result<Self> {
        let parse_err = |m: String| Error::Parse { path: origin.into(), message: m };
        let over: toml::Value = toml::from_str(text).map_err(|e| parse_err(e.to_string()))?;
        let mut base = toml::Value::try_from(self).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        merge(&mut base, over);
        let cfg: Self = base.try_into().map_err(|e: toml::de::Error| parse_err(e.to_string()))?;
        cfg.cv_config().validate()?;
        Ok(cfg)
    }

    pub fn overlay_file(&self, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(Error::io(path))?;
        self.overlay_toml(&text, path)
    }
}
