//! Settings shared by the CLI and the service.

use std::path::{Path, PathBuf};

use gesturekit_core::MiConfig;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Acceptance threshold on the recognizer score. Calibrated at the equal
/// error point of a ten-template ROC over synthetic corpora.
pub const DEFAULT_THRESHOLD: f64 = 2.7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Where enrolled template sets are kept.
    pub data_dir: PathBuf,
    pub default_threshold: f64,
    pub rotation_invariant: bool,
    pub mse_cutoff_fraction: f64,
    pub port: u16,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            data_dir: PathBuf::from("gesturekit-data"),
            default_threshold: DEFAULT_THRESHOLD,
            rotation_invariant: true,
            mse_cutoff_fraction: MiConfig::default().mse_cutoff_fraction,
            port: 8080,
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(Error::io(path))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Invalid(message) => Error::Config {
                path: path.to_path_buf(),
                message,
            },
            other => other,
        })
    }

    /// Loads `path` when given, defaults otherwise.
    pub fn load_or_default(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Invalid(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.default_threshold.is_finite() && self.default_threshold > 0.0) {
            return Err(Error::Invalid(format!(
                "default_threshold {} must be positive",
                self.default_threshold
            )));
        }
        if !(self.mse_cutoff_fraction > 0.0 && self.mse_cutoff_fraction <= 1.0) {
            return Err(Error::Invalid(format!(
                "mse_cutoff_fraction {} is outside (0, 1]",
                self.mse_cutoff_fraction
            )));
        }
        Ok(())
    }

    pub fn mi_config(&self) -> MiConfig {
        MiConfig {
            mse_cutoff_fraction: self.mse_cutoff_fraction,
            ..MiConfig::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_file_keeps_defaults() {
        let cfg = Config::from_toml("port = 9000\nrotation_invariant = false\n").unwrap();
        assert_eq!(cfg.port, 9000);
        assert!(!cfg.rotation_invariant);
        assert_eq!(cfg.default_threshold, DEFAULT_THRESHOLD);
    }

    #[test]
    fn rejects_bad_values_and_unknown_keys() {
        assert!(Config::from_toml("default_threshold = -1.0").is_err());
        assert!(Config::from_toml("mse_cutoff_fraction = 0.0").is_err());
        assert!(Config::from_toml("threshold = 2.0").is_err());
    }

    #[test]
    fn cutoff_reaches_the_estimator() {
        let cfg = Config::from_toml("mse_cutoff_fraction = 0.1").unwrap();
        assert_eq!(cfg.mi_config().mse_cutoff_fraction, 0.1);
        assert_eq!(
            cfg.mi_config().align_smoothing_frames,
            MiConfig::default().align_smoothing_frames
        );
    }
}
