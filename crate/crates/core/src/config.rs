//! Pipeline settings and where they come from.
//!
//! Values are layered, later layers winning: built-in defaults, the TOML
//! file named by `--config` or `PYRORISK_CONFIG`, then environment variables
//! and command-line flags (the CLI resolves those two, flags first).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::fusion::FusionConfig;
use crate::imaging::{AugmentConfig, EdgePolicy, DEFAULT_TILE_SIZE};

pub const CONFIG_ENV: &str = "PYRORISK_CONFIG";
/// Name of the provenance copy written into output directories.
pub const EFFECTIVE_CONFIG_FILE: &str = "effective_config.toml";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub weights: Option<PathBuf>,
    pub dataset_root: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub tile_size: usize,
    pub edge_policy: EdgePolicy,
    pub seed: u64,
    /// Abort on the first unreadable input instead of skipping it.
    pub strict: bool,
    pub fusion: FusionConfig,
    pub augment: AugmentConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            weights: None,
            dataset_root: None,
            out: None,
            tile_size: DEFAULT_TILE_SIZE,
            edge_policy: EdgePolicy::default(),
            seed: 0,
            strict: false,
            fusion: FusionConfig::default(),
            augment: AugmentConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str, path: &Path) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::from_toml(&text, path)
    }

    /// Defaults, overlaid with `explicit` or else `$PYRORISK_CONFIG` if set.
    pub fn resolve_file(explicit: Option<&Path>) -> Result<Self, ConfigError> {
        let from_env = std::env::var_os(CONFIG_ENV).filter(|v| !v.is_empty()).map(PathBuf::from);
        match explicit.map(Path::to_path_buf).or(from_env) {
            Some(path) => Self::load(&path),
            None => Ok(Self::default()),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.tile_size == 0 {
            return Err(ConfigError::Invalid("tile_size must be positive".into()));
        }
        self.fusion.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.augment.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        for (name, path) in [("weights", &self.weights), ("dataset_root", &self.dataset_root)] {
            if let Some(p) = path {
                if !p.exists() {
                    return Err(ConfigError::Invalid(format!("{name} path {} does not exist", p.display())));
                }
            }
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    /// Writes [`EFFECTIVE_CONFIG_FILE`] into `dir`.
    pub fn echo_into(&self, dir: &Path) -> Result<(), ConfigError> {
        let path = dir.join(EFFECTIVE_CONFIG_FILE);
        std::fs::write(&path, self.to_toml()).map_err(|e| ConfigError::Io { path, source: e })
    }
}

/// Parses `a,b,c,d,e` into five cut points.
pub fn parse_thresholds(s: &str) -> Result<[f64; 5], String> {
    let values = s
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    values
        .try_into()
        .map_err(|v: Vec<f64>| format!("expected 5 thresholds, got {}", v.len()))
}
