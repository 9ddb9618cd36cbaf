//! Key-value configuration file.
//!
//! ```toml
//! omega3_max_order = 13
//! omega_max_order = 13
//! enumeration_max_order = 13
//! tight_max_order = 21
//! max_stored_partitions = 10000
//! allow_slow = false
//! seed = 42
//! trials = 10000
//! ```
//!
//! Every key is optional. Raising an order bound above its default
//! requires `allow_slow = true`.

use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::disconnection::{SearchError, SearchLimits};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TRIALS: usize = 10_000;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid configuration: {0}")]
    Parse(#[from] toml::de::Error),
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub omega3_max_order: usize,
    pub omega_max_order: usize,
    pub enumeration_max_order: usize,
    pub tight_max_order: usize,
    pub max_stored_partitions: usize,
    pub allow_slow: bool,
    pub seed: u64,
    pub trials: usize,
    /// Worker threads; `None` uses the available parallelism.
    pub jobs: Option<usize>,
}

impl Default for Config {
    fn default() -> Self {
        let l = SearchLimits::default();
        Config {
            omega3_max_order: l.omega3_max_order,
            omega_max_order: l.omega_max_order,
            enumeration_max_order: l.enumeration_max_order,
            tight_max_order: l.tight_max_order,
            max_stored_partitions: l.max_stored_partitions,
            allow_slow: false,
            seed: DEFAULT_SEED,
            trials: DEFAULT_TRIALS,
            jobs: None,
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    /// The search bounds, checked against the slow-search acknowledgment.
    /// Loading does not check them, so a command-line acknowledgment can be
    /// merged in first.
    pub fn limits(&self) -> Result<SearchLimits, SearchError> {
        let limits = SearchLimits {
            omega3_max_order: self.omega3_max_order,
            omega_max_order: self.omega_max_order,
            enumeration_max_order: self.enumeration_max_order,
            tight_max_order: self.tight_max_order,
            max_stored_partitions: self.max_stored_partitions,
        };
        limits.validate(self.allow_slow)?;
        Ok(limits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c = Config::parse("").unwrap();
        assert_eq!(c, Config::default());
        assert_eq!(c.seed, 42);
        assert_eq!(c.limits().unwrap(), SearchLimits::default());
    }

    #[test]
    fn raised_bounds_need_acknowledgment() {
        let c = Config::parse("omega3_max_order = 15").unwrap();
        assert!(matches!(c.limits(), Err(SearchError::SlowNotAcknowledged { what: "omega3", .. })));
        let c = Config::parse("omega3_max_order = 15\nallow_slow = true\nseed = 7").unwrap();
        assert_eq!(c.limits().unwrap().omega3_max_order, 15);
        assert_eq!(c.seed, 7);
        // Lowering is always allowed.
        assert!(Config::parse("tight_max_order = 9").unwrap().limits().is_ok());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(Config::parse("omega_bound = 3").is_err());
        assert!(Config::parse("seed = \"x\"").is_err());
    }
}
