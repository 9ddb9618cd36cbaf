//! Single-file result cache.
//!
//! Entries are keyed `order|symbol|column|version` and stored as one JSON
//! object. The cache is read once before a run and written once after it,
//! so workers only ever see an immutable snapshot.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use super::CensusError;

/// Bumped whenever a cached column's meaning or algorithm changes.
pub const CACHE_VERSION: &str = concat!("circulant-", env!("CARGO_PKG_VERSION"), "-r1");

#[derive(Debug, Default)]
pub struct Cache {
    path: Option<PathBuf>,
    entries: BTreeMap<String, Value>,
}

impl Cache {
    /// Loads `path`, or starts empty if it does not exist yet.
    pub fn open(path: &Path) -> Result<Self, CensusError> {
        let entries = match std::fs::read_to_string(path) {
            Ok(text) => serde_json::from_str(&text).map_err(|e| CensusError::Cache {
                path: path.display().to_string(),
                detail: e.to_string(),
            })?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => BTreeMap::new(),
            Err(e) => {
                return Err(CensusError::Cache {
                    path: path.display().to_string(),
                    detail: e.to_string(),
                })
            }
        };
        Ok(Cache {
            path: Some(path.to_path_buf()),
            entries,
        })
    }

    /// A cache that is never persisted.
    pub fn in_memory() -> Self {
        Cache::default()
    }

    pub fn key(order: usize, symbol: &str, column: &str) -> String {
        format!("{order}|{symbol}|{column}|{CACHE_VERSION}")
    }

    pub fn get<T: DeserializeOwned>(&self, key: &str) -> Option<T> {
        self.entries.get(key).and_then(|v| serde_json::from_value(v.clone()).ok())
    }

    pub fn insert<T: Serialize>(&mut self, key: String, value: &T) {
        let value = serde_json::to_value(value).expect("cache values serialize");
        self.entries.insert(key, value);
    }

    pub fn extend(&mut self, entries: impl IntoIterator<Item = (String, Value)>) {
        self.entries.extend(entries);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Writes to a sibling temporary file and renames it into place.
    pub fn save(&self) -> Result<(), CensusError> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        let err = |e: &dyn std::fmt::Display| CensusError::Cache {
            path: path.display().to_string(),
            detail: e.to_string(),
        };
        let text = serde_json::to_string(&self.entries).map_err(|e| err(&e))?;
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, text).map_err(|e| err(&e))?;
        std::fs::rename(&tmp, path).map_err(|e| err(&e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_through_disk() {
        let dir = std::env::temp_dir().join(format!("circulant-cache-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cache.json");
        let _ = std::fs::remove_file(&path);

        let mut cache = Cache::open(&path).unwrap();
        assert!(cache.is_empty());
        let key = Cache::key(9, "9:{1,3,4,7}", "omega3");
        cache.insert(key.clone(), &3usize);
        cache.save().unwrap();

        let reopened = Cache::open(&path).unwrap();
        assert_eq!(reopened.get::<usize>(&key), Some(3));
        assert_eq!(reopened.get::<bool>(&key), None);
        assert_eq!(reopened.get::<usize>(&Cache::key(9, "9:{1,3,4,7}", "omega")), None);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn corrupt_file_is_an_error() {
        let dir = std::env::temp_dir().join(format!("circulant-cache-bad-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cache.json");
        std::fs::write(&path, "not json").unwrap();
        assert!(matches!(Cache::open(&path), Err(CensusError::Cache { .. })));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
