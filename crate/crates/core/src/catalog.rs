//! On-disk cache of Davenport constants, witnesses and extremal censuses.
//!
//! The file is pretty-printed JSON with a `schema` field. Entries are keyed by
//! `"<group>|<weights>"` in canonical form and kept in a sorted map, so the
//! serialization is byte-stable.

use std::collections::BTreeMap;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::davenport::DavenportResult;
use crate::error::{Error, Result};
use crate::group::FiniteAbelianGroup;
use crate::weights::WeightSet;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_CATALOG_PATH: &str = "zerosum-catalog.json";
pub const CATALOG_ENV: &str = "ZEROSUM_CATALOG";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub group_key: String,
    pub weight_key: String,
    pub davenport: usize,
    /// False for lower bounds from a search that ran out of budget.
    pub exact: bool,
    pub witnesses: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extremal_census: Option<BTreeMap<usize, u64>>,
    pub tool_version: String,
    pub timestamp: String,
}

impl CatalogEntry {
    pub fn from_result(
        group: &FiniteAbelianGroup,
        weights: &WeightSet,
        result: &DavenportResult,
        timestamp: impl Into<String>,
    ) -> Self {
        CatalogEntry {
            group_key: group.key(),
            weight_key: weights.canonical_name(),
            davenport: result.value,
            exact: result.exact,
            witnesses: result.witnesses.iter().map(|w| w.to_literal(group)).collect(),
            extremal_census: None,
            tool_version: crate::TOOL_VERSION.to_string(),
            timestamp: timestamp.into(),
        }
    }

    pub fn key(&self) -> String {
        entry_key(&self.group_key, &self.weight_key)
    }
}

fn entry_key(group: &str, weights: &str) -> String {
    format!("{group}|{weights}")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Catalog {
    schema: u32,
    entries: BTreeMap<String, CatalogEntry>,
}

impl Default for Catalog {
    fn default() -> Self {
        Catalog {
            schema: SCHEMA_VERSION,
            entries: BTreeMap::new(),
        }
    }
}

impl Catalog {
    /// Reads a catalog; a missing file yields an empty one.
    pub fn load(path: &Path) -> Result<Self> {
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Self::default()),
            Err(e) => return Err(Error::Catalog(format!("{}: {e}", path.display()))),
        };
        Self::from_json(&text).map_err(|e| match e {
            Error::Catalog(msg) => Error::Catalog(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let catalog: Catalog = serde_json::from_str(text).map_err(|e| {
            Error::Catalog(format!(
                "malformed catalog at line {} column {}: {e}",
                e.line(),
                e.column()
            ))
        })?;
        if catalog.schema != SCHEMA_VERSION {
            return Err(Error::Catalog(format!(
                "unsupported schema {} (expected {SCHEMA_VERSION})",
                catalog.schema
            )));
        }
        for (k, entry) in &catalog.entries {
            if *k != entry.key() {
                return Err(Error::Catalog(format!("entry key {k:?} does not match its contents")));
            }
        }
        Ok(catalog)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("catalog serializes");
        s.push('\n');
        s
    }

    /// Writes to a temporary file next to `path`, then renames it into place.
    pub fn save(&self, path: &Path) -> Result<()> {
        let dir = match path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
            _ => PathBuf::from("."),
        };
        let io = |e: std::io::Error| Error::Catalog(format!("{}: {e}", path.display()));
        let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io)?;
        tmp.write_all(self.to_json().as_bytes()).map_err(io)?;
        tmp.as_file().sync_all().map_err(io)?;
        tmp.persist(path).map_err(|e| io(e.error))?;
        Ok(())
    }

    pub fn get(&self, group: &FiniteAbelianGroup, weights: &WeightSet) -> Option<&CatalogEntry> {
        self.entries.get(&entry_key(&group.key(), &weights.canonical_name()))
    }

    /// The stored constant, only if it came from a completed search.
    pub fn exact_davenport(&self, group: &FiniteAbelianGroup, weights: &WeightSet) -> Option<usize> {
        self.get(group, weights).filter(|e| e.exact).map(|e| e.davenport)
    }

    /// Stores `entry` unless it would replace an exact entry with a
    /// non-exact one, or a lower bound with a smaller one. Returns whether
    /// the catalog changed.
    pub fn put(&mut self, entry: CatalogEntry) -> bool {
        let key = entry.key();
        let replace = match self.entries.get(&key) {
            None => true,
            Some(old) if entry.exact => !old.exact || *old != entry,
            Some(old) => !old.exact && entry.davenport > old.davenport,
        };
        if replace {
            self.entries.insert(key, entry);
        }
        replace
    }

    pub fn entries(&self) -> impl Iterator<Item = &CatalogEntry> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Drops every non-exact entry; returns how many were removed.
    pub fn prune_inexact(&mut self) -> usize {
        let before = self.entries.len();
        self.entries.retain(|_, e| e.exact);
        before - self.entries.len()
    }
}

/// Advisory lock held as `<catalog>.lock` for the lifetime of the value.
#[derive(Debug)]
pub struct CatalogLock {
    path: PathBuf,
}

impl CatalogLock {
    pub fn acquire(catalog_path: &Path, timeout: Duration) -> Result<Self> {
        let mut name = catalog_path.as_os_str().to_owned();
        name.push(".lock");
        let path = PathBuf::from(name);
        let deadline = Instant::now() + timeout;
        loop {
            match OpenOptions::new().write(true).create_new(true).open(&path) {
                Ok(mut f) => {
                    let _ = writeln!(f, "{}", std::process::id());
                    return Ok(CatalogLock { path });
                }
                Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                    if Instant::now() >= deadline {
                        return Err(Error::Catalog(format!("timed out waiting for lock {}", path.display())));
                    }
                    std::thread::sleep(Duration::from_millis(50));
                }
                Err(e) => return Err(Error::Catalog(format!("{}: {e}", path.display()))),
            }
        }
    }
}

impl Drop for CatalogLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(group: &str, weights: &str, d: usize, exact: bool) -> CatalogEntry {
        CatalogEntry {
            group_key: group.into(),
            weight_key: weights.into(),
            davenport: d,
            exact,
            witnesses: vec![],
            extremal_census: None,
            tool_version: "test".into(),
            timestamp: "t0".into(),
        }
    }

    #[test]
    fn put_get_round_trip() {
        let mut c = Catalog::default();
        let g: FiniteAbelianGroup = "C3^2xC9".parse().unwrap();
        let w = WeightSet::plus_minus_one();
        assert!(c.get(&g, &w).is_none());
        let mut e = entry("C3xC3xC9", "{-1,1}", 6, true);
        e.witnesses.push("(0,0,1)".into());
        e.extremal_census = Some(BTreeMap::from([(6, 10)]));
        assert!(c.put(e.clone()));
        assert_eq!(c.get(&g, &w), Some(&e));
        assert_eq!(c.exact_davenport(&g, &w), Some(6));
    }

    #[test]
    fn put_policy() {
        let mut c = Catalog::default();
        assert!(c.put(entry("C5", "{1}", 3, false)));
        assert!(!c.put(entry("C5", "{1}", 2, false)));
        assert!(c.put(entry("C5", "{1}", 4, false)));
        assert!(c.put(entry("C5", "{1}", 5, true)));
        assert!(!c.put(entry("C5", "{1}", 6, false)));
        assert!(!c.put(entry("C5", "{1}", 5, true)));
        assert_eq!(c.entries().next().unwrap().davenport, 5);
        let g = FiniteAbelianGroup::cyclic(5).unwrap();
        assert_eq!(c.exact_davenport(&g, &WeightSet::unit()), Some(5));
    }

    #[test]
    fn save_load_is_byte_stable() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cat.json");
        assert!(Catalog::load(&path).unwrap().is_empty());
        let mut c = Catalog::default();
        c.put(entry("C7", "{-1,1}", 3, true));
        c.put(entry("C3xC3", "{1,2}", 3, true));
        c.put(entry("C5", "{1}", 4, false));
        c.save(&path).unwrap();
        let bytes = fs::read(&path).unwrap();
        let loaded = Catalog::load(&path).unwrap();
        assert_eq!(loaded, c);
        loaded.save(&path).unwrap();
        assert_eq!(fs::read(&path).unwrap(), bytes);
        let keys: Vec<String> = loaded.entries().map(CatalogEntry::key).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn malformed_files_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        fs::write(&path, "{\"schema\": 1, \"entries\": {").unwrap();
        assert!(matches!(Catalog::load(&path), Err(Error::Catalog(_))));
        fs::write(&path, "{\"schema\": 99, \"entries\": {}}").unwrap();
        assert!(matches!(Catalog::load(&path), Err(Error::Catalog(_))));
        let mut c = Catalog::default();
        c.put(entry("C7", "{1}", 7, true));
        let tampered = c.to_json().replace("\"C7|{1}\"", "\"C9|{1}\"");
        assert!(Catalog::from_json(&tampered).is_err());
    }

    #[test]
    fn prune_and_lock() {
        let mut c = Catalog::default();
        c.put(entry("C7", "{1}", 7, true));
        c.put(entry("C9", "{1}", 8, false));
        assert_eq!(c.prune_inexact(), 1);
        assert_eq!(c.len(), 1);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cat.json");
        let lock = CatalogLock::acquire(&path, Duration::from_millis(10)).unwrap();
        assert!(CatalogLock::acquire(&path, Duration::from_millis(60)).is_err());
        drop(lock);
        assert!(CatalogLock::acquire(&path, Duration::from_millis(10)).is_ok());
    }
}
