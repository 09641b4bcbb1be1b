//! Content-addressed JSON cache for expensive group computations.
//!
//! Entries live in `$FLAGCALC_CACHE_DIR`, else `$XDG_CACHE_HOME/flagcalc`,
//! else `~/.cache/flagcalc`. Keys are SHA-256 digests of the entry kind and
//! its inputs. Writes go through a temporary file and a rename, so readers
//! see either a whole entry or none; concurrent writers store identical
//! content and the last rename wins.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dynkin::CartanData;

pub const CACHE_ENV: &str = "FLAGCALC_CACHE_DIR";
const FORMAT: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Entry<T> {
    format: u32,
    kind: String,
    key: String,
    value: T,
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: Option<PathBuf>,
}

pub fn default_dir() -> Option<PathBuf> {
    if let Some(d) = std::env::var_os(CACHE_ENV).filter(|d| !d.is_empty()) {
        return Some(PathBuf::from(d));
    }
    if let Some(d) = std::env::var_os("XDG_CACHE_HOME").filter(|d| !d.is_empty()) {
        return Some(PathBuf::from(d).join("flagcalc"));
    }
    std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache").join("flagcalc"))
}

/// Stable key material for a Cartan matrix.
pub fn cartan_key(c: &CartanData) -> String {
    serde_json::to_string(c.matrix()).expect("matrix serializes")
}

impl Cache {
    pub fn disabled() -> Cache {
        Cache { dir: None }
    }

    pub fn at(dir: impl Into<PathBuf>) -> Cache {
        Cache { dir: Some(dir.into()) }
    }

    pub fn from_env() -> Cache {
        Cache { dir: default_dir() }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn path_for(&self, kind: &str, key: &str) -> Option<(PathBuf, String)> {
        let dir = self.dir.as_ref()?;
        let mut h = Sha256::new();
        h.update(kind.as_bytes());
        h.update([0u8]);
        h.update(key.as_bytes());
        let digest = hex::encode(h.finalize());
        Some((dir.join(format!("{kind}-{digest}.json")), digest))
    }

    /// A missing, unreadable or corrupt entry is a miss; corruption is
    /// reported on standard error.
    pub fn get<T: DeserializeOwned>(&self, kind: &str, key: &str) -> Option<T> {
        let (path, _) = self.path_for(kind, key)?;
        let bytes = std::fs::read(&path).ok()?;
        match serde_json::from_slice::<Entry<T>>(&bytes) {
            Ok(e) if e.format == FORMAT && e.kind == kind && e.key == key => Some(e.value),
            Ok(_) => {
                eprintln!("warning: ignoring mismatched cache entry {}", path.display());
                None
            }
            Err(err) => {
                eprintln!("warning: ignoring corrupt cache entry {}: {err}", path.display());
                None
            }
        }
    }

    /// Failures to store are reported and otherwise ignored.
    pub fn put<T: Serialize>(&self, kind: &str, key: &str, value: &T) {
        let Some((path, _)) = self.path_for(kind, key) else {
            return;
        };
        if let Err(err) = self.write_atomic(&path, kind, key, value) {
            eprintln!("warning: could not write cache entry {}: {err}", path.display());
        }
    }

    fn write_atomic<T: Serialize>(&self, path: &Path, kind: &str, key: &str, value: &T) -> std::io::Result<()> {
        let dir = path.parent().expect("entry has a parent directory");
        std::fs::create_dir_all(dir)?;
        let entry = Entry {
            format: FORMAT,
            kind: kind.to_string(),
            key: key.to_string(),
            value,
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        serde_json::to_writer(&mut tmp, &entry)?;
        tmp.flush()?;
        tmp.persist(path).map_err(|e| e.error)?;
        Ok(())
    }

    /// Returns the cached value or computes and stores it.
    pub fn get_or_compute<T, E, F>(&self, kind: &str, key: &str, compute: F) -> Result<(T, bool), E>
    where
        T: Serialize + DeserializeOwned,
        F: FnOnce() -> Result<T, E>,
    {
        if let Some(v) = self.get(kind, key) {
            return Ok((v, true));
        }
        let v = compute()?;
        self.put(kind, key, &v);
        Ok((v, false))
    }
}
