//! On-disk cache for expensive enumerations.
//!
//! Each entry is one JSON file holding its key, a SHA-256 checksum of the
//! canonical payload and the payload itself. Writes go to a temporary file in
//! the same directory and are moved into place with a rename, so readers see
//! either the old or the new entry. A file whose checksum does not verify is
//! renamed aside with a `.quarantined` suffix.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheKey {
    pub kind: String,
    pub p: u32,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: CacheKey,
    pub checksum: String,
    pub payload: Value,
}

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error("cache i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("cache encoding: {0}")]
    Encoding(#[from] serde_json::Error),
    #[error("checksum mismatch in {0}; file quarantined")]
    ChecksumMismatch(PathBuf),
}

/// How a cached value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CacheStatus {
    Disabled,
    Hit,
    Miss,
    Quarantined,
}

fn checksum(payload: &Value) -> String {
    let canonical = serde_json::to_string(payload).expect("values serialise");
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

#[derive(Debug, Clone)]
pub struct Cache {
    dir: Option<PathBuf>,
    version: String,
}

impl Cache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Cache { dir, version: ss3_core::VERSION.to_string() }
    }

    /// A cache with an explicit version string, for invalidation tests.
    pub fn with_version(dir: Option<PathBuf>, version: &str) -> Self {
        Cache { dir, version: version.to_string() }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn path(&self, kind: &str, p: u32) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{kind}-p{p}.json")))
    }

    fn key(&self, kind: &str, p: u32) -> CacheKey {
        CacheKey { kind: kind.into(), p, version: self.version.clone() }
    }

    pub fn store<T: Serialize>(&self, kind: &str, p: u32, value: &T) -> Result<Option<PathBuf>, CacheError> {
        let Some(path) = self.path(kind, p) else {
            return Ok(None);
        };
        let dir = path.parent().expect("cache files live in a directory");
        std::fs::create_dir_all(dir)?;
        let payload = serde_json::to_value(value)?;
        let entry = CacheEntry { key: self.key(kind, p), checksum: checksum(&payload), payload };
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        serde_json::to_writer(&mut tmp, &entry)?;
        tmp.persist(&path).map_err(|e| e.error)?;
        Ok(Some(path))
    }

    /// `Ok(None)` when absent or written by another version.
    pub fn load<T: DeserializeOwned>(&self, kind: &str, p: u32) -> Result<Option<T>, CacheError> {
        let Some(path) = self.path(kind, p) else {
            return Ok(None);
        };
        let bytes = match std::fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let entry: CacheEntry = match serde_json::from_slice(&bytes) {
            Ok(e) => e,
            Err(_) => return Err(self.quarantine(&path)),
        };
        if entry.key != self.key(kind, p) {
            return Ok(None);
        }
        if checksum(&entry.payload) != entry.checksum {
            return Err(self.quarantine(&path));
        }
        Ok(Some(serde_json::from_value(entry.payload)?))
    }

    fn quarantine(&self, path: &Path) -> CacheError {
        let mut target = path.as_os_str().to_owned();
        target.push(".quarantined");
        let _ = std::fs::rename(path, &target);
        CacheError::ChecksumMismatch(path.to_path_buf())
    }

    /// Loads the entry or computes and stores it. Cache failures fall back to
    /// recomputation; they never change the value returned.
    pub fn get_or_compute<T, E, F>(&self, kind: &str, p: u32, compute: F) -> Result<(T, CacheStatus), E>
    where
        T: Serialize + DeserializeOwned,
        F: FnOnce() -> Result<T, E>,
    {
        if self.dir.is_none() {
            return compute().map(|v| (v, CacheStatus::Disabled));
        }
        let status = match self.load::<T>(kind, p) {
            Ok(Some(v)) => return Ok((v, CacheStatus::Hit)),
            Ok(None) | Err(CacheError::Io(_)) | Err(CacheError::Encoding(_)) => CacheStatus::Miss,
            Err(CacheError::ChecksumMismatch(_)) => CacheStatus::Quarantined,
        };
        let v = compute()?;
        let _ = self.store(kind, p, &v);
        Ok((v, status))
    }
}
