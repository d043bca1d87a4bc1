//! Content-addressed result cache.
//!
//! A payload is stored under the SHA-256 of `{kind, version, key}` where the
//! key is the part of the resolved config the computation depends on.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Serialize)]
struct Keyed<'a, K> {
    kind: &'a str,
    version: &'a str,
    key: &'a K,
}

pub fn content_hash<K: Serialize>(kind: &str, key: &K) -> Result<String, CliError> {
    let bytes = serde_json::to_vec(&Keyed {
        kind,
        version: VERSION,
        key,
    })?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Writes through a sibling temp file so readers never see partial content.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

#[derive(Debug, Default)]
pub struct Cache {
    dir: Option<PathBuf>,
    hits: AtomicUsize,
    misses: AtomicUsize,
}

impl Cache {
    pub fn disabled() -> Self {
        Self::default()
    }

    pub fn open(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: Some(dir.to_path_buf()),
            ..Self::default()
        })
    }

    pub fn hits(&self) -> usize {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> usize {
        self.misses.load(Ordering::Relaxed)
    }

    /// Returns the cached payload for `key`, computing and storing it on a miss.
    /// Unreadable entries count as misses and are overwritten.
    pub fn get_or_compute<K, T>(
        &self,
        kind: &str,
        key: &K,
        compute: impl FnOnce() -> Result<T, CliError>,
    ) -> Result<T, CliError>
    where
        K: Serialize,
        T: Serialize + DeserializeOwned,
    {
        let Some(dir) = &self.dir else {
            self.misses.fetch_add(1, Ordering::Relaxed);
            return compute();
        };
        let path = dir.join(format!("{}.json", content_hash(kind, key)?));
        if let Some(hit) = fs::read(&path).ok().and_then(|b| serde_json::from_slice(&b).ok()) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(hit);
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let value = compute()?;
        write_atomic(&path, &serde_json::to_vec(&value)?)?;
        Ok(value)
    }
}
