//! On-disk cache of enumerated copy sets.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use sha2::{Digest, Sha256};
use simplicial_core::averaging::{AverageError, CopySource, DirectEnumeration};
use simplicial_core::geometry::{CopySet, SimplexConfig};

use crate::error::{ExperimentError, Result};

/// Environment variable overriding the cache directory.
pub const CACHE_ENV: &str = "SIMPLICIAL_CACHE_DIR";
pub const DEFAULT_CACHE_DIR: &str = ".simplicial-cache";

/// A [`CopySource`] that stores each enumerated copy set under a name derived
/// from the simplex and dilation. Entries are validated against their header
/// and checksum on every read; an invalid entry is re-enumerated and replaced.
#[derive(Debug)]
pub struct CopyCache {
    dir: PathBuf,
    hits: AtomicUsize,
    misses: AtomicUsize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CacheStats {
    pub hits: usize,
    pub misses: usize,
}

impl CopyCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir).map_err(|e| ExperimentError::io(&dir, e))?;
        Ok(Self {
            dir,
            hits: AtomicUsize::new(0),
            misses: AtomicUsize::new(0),
        })
    }

    /// Directory from the flag, else the environment, else the config, else
    /// the default.
    pub fn resolve_dir(flag: Option<&Path>, config: Option<&Path>) -> PathBuf {
        flag.map(Path::to_path_buf)
            .or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from))
            .or_else(|| config.map(Path::to_path_buf))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
        }
    }

    pub fn entry_path(&self, simplex: &SimplexConfig, lambda_sq: u64) -> PathBuf {
        let mut h = Sha256::new();
        h.update(format!("{}:{:?}", simplex.n(), simplex.vertices()).as_bytes());
        let tag = hex::encode(&h.finalize()[..8]);
        self.dir.join(format!(
            "copies-n{}-k{}-{tag}-l{lambda_sq}.txt",
            simplex.n(),
            simplex.k()
        ))
    }

    fn read(path: &Path, simplex: &SimplexConfig, lambda_sq: u64) -> Option<CopySet> {
        let file = File::open(path).ok()?;
        match CopySet::read_from(BufReader::new(file)) {
            Ok(set) if set.matches(simplex, lambda_sq) => Some(set),
            Ok(_) => {
                log::warn!(
                    "cache: {} belongs to other parameters, re-enumerating",
                    path.display()
                );
                None
            }
            Err(e) => {
                log::warn!("cache: {} is invalid ({e}), re-enumerating", path.display());
                None
            }
        }
    }

    fn store(&self, path: &Path, set: &CopySet) -> std::io::Result<()> {
        let tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        set.write_to(BufWriter::new(tmp.as_file()))?;
        tmp.persist(path).map_err(|e| e.error)?;
        Ok(())
    }
}

impl CopySource for CopyCache {
    fn copies(&self, simplex: &SimplexConfig, lambda_sq: u64) -> Result<CopySet, AverageError> {
        let path = self.entry_path(simplex, lambda_sq);
        if let Some(set) = Self::read(&path, simplex, lambda_sq) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            log::info!("cache hit: {}", path.display());
            return Ok(set);
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        log::info!("cache miss: {}", path.display());
        let set = DirectEnumeration.copies(simplex, lambda_sq)?;
        if let Err(e) = self.store(&path, &set) {
            log::warn!("cache: could not write {}: {e}", path.display());
        }
        Ok(set)
    }
}
