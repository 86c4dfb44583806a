//! Flat-file results cache: one certificate file per instance plus an
//! index. Hits are re-verified before use, so a corrupted or tampered cache
//! can cost a recomputation but never a wrong answer.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use vdw_triples::checker::verify_certificate;
use vdw_triples::search::ENGINE_VERSION;
use vdw_triples::{Certificate, CertKind};

pub const CACHE_DIR_ENV: &str = "VDW_CACHE_DIR";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CacheEntry {
    /// "exact", "lower-bound", or "dne".
    pub status: String,
    /// N for exact, the certified depth for lower bounds, 0 for dne.
    pub value: u64,
    pub certificate: Option<String>,
    pub engine_version: String,
    pub seconds: f64,
}

#[derive(Debug)]
pub struct ResultsCache {
    dir: PathBuf,
    index: BTreeMap<String, CacheEntry>,
}

fn key(a: u64, b: u64, r: u64) -> String {
    format!("{a},{b},{r}")
}

/// Writes via a temp file in the same directory, then renames into place.
fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)
}

impl ResultsCache {
    pub fn open() -> std::io::Result<Self> {
        let dir = std::env::var_os(CACHE_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(".vdw-cache"));
        fs::create_dir_all(&dir)?;
        let index_path = dir.join("index.json");
        // A missing or corrupt index just means an empty cache.
        let index = fs::read_to_string(&index_path)
            .ok()
            .and_then(|s| serde_json::from_str(&s).ok())
            .unwrap_or_default();
        Ok(Self { dir, index })
    }

    /// Returns the cached exact value only if the stored certificate still
    /// verifies and matches the claim (N - 1 triple-free elements).
    pub fn lookup_exact(&self, a: u64, b: u64, r: u64) -> Option<u64> {
        let entry = self.index.get(&key(a, b, r))?;
        if entry.status != "exact" {
            return None;
        }
        let path = self.dir.join(entry.certificate.as_deref()?);
        let cert = Certificate::from_json(&fs::read_to_string(path).ok()?).ok()?;
        let consistent = cert.a == a
            && cert.b == b
            && cert.r == r
            && cert.kind == CertKind::LowerBoundWitness
            && cert.n == entry.value - 1;
        (consistent && verify_certificate(&cert).is_valid()).then_some(entry.value)
    }

    pub fn store_exact(
        &mut self,
        a: u64,
        b: u64,
        r: u64,
        n: u64,
        witness: &Certificate,
        seconds: f64,
    ) -> std::io::Result<()> {
        let file = format!("{a}_{b}_{r}.json");
        write_atomic(&self.dir.join(&file), &witness.to_json())?;
        self.index.insert(
            key(a, b, r),
            CacheEntry {
                status: "exact".into(),
                value: n,
                certificate: Some(file),
                engine_version: ENGINE_VERSION.into(),
                seconds,
            },
        );
        self.flush()
    }

    pub fn store_dne(&mut self, a: u64, b: u64, r: u64) -> std::io::Result<()> {
        self.index.insert(
            key(a, b, r),
            CacheEntry {
                status: "dne".into(),
                value: 0,
                certificate: None,
                engine_version: ENGINE_VERSION.into(),
                seconds: 0.0,
            },
        );
        self.flush()
    }

    fn flush(&self) -> std::io::Result<()> {
        let body = serde_json::to_string_pretty(&self.index).expect("index serializes");
        write_atomic(&self.dir.join("index.json"), &body)
    }
}
