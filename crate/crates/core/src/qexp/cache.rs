//! On-disk coefficient cache.
//!
//! One text file per `(weight, n_terms)`:
//!
//! ```text
//! cuspdiff-coefficients v1
//! weight 16
//! n_terms 1001
//! sha256 <hex digest of the coefficient lines, each terminated by '\n'>
//! 0
//! 1
//! 216
//! ...
//! ```
//!
//! Coefficients are decimal, one per line, starting at `q⁰`. A file whose
//! header or digest does not match is discarded and recomputed.

use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use sha2::{Digest, Sha256};

use super::{eigenform_capped, Eigenform, QSeries, DEFAULT_N_TERMS_CAP};
use crate::error::{Error, Result};

pub const CACHE_FORMAT_TAG: &str = "cuspdiff-coefficients v1";

/// Environment variable naming the cache directory.
pub const CACHE_DIR_ENV: &str = "CUSPDIFF_CACHE_DIR";

#[derive(Clone, Debug)]
pub struct CoefficientCache {
    dir: Option<PathBuf>,
    cap: usize,
}

impl Default for CoefficientCache {
    fn default() -> Self {
        CoefficientCache::disabled()
    }
}

impl CoefficientCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        CoefficientCache {
            dir: Some(dir.into()),
            cap: DEFAULT_N_TERMS_CAP,
        }
    }

    /// A cache that always recomputes and never touches the disk.
    pub fn disabled() -> Self {
        CoefficientCache {
            dir: None,
            cap: DEFAULT_N_TERMS_CAP,
        }
    }

    /// Directory from [`CACHE_DIR_ENV`], or disabled when unset.
    pub fn from_env() -> Self {
        match std::env::var_os(CACHE_DIR_ENV) {
            Some(dir) if !dir.is_empty() => CoefficientCache::new(dir),
            _ => CoefficientCache::disabled(),
        }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn path_for(&self, weight: u32, n_terms: usize) -> Option<PathBuf> {
        self.dir
            .as_ref()
            .map(|d| d.join(format!("eigenform_k{weight}_n{n_terms}.txt")))
    }

    /// Load the form from disk if a valid file exists, otherwise compute and
    /// store it.
    pub fn eigenform(&self, weight: u32, n_terms: usize) -> Result<Eigenform> {
        let Some(path) = self.path_for(weight, n_terms) else {
            return eigenform_capped(weight, n_terms, self.cap);
        };
        if let Ok(text) = fs::read_to_string(&path) {
            if let Ok(coeffs) = decode(&text, weight, n_terms) {
                return Eigenform::from_series(weight, QSeries::new(coeffs, format!("f{weight}")));
            }
        }
        let f = eigenform_capped(weight, n_terms, self.cap)?;
        if let Some(dir) = &self.dir {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, encode(&f)).map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))?;
        Ok(f)
    }
}

fn body_of(coeffs: &[BigInt]) -> String {
    let mut body = String::new();
    for c in coeffs {
        body.push_str(&c.to_string());
        body.push('\n');
    }
    body
}

fn digest(body: &str) -> String {
    hex::encode(Sha256::digest(body.as_bytes()))
}

/// Serialize a form in the cache file format.
pub(crate) fn encode(f: &Eigenform) -> String {
    let body = body_of(f.series().coeffs());
    format!(
        "{CACHE_FORMAT_TAG}\nweight {}\nn_terms {}\nsha256 {}\n{body}",
        f.weight(),
        f.n_terms(),
        digest(&body)
    )
}

fn decode(text: &str, weight: u32, n_terms: usize) -> std::result::Result<Vec<BigInt>, String> {
    let mut lines = text.splitn(5, '\n');
    let mut header = |key: &str| -> std::result::Result<String, String> {
        let line = lines.next().ok_or("truncated header")?;
        line.strip_prefix(key)
            .map(|v| v.trim().to_string())
            .ok_or_else(|| format!("expected `{key}`"))
    };
    if !header(CACHE_FORMAT_TAG)?.is_empty() {
        return Err("bad tag".into());
    }
    if header("weight ")? != weight.to_string() || header("n_terms ")? != n_terms.to_string() {
        return Err("header mismatch".into());
    }
    let sum = header("sha256 ")?;
    let body = lines.next().unwrap_or("");
    if digest(body) != sum {
        return Err("checksum mismatch".into());
    }
    let coeffs: Vec<BigInt> = body
        .lines()
        .map(|l| l.parse::<BigInt>().map_err(|e| e.to_string()))
        .collect::<std::result::Result<_, _>>()?;
    if coeffs.len() != n_terms {
        return Err("wrong coefficient count".into());
    }
    Ok(coeffs)
}
