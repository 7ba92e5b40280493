//! Runtime configuration. Each key resolves as flag, then `CUSPDIFF_*`
//! environment variable (both handled by clap), then the TOML config file,
//! then the built-in default.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::Args;
use cuspdiff::arith::FactorConfig;
use cuspdiff::lab::LabConfig;
use cuspdiff::qexp::{CoefficientCache, DEFAULT_N_TERMS_CAP};
use serde::Deserialize;

use crate::CliError;

pub const DEFAULT_FACTOR_TIMEOUT_SECS: u64 = 10;
pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Args, Debug, Clone, Default)]
pub struct ConfigArgs {
    /// TOML file with any of: cache_dir, n_terms_cap, factor_timeout_secs, threads, seed
    #[arg(long, global = true, env = "CUSPDIFF_CONFIG", value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Directory for cached q-expansions; caching is off when unset
    #[arg(long, global = true, env = "CUSPDIFF_CACHE_DIR", value_name = "DIR")]
    pub cache_dir: Option<PathBuf>,
    /// Largest number of q-expansion terms any command may request [default: 100000]
    #[arg(long, global = true, env = "CUSPDIFF_N_TERMS_CAP", value_name = "N")]
    pub n_terms_cap: Option<usize>,
    /// Per-integer factorization deadline in seconds [default: 10]
    #[arg(long, global = true, env = "CUSPDIFF_FACTOR_TIMEOUT_SECS", value_name = "SECS")]
    pub factor_timeout_secs: Option<u64>,
    /// Worker threads, a positive integer or "auto" [default: auto]
    #[arg(long, global = true, env = "CUSPDIFF_THREADS", value_name = "N|auto")]
    pub threads: Option<String>,
    /// Seed for sampling and factorization [default: 24301]
    #[arg(long, global = true, env = "CUSPDIFF_SEED", value_name = "SEED")]
    pub seed: Option<u64>,
}

/// Contents of the config file; every key optional.
#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    cache_dir: Option<PathBuf>,
    n_terms_cap: Option<usize>,
    factor_timeout_secs: Option<u64>,
    threads: Option<ThreadsValue>,
    seed: Option<u64>,
}

#[derive(Deserialize, Debug)]
#[serde(untagged)]
enum ThreadsValue {
    Count(i64),
    Word(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Threads {
    Auto,
    Fixed(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliConfig {
    pub cache_dir: Option<PathBuf>,
    pub n_terms_cap: usize,
    pub factor_timeout_secs: u64,
    pub threads: Threads,
    pub seed: u64,
}

fn invalid(key: &str, reason: impl Into<String>) -> CliError {
    CliError::Config {
        key: key.to_string(),
        reason: reason.into(),
    }
}

fn parse_threads(key: &str, raw: &str) -> Result<Threads, CliError> {
    if raw == "auto" {
        return Ok(Threads::Auto);
    }
    match raw.parse::<usize>() {
        Ok(n) if n > 0 => Ok(Threads::Fixed(n)),
        _ => Err(invalid(key, format!("expected a positive integer or \"auto\", got {raw:?}"))),
    }
}

fn read_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| invalid("config", format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| invalid("config", format!("{}: {}", path.display(), e.message())))
}

impl CliConfig {
    pub fn resolve(args: &ConfigArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => read_file(path)?,
            None => FileConfig::default(),
        };
        let threads = match (&args.threads, file.threads) {
            (Some(raw), _) => parse_threads("threads", raw)?,
            (None, Some(ThreadsValue::Word(w))) => parse_threads("threads", &w)?,
            (None, Some(ThreadsValue::Count(n))) => parse_threads("threads", &n.to_string())?,
            (None, None) => Threads::Auto,
        };
        let config = CliConfig {
            cache_dir: args.cache_dir.clone().or(file.cache_dir).filter(|p| !p.as_os_str().is_empty()),
            n_terms_cap: args.n_terms_cap.or(file.n_terms_cap).unwrap_or(DEFAULT_N_TERMS_CAP),
            factor_timeout_secs: args
                .factor_timeout_secs
                .or(file.factor_timeout_secs)
                .unwrap_or(DEFAULT_FACTOR_TIMEOUT_SECS),
            threads,
            seed: args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.n_terms_cap < 2 {
            return Err(invalid("n_terms_cap", "must be at least 2"));
        }
        if self.factor_timeout_secs == 0 {
            return Err(invalid("factor_timeout_secs", "must be positive"));
        }
        if let Some(dir) = &self.cache_dir {
            if dir.exists() && !dir.is_dir() {
                return Err(invalid("cache_dir", format!("{} is not a directory", dir.display())));
            }
        }
        Ok(())
    }

    /// Install the worker ceiling for the global rayon pool.
    pub fn install_threads(&self) -> Result<(), CliError> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Threads::Fixed(n) = self.threads {
            builder = builder.num_threads(n);
        }
        builder
            .build_global()
            .map_err(|e| invalid("threads", e.to_string()))
    }

    pub fn cache(&self) -> CoefficientCache {
        let cache = match &self.cache_dir {
            Some(dir) => CoefficientCache::new(dir),
            None => CoefficientCache::disabled(),
        };
        cache.with_cap(self.n_terms_cap)
    }

    pub fn lab(&self) -> LabConfig {
        LabConfig {
            cache: self.cache(),
            factor: FactorConfig {
                timeout: Duration::from_secs(self.factor_timeout_secs),
                seed: self.seed,
            },
        }
    }
}
