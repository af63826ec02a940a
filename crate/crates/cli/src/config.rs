use std::path::{Path, PathBuf};

use anyhow::Result;
use lingctl_core::controls::DEFAULT_MAX_ATTEMPTS;
use lingctl_core::dataset::{DEFAULT_K, DEFAULT_MAX_CONTROLS, DEFAULT_SIGMA};
use serde::Deserialize;

use crate::io::read_json;

/// Shared settings read from `--config`; command-line flags win.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub m: Option<usize>,
    pub k: Option<usize>,
    pub sigma: Option<f64>,
    pub max_attempts: Option<usize>,
    /// Default stats file for commands that take `--stats`.
    pub stats: Option<PathBuf>,
    /// Default endpoint file for `evaluate`.
    pub endpoint: Option<PathBuf>,
}

impl RunConfig {
    /// Loads `path`; relative paths inside are taken relative to it.
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg: RunConfig = read_json(path)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.stats, &mut cfg.endpoint].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn seed(&self, flag: Option<u64>) -> u64 {
        flag.or(self.seed).unwrap_or(0)
    }

    pub fn m(&self, flag: Option<usize>) -> usize {
        flag.or(self.m).unwrap_or(DEFAULT_MAX_CONTROLS)
    }

    pub fn k(&self, flag: Option<usize>) -> usize {
        flag.or(self.k).unwrap_or(DEFAULT_K)
    }

    pub fn sigma(&self, flag: Option<f64>) -> f64 {
        flag.or(self.sigma).unwrap_or(DEFAULT_SIGMA)
    }

    pub fn max_attempts(&self, flag: Option<usize>) -> usize {
        flag.or(self.max_attempts).unwrap_or(DEFAULT_MAX_ATTEMPTS)
    }

    pub fn stats(&self, flag: Option<PathBuf>) -> Option<PathBuf> {
        flag.or_else(|| self.stats.clone())
    }

    pub fn endpoint(&self, flag: Option<PathBuf>) -> Option<PathBuf> {
        flag.or_else(|| self.endpoint.clone())
    }
}
