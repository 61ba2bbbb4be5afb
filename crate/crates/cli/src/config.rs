//! Run configuration: a flat key-value TOML file, overridden by flags.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use ssg_core::{Approach, OovPolicy};

/// Flat config file keys. Every key is optional; command-line flags win.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub approach: Option<String>,
    pub alpha: Option<f64>,
    pub theta: Option<f64>,
    pub oov: Option<String>,
    pub permutations: Option<usize>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub corpus: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub sentence_vectors: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub lemmas: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("bad config file {}", path.display()))
    }
}

/// Fully resolved run settings after merging config file and flags.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub approach: Approach,
    pub alpha: f64,
    pub theta: f64,
    pub oov: OovPolicy,
    pub permutations: usize,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub corpus: PathBuf,
    pub embeddings: Option<PathBuf>,
    pub sentence_vectors: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

pub fn parse_oov(name: &str, seed: u64) -> Result<OovPolicy> {
    match name.to_ascii_lowercase().as_str() {
        "skip" => Ok(OovPolicy::Skip),
        "random" => Ok(OovPolicy::Random { seed }),
        other => bail!("oov: unknown policy '{other}' (expected 'skip' or 'random')"),
    }
}

pub fn validate(config: &RunConfig) -> Result<()> {
    if !(0.0..=1.0).contains(&config.alpha) {
        bail!("alpha: {} is outside [0, 1]", config.alpha);
    }
    if config.theta < 0.0 || !config.theta.is_finite() {
        bail!("theta: {} must be a finite non-negative number", config.theta);
    }
    if config.permutations == 0 {
        bail!("permutations: must be at least 1");
    }
    if !config.corpus.exists() {
        bail!("corpus: path {} does not exist", config.corpus.display());
    }
    for (key, path) in [
        ("embeddings", &config.embeddings),
        ("sentence_vectors", &config.sentence_vectors),
    ] {
        if let Some(p) = path {
            if !p.exists() {
                bail!("{key}: path {} does not exist", p.display());
            }
        }
    }
    Ok(())
}
