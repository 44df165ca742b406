//! Run configuration: a JSON file holds the scenario, flags override the
//! reproducibility knobs.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use lrfc_cache_core::analysis::NetworkConfig;
use serde::{Deserialize, Serialize};

/// Connectivity distribution used by the bundled reference scenario.
pub const REFERENCE_GAMMA: [f64; 4] = [0.2907, 0.6591, 0.0430, 0.0072];

/// On-disk scenario. Every field is optional; omitted ones fall back to the
/// reference scenario (n=100, k=10, q=2, M=0, alpha=0.8, the reference
/// connectivity distribution, seed 1, 10^5 trials).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default = "defaults::n")]
    pub n: usize,
    #[serde(default = "defaults::k")]
    pub k: u32,
    #[serde(default = "defaults::q")]
    pub q: u16,
    #[serde(rename = "M", default)]
    pub m: usize,
    #[serde(default = "defaults::alpha")]
    pub alpha: f64,
    #[serde(default = "defaults::gamma")]
    pub gamma: Vec<f64>,
    #[serde(default = "defaults::seed")]
    pub seed: u64,
    #[serde(default = "defaults::trials")]
    pub trials: u64,
}

mod defaults {
    pub fn n() -> usize {
        100
    }
    pub fn k() -> u32 {
        10
    }
    pub fn q() -> u16 {
        2
    }
    pub fn alpha() -> f64 {
        0.8
    }
    pub fn gamma() -> Vec<f64> {
        super::REFERENCE_GAMMA.to_vec()
    }
    pub fn seed() -> u64 {
        1
    }
    pub fn trials() -> u64 {
        100_000
    }
}

impl Default for FileConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("empty object deserializes via field defaults")
    }
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn to_network(&self) -> NetworkConfig {
        NetworkConfig {
            library_size: self.n,
            symbols_per_file: self.k,
            cache_files: self.m,
            order: self.q,
            alpha: self.alpha,
            gamma: self.gamma.clone(),
            seed: self.seed,
            trials: self.trials,
        }
    }
}

/// Flags shared by every scenario-driven subcommand.
#[derive(Debug, Clone, Args)]
pub struct ScenarioArgs {
    /// JSON scenario file; omitted fields use the reference scenario
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Override the scenario seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override the scenario trial count
    #[arg(long)]
    pub trials: Option<u64>,
    /// Series truncation tolerance for the overhead law
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Write the primary output here instead of stdout
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

impl ScenarioArgs {
    pub fn file_config(&self) -> Result<FileConfig> {
        let mut file = match &self.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        if let Some(seed) = self.seed {
            file.seed = seed;
        }
        if let Some(trials) = self.trials {
            file.trials = trials;
        }
        Ok(file)
    }

    pub fn network(&self) -> Result<NetworkConfig> {
        let cfg = self.file_config()?.to_network();
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Write `content` to `--out` or stdout.
pub fn emit(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{content}"),
    }
    Ok(())
}
