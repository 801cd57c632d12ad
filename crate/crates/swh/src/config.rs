//! Run configuration files. Command-line flags override file values, which
//! override the defaults below.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use swh_core::model::TrainSettings;
use swh_core::screening::DEFAULT_ENUMERATION_CAP;
use swh_core::synthetic::GeneratorConfig;
use swh_core::N_FEATURES;

use crate::dataset_io::{read_file, Schema};
use crate::error::{Error, Result};

/// Generator calibration shipped with the crate.
pub const DEFAULT_GENERATOR_JSON: &str = include_str!("../config/generator.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub seed: u64,
    pub split_fraction: f64,
    pub tolerance: f64,
    pub training: TrainSettings,
    pub screening: ScreeningConfig,
    pub paths: PathsConfig,
    pub schema: Schema,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 7,
            split_fraction: 0.85,
            tolerance: 0.30,
            training: TrainSettings::default(),
            screening: ScreeningConfig::default(),
            paths: PathsConfig::default(),
            schema: Schema::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScreeningConfig {
    /// Explicit per-feature value counts; when absent they are allocated
    /// from the MLFN first-layer weights.
    pub counts: Option<[usize; N_FEATURES]>,
    pub value_budget: usize,
    pub per_feature_max: Option<usize>,
    /// `final_temp` count applied over the weight-based allocation; final
    /// temperature gets more values than its weight suggests.
    pub final_temp_count: Option<usize>,
    /// Explicit `final_temp` values, replacing evenly spaced ones.
    pub final_temp_values: Option<Vec<f64>>,
    pub top_k: usize,
    pub threshold: Option<f64>,
    pub workers: usize,
    pub chunk_size: u64,
    pub enumeration_cap: u128,
    /// Runs larger than this need an explicit opt-in.
    pub large_run_threshold: u128,
}

impl Default for ScreeningConfig {
    fn default() -> Self {
        ScreeningConfig {
            counts: None,
            value_budget: 70,
            per_feature_max: None,
            final_temp_count: Some(17),
            final_temp_values: None,
            top_k: 100,
            threshold: None,
            workers: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            chunk_size: 1 << 16,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            large_run_threshold: 100_000_000,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PathsConfig {
    pub dataset: Option<PathBuf>,
    pub hcr_model: Option<PathBuf>,
    pub hlc_model: Option<PathBuf>,
    pub candidate_db: Option<PathBuf>,
    pub static_dir: Option<PathBuf>,
}

fn from_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let bytes = read_file(path)?;
    serde_json::from_slice(&bytes).map_err(|e| Error::parse(path, e.to_string()))
}

pub fn load_run_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(p) => from_json(p),
        None => Ok(RunConfig::default()),
    }
}

pub fn load_generator_config(path: Option<&Path>) -> Result<GeneratorConfig> {
    let cfg: GeneratorConfig = match path {
        Some(p) => from_json(p)?,
        None => serde_json::from_str(DEFAULT_GENERATOR_JSON)
            .map_err(|e| Error::parse("config/generator.json", e.to_string()))?,
    };
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_generator_matches_builtin() {
        assert_eq!(load_generator_config(None).unwrap(), GeneratorConfig::default());
    }

    #[test]
    fn partial_run_config_keeps_defaults() {
        let cfg: RunConfig = serde_json::from_str(r#"{"seed": 3, "screening": {"top_k": 5}}"#).unwrap();
        assert_eq!(cfg.seed, 3);
        assert_eq!(cfg.screening.top_k, 5);
        assert_eq!(cfg.split_fraction, 0.85);
        assert_eq!(cfg.training, TrainSettings::default());
    }
}
