//! The four regressor families behind one train/predict contract.
//!
//! Every model is single-target, immutable once trained, and predicts from
//! z-scored features using the [`Normalizer`] captured at training time.

pub mod elm;
pub mod grnn;
pub mod lssvm;
pub mod mlfn;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::normalize::Normalizer;
use crate::record::{Dataset, DesignRecord, Target, N_FEATURES};
use crate::split::split;

pub use elm::{ElmConfig, ElmParams};
pub use grnn::{GrnnConfig, GrnnParams};
pub use lssvm::{LssvmConfig, LssvmParams};
pub use mlfn::{MlfnConfig, MlfnParams, Network};

pub const MODEL_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Mlfn,
    Grnn,
    Elm,
    Lssvm,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Grnn, ModelKind::Mlfn, ModelKind::Lssvm, ModelKind::Elm];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Mlfn => "mlfn",
            ModelKind::Grnn => "grnn",
            ModelKind::Elm => "elm",
            ModelKind::Lssvm => "lssvm",
        }
    }

    pub fn parse(s: &str) -> Option<ModelKind> {
        match s {
            "mlfn" => Some(ModelKind::Mlfn),
            "grnn" => Some(ModelKind::Grnn),
            "elm" => Some(ModelKind::Elm),
            "lssvm" | "svm" => Some(ModelKind::Lssvm),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelParams {
    Mlfn(MlfnParams),
    Grnn(GrnnParams),
    Elm(ElmParams),
    Lssvm(LssvmParams),
}

impl ModelParams {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelParams::Mlfn(_) => ModelKind::Mlfn,
            ModelParams::Grnn(_) => ModelKind::Grnn,
            ModelParams::Elm(_) => ModelKind::Elm,
            ModelParams::Lssvm(_) => ModelKind::Lssvm,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hyperparameters {
    Mlfn(MlfnConfig),
    Grnn(GrnnConfig),
    Elm(ElmConfig),
    Lssvm(LssvmConfig),
}

/// Outcome of a holdout grid search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoldoutSelection {
    pub holdout_fraction: f64,
    pub seed: u64,
    /// `(grid point label, holdout RMS)` in grid order.
    pub scores: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub seed: u64,
    pub hyperparameters: Hyperparameters,
    /// Hex FNV-1a of the training set's canonical CSV.
    pub dataset_fingerprint: String,
    pub n_train: usize,
    #[serde(default)]
    pub selection: Option<HoldoutSelection>,
    /// Training loss sampled at regular epochs (MLFN only).
    #[serde(default)]
    pub loss_history: Vec<f64>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressorModel {
    pub schema_version: u32,
    pub kind: ModelKind,
    pub target: Target,
    pub normalizer: Normalizer,
    pub params: ModelParams,
    pub training_meta: TrainingMeta,
}

impl RegressorModel {
    /// Structural checks for models read from outside: kind/params agreement,
    /// dimension chaining and finiteness.
    pub fn check(&self) -> Result<()> {
        if self.schema_version != MODEL_SCHEMA_VERSION {
            return Err(CoreError::Argument(alloc::format!(
                "unsupported model schema version {}",
                self.schema_version
            )));
        }
        if self.kind != self.params.kind() {
            return Err(CoreError::Argument(alloc::format!(
                "model kind `{}` does not match its `{}` parameters",
                self.kind.name(),
                self.params.kind().name()
            )));
        }
        let nz_ok = self
            .normalizer
            .mean
            .iter()
            .chain(&self.normalizer.std_dev)
            .all(|v| v.is_finite());
        if !nz_ok {
            return Err(CoreError::Argument("normalizer has non-finite entries".into()));
        }
        match &self.params {
            ModelParams::Mlfn(p) => p.check(),
            ModelParams::Grnn(p) => p.check(),
            ModelParams::Elm(p) => p.check(),
            ModelParams::Lssvm(p) => p.check(),
        }
    }

    /// Prediction for a raw (unnormalized) feature vector, no validation.
    pub fn predict_features(&self, x: &[f64; N_FEATURES]) -> f64 {
        let z = self.normalizer.transform(x);
        match &self.params {
            ModelParams::Mlfn(p) => p.predict(&z),
            ModelParams::Grnn(p) => p.predict(&z),
            ModelParams::Elm(p) => p.predict(&z),
            ModelParams::Lssvm(p) => p.predict(&z),
        }
    }

    pub fn predict(&self, record: &DesignRecord) -> Result<f64> {
        let x = record.features();
        if let Some(j) = x.iter().position(|v| !v.is_finite()) {
            return Err(CoreError::Argument(alloc::format!(
                "feature `{}` is not finite",
                crate::record::Feature::ALL[j].name()
            )));
        }
        Ok(self.predict_features(&x))
    }

    pub fn mlfn(&self) -> Option<&MlfnParams> {
        match &self.params {
            ModelParams::Mlfn(p) => Some(p),
            _ => None,
        }
    }
}

/// A freshly trained model plus the per-epoch loss (MLFN only; empty otherwise).
#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub model: RegressorModel,
    pub loss_history: Vec<f64>,
}

/// Hyperparameters and search grids for all four kinds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainSettings {
    pub mlfn_hidden_sizes: Vec<usize>,
    pub mlfn_learning_rate: f64,
    pub mlfn_momentum: f64,
    pub mlfn_epochs: usize,
    pub grnn_sigma_grid: Vec<f64>,
    pub elm_hidden_size: usize,
    pub elm_ridge: f64,
    pub lssvm_gamma_grid: Vec<f64>,
    pub lssvm_kernel_width_grid: Vec<f64>,
    /// Share of the training set held out for GRNN / LS-SVM grid search.
    pub holdout_fraction: f64,
}

impl Default for TrainSettings {
    fn default() -> Self {
        TrainSettings {
            mlfn_hidden_sizes: vec![8],
            mlfn_learning_rate: 0.05,
            mlfn_momentum: 0.9,
            mlfn_epochs: 20_000,
            grnn_sigma_grid: vec![0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0],
            elm_hidden_size: 40,
            elm_ridge: 1e-4,
            lssvm_gamma_grid: vec![0.1, 1.0, 10.0, 100.0],
            lssvm_kernel_width_grid: vec![1.0, 2.0, 4.0, 8.0],
            holdout_fraction: 0.15,
        }
    }
}

impl TrainSettings {
    pub fn mlfn_config(&self, seed: u64) -> MlfnConfig {
        MlfnConfig {
            hidden_sizes: self.mlfn_hidden_sizes.clone(),
            learning_rate: self.mlfn_learning_rate,
            momentum: self.mlfn_momentum,
            epochs: self.mlfn_epochs,
            seed,
        }
    }

    pub fn elm_config(&self, seed: u64) -> ElmConfig {
        ElmConfig {
            hidden_size: self.elm_hidden_size,
            ridge: self.elm_ridge,
            seed,
        }
    }
}

/// Trains one model of `kind`. GRNN and LS-SVM pick their hyperparameters on
/// a seeded holdout carved from `train`, then refit on all of `train`.
pub fn train(kind: ModelKind, train_set: &Dataset, target: Target, settings: &TrainSettings, seed: u64) -> Result<TrainedModel> {
    match kind {
        ModelKind::Mlfn => mlfn::fit(train_set, target, &settings.mlfn_config(seed)),
        ModelKind::Elm => elm::fit(train_set, target, &settings.elm_config(seed)).map(no_history),
        ModelKind::Grnn => {
            let (fit_part, holdout) = split(train_set, 1.0 - settings.holdout_fraction, seed)?;
            let (best, scores) = grnn::select_sigma(&fit_part, &holdout, target, &settings.grnn_sigma_grid)?;
            let mut model = grnn::fit(train_set, target, &GrnnConfig { sigma: best.sigma })?;
            model.training_meta.seed = seed;
            model.training_meta.selection = Some(HoldoutSelection {
                holdout_fraction: settings.holdout_fraction,
                seed,
                scores,
            });
            Ok(no_history(model))
        }
        ModelKind::Lssvm => {
            let (fit_part, holdout) = split(train_set, 1.0 - settings.holdout_fraction, seed)?;
            let (best, scores) = lssvm::select(
                &fit_part,
                &holdout,
                target,
                &settings.lssvm_gamma_grid,
                &settings.lssvm_kernel_width_grid,
            )?;
            let mut model = lssvm::fit(train_set, target, &best)?;
            model.training_meta.seed = seed;
            model.training_meta.selection = Some(HoldoutSelection {
                holdout_fraction: settings.holdout_fraction,
                seed,
                scores,
            });
            Ok(no_history(model))
        }
    }
}

fn no_history(model: RegressorModel) -> TrainedModel {
    TrainedModel {
        model,
        loss_history: Vec::new(),
    }
}

/// Normalizer, z-scored features and targets for a training set.
pub(crate) fn prepare(train_set: &Dataset, target: Target) -> Result<(Normalizer, Vec<[f64; N_FEATURES]>, Vec<f64>)> {
    if train_set.is_empty() {
        return Err(CoreError::EmptyInput("training dataset"));
    }
    let (xs, ys) = train_set.xy(target)?;
    let nz = Normalizer::fit(&xs)?;
    let zs = xs.iter().map(|x| nz.transform(x)).collect();
    Ok((nz, zs, ys))
}

pub(crate) fn meta(train_set: &Dataset, seed: u64, hyperparameters: Hyperparameters) -> TrainingMeta {
    TrainingMeta {
        seed,
        hyperparameters,
        dataset_fingerprint: crate::fingerprint_hex(train_set.fingerprint()),
        n_train: train_set.len(),
        selection: None,
        loss_history: Vec::new(),
        warnings: Vec::new(),
    }
}

pub(crate) fn holdout_rms(model: &RegressorModel, holdout: &Dataset, target: Target) -> Result<f64> {
    let (xs, ys) = holdout.xy(target)?;
    let zs: Vec<f64> = xs.iter().map(|x| model.predict_features(x)).collect();
    if zs.iter().any(|v| !v.is_finite()) {
        return Ok(f64::INFINITY);
    }
    crate::metrics::rms_error(&zs, &ys)
}

#[inline]
pub(crate) fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + libm::exp(-z))
}
