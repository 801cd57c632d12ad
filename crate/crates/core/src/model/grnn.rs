//! General regression neural network: a Nadaraya–Watson average of the
//! training targets with a Gaussian kernel of width σ in normalized feature
//! space.
//!
//! Kernel exponents are shifted by the smallest squared distance before
//! exponentiating. The ratio is unchanged, and a far-away query degrades to
//! its nearest neighbours instead of `0/0`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::{holdout_rms, meta, prepare, Hyperparameters, ModelKind, ModelParams, RegressorModel, MODEL_SCHEMA_VERSION};
use crate::error::{CoreError, Result};
use crate::linalg::Matrix;
use crate::record::{Dataset, Target, N_FEATURES};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrnnConfig {
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrnnParams {
    pub sigma: f64,
    /// Normalized training features, `(n, N_FEATURES)`.
    pub features: Matrix,
    pub targets: Vec<f64>,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl GrnnParams {
    pub fn new(sigma: f64, features: Matrix, targets: Vec<f64>) -> Result<Self> {
        let p = GrnnParams {
            sigma,
            features,
            targets,
        };
        p.check()?;
        Ok(p)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(CoreError::Argument(format!("GRNN sigma must be > 0, got {}", self.sigma)));
        }
        if self.targets.is_empty()
            || !self.features.is_consistent()
            || self.features.rows != self.targets.len()
            || self.features.cols != N_FEATURES
        {
            return Err(CoreError::Argument("GRNN arrays must be equal-length and nonempty".into()));
        }
        Ok(())
    }

    pub fn predict(&self, z: &[f64]) -> f64 {
        let n = self.targets.len();
        let d2: Vec<f64> = (0..n).map(|i| sq_dist(self.features.row(i), z)).collect();
        let d_min = d2.iter().copied().fold(f64::INFINITY, f64::min);
        let (y_lo, y_hi) = self
            .targets
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &y| (lo.min(y), hi.max(y)));
        let denom = 2.0 * self.sigma * self.sigma;
        let mut wsum = 0.0;
        let mut acc = 0.0;
        for (d, y) in d2.iter().zip(&self.targets) {
            let w = libm::exp(-(d - d_min) / denom);
            wsum += w;
            acc += w * (y - y_lo);
        }
        if !(wsum > 0.0) || !wsum.is_finite() {
            // unreachable with the shift unless inputs are NaN; nearest neighbour
            let i = d2
                .iter()
                .enumerate()
                .fold(0, |best, (i, d)| if *d < d2[best] { i } else { best });
            return self.targets[i];
        }
        (y_lo + acc / wsum).clamp(y_lo, y_hi)
    }
}

pub fn fit(train_set: &Dataset, target: Target, cfg: &GrnnConfig) -> Result<RegressorModel> {
    let (normalizer, zs, ys) = prepare(train_set, target)?;
    let params = GrnnParams::new(cfg.sigma, Matrix::from_rows(&zs), ys)?;
    Ok(RegressorModel {
        schema_version: MODEL_SCHEMA_VERSION,
        kind: ModelKind::Grnn,
        target,
        normalizer,
        params: ModelParams::Grnn(params),
        training_meta: meta(train_set, 0, Hyperparameters::Grnn(cfg.clone())),
    })
}

/// Fits on `train_set` for every σ and keeps the one with the lowest holdout
/// RMS; ties go to the smaller σ.
pub fn select_sigma(
    train_set: &Dataset,
    holdout: &Dataset,
    target: Target,
    sigma_grid: &[f64],
) -> Result<(GrnnConfig, Vec<(String, f64)>)> {
    if sigma_grid.is_empty() || sigma_grid.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
        return Err(CoreError::Argument("sigma grid must be nonempty and strictly positive".into()));
    }
    let mut grid = sigma_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let mut best: Option<(f64, f64)> = None;
    let mut scores = Vec::with_capacity(grid.len());
    for &sigma in &grid {
        let model = fit(train_set, target, &GrnnConfig { sigma })?;
        let rms = holdout_rms(&model, holdout, target)?;
        scores.push((format!("sigma={sigma}"), rms));
        if best.is_none_or(|(_, b)| rms < b) {
            best = Some((sigma, rms));
        }
    }
    let (sigma, _) = best.expect("grid is nonempty");
    Ok((GrnnConfig { sigma }, scores))
}
