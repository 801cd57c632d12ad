//! Least-squares SVM regression with an RBF kernel.
//!
//! Training solves the bordered KKT system
//!
//! ```text
//! [ 0   1ᵀ        ] [b]   [0]
//! [ 1   K + I/γ   ] [α] = [y]
//! ```
//!
//! by two Cholesky solves against `A = K + I/γ` (`Aη = 1`, `Aν = y`,
//! `b = 1ᵀν / 1ᵀη`, `α = ν − bη`) followed by iterative refinement on the
//! full system.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::{holdout_rms, meta, prepare, Hyperparameters, ModelKind, ModelParams, RegressorModel, MODEL_SCHEMA_VERSION};
use crate::error::{CoreError, Result};
use crate::linalg::{Cholesky, Matrix};
use crate::record::{Dataset, Target, N_FEATURES};

/// Condition estimates above this attach a warning to the model.
pub const CONDITION_WARNING: f64 = 1e12;

const REFINEMENT_STEPS: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LssvmConfig {
    pub gamma: f64,
    pub kernel_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LssvmParams {
    pub gamma: f64,
    pub kernel_width: f64,
    pub alpha: Vec<f64>,
    pub bias: f64,
    /// Normalized training features, `(n, N_FEATURES)`.
    pub features: Matrix,
}

pub fn rbf(a: &[f64], b: &[f64], width: f64) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    libm::exp(-d2 / (2.0 * width * width))
}

/// `K + I/γ` for normalized training features.
pub fn system_matrix(features: &Matrix, gamma: f64, width: f64) -> Matrix {
    let n = features.rows;
    let mut a = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let k = rbf(features.row(i), features.row(j), width);
            a.set(i, j, k);
            a.set(j, i, k);
        }
        let v = a.get(i, i) + 1.0 / gamma;
        a.set(i, i, v);
    }
    a
}

impl LssvmParams {
    pub fn predict(&self, z: &[f64]) -> f64 {
        let s: f64 = self
            .alpha
            .iter()
            .enumerate()
            .map(|(i, a)| a * rbf(self.features.row(i), z, self.kernel_width))
            .sum();
        s + self.bias
    }

    pub fn check(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.kernel_width > 0.0) {
            return Err(CoreError::Argument("LS-SVM gamma and kernel width must be > 0".into()));
        }
        if self.alpha.is_empty()
            || !self.features.is_consistent()
            || self.features.rows != self.alpha.len()
            || self.features.cols != N_FEATURES
        {
            return Err(CoreError::Argument("LS-SVM dimensions are inconsistent".into()));
        }
        if !self.bias.is_finite() || self.alpha.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::Argument("LS-SVM has non-finite coefficients".into()));
        }
        Ok(())
    }

    /// `‖[0; y] − A_kkt [b; α]‖∞` for the stored training points.
    pub fn kkt_residual(&self, targets: &[f64]) -> f64 {
        let a = system_matrix(&self.features, self.gamma, self.kernel_width);
        let (r0, r) = bordered_residual(&a, self.bias, &self.alpha, 0.0, targets);
        r.iter().fold(libm::fabs(r0), |m, v| m.max(libm::fabs(*v)))
    }
}

fn bordered_residual(a: &Matrix, b: f64, alpha: &[f64], c0: f64, c: &[f64]) -> (f64, Vec<f64>) {
    let r0 = c0 - alpha.iter().sum::<f64>();
    let aa = a.mul_vec(alpha);
    let r = c.iter().zip(aa).map(|(ci, ai)| ci - b - ai).collect();
    (r0, r)
}

/// Solves the bordered system with right-hand side `[c0; c]`.
fn bordered_solve(ch: &Cholesky, eta: &[f64], c0: f64, c: &[f64]) -> (f64, Vec<f64>) {
    let nu = ch.solve(c);
    let b = (nu.iter().sum::<f64>() - c0) / eta.iter().sum::<f64>();
    let alpha = nu.iter().zip(eta).map(|(v, e)| v - b * e).collect();
    (b, alpha)
}

/// Returns `(α, b, condition estimate)`.
pub fn solve_kkt(features: &Matrix, y: &[f64], gamma: f64, width: f64) -> Result<(Vec<f64>, f64, f64)> {
    let n = features.rows;
    let a = system_matrix(features, gamma, width);
    let ch = Cholesky::factor(&a)?;
    let eta = ch.solve(&alloc::vec![1.0; n]);
    let (mut b, mut alpha) = bordered_solve(&ch, &eta, 0.0, y);
    for _ in 0..REFINEMENT_STEPS {
        let (r0, r) = bordered_residual(&a, b, &alpha, 0.0, y);
        let (db, da) = bordered_solve(&ch, &eta, r0, &r);
        b += db;
        for (x, d) in alpha.iter_mut().zip(da) {
            *x += d;
        }
    }
    if !b.is_finite() || alpha.iter().any(|v| !v.is_finite()) {
        return Err(CoreError::Singular("LS-SVM solution is non-finite".into()));
    }
    Ok((alpha, b, ch.condition_estimate()))
}

pub fn fit(train_set: &Dataset, target: Target, cfg: &LssvmConfig) -> Result<RegressorModel> {
    if !(cfg.gamma > 0.0 && cfg.gamma.is_finite() && cfg.kernel_width > 0.0 && cfg.kernel_width.is_finite()) {
        return Err(CoreError::Argument(format!(
            "LS-SVM needs gamma > 0 and kernel width > 0, got {} and {}",
            cfg.gamma, cfg.kernel_width
        )));
    }
    let (normalizer, zs, ys) = prepare(train_set, target)?;
    let features = Matrix::from_rows(&zs);
    let (alpha, bias, cond) = solve_kkt(&features, &ys, cfg.gamma, cfg.kernel_width)?;
    let mut training_meta = meta(train_set, 0, Hyperparameters::Lssvm(cfg.clone()));
    if cond > CONDITION_WARNING {
        training_meta
            .warnings
            .push(format!("ill-conditioned kernel system (condition estimate {cond:.3e})"));
    }
    Ok(RegressorModel {
        schema_version: MODEL_SCHEMA_VERSION,
        kind: ModelKind::Lssvm,
        target,
        normalizer,
        params: ModelParams::Lssvm(LssvmParams {
            gamma: cfg.gamma,
            kernel_width: cfg.kernel_width,
            alpha,
            bias,
            features,
        }),
        training_meta,
    })
}

/// Grid search over `γ × width` on a holdout; ties keep the earlier grid
/// point (ascending γ, then ascending width).
pub fn select(
    train_set: &Dataset,
    holdout: &Dataset,
    target: Target,
    gamma_grid: &[f64],
    width_grid: &[f64],
) -> Result<(LssvmConfig, Vec<(String, f64)>)> {
    if gamma_grid.is_empty() || width_grid.is_empty() {
        return Err(CoreError::Argument("LS-SVM grids must be nonempty".into()));
    }
    let mut gammas = gamma_grid.to_vec();
    let mut widths = width_grid.to_vec();
    gammas.sort_by(f64::total_cmp);
    widths.sort_by(f64::total_cmp);
    let mut best: Option<(LssvmConfig, f64)> = None;
    let mut scores = Vec::new();
    for &gamma in &gammas {
        for &kernel_width in &widths {
            let cfg = LssvmConfig { gamma, kernel_width };
            let model = fit(train_set, target, &cfg)?;
            let rms = holdout_rms(&model, holdout, target)?;
            scores.push((format!("gamma={gamma},kernel_width={kernel_width}"), rms));
            if best.as_ref().is_none_or(|(_, b)| rms < *b) {
                best = Some((cfg, rms));
            }
        }
    }
    Ok((best.expect("grids are nonempty").0, scores))
}
