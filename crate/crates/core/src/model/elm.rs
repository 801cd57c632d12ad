//! Extreme learning machine: a seeded random sigmoid hidden layer whose
//! output weights solve the ridge normal equations `(HᵀH + λI)β = Hᵀy`.

use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{meta, prepare, sigmoid, Hyperparameters, ModelKind, ModelParams, RegressorModel, MODEL_SCHEMA_VERSION};
use crate::error::{CoreError, Result};
use crate::linalg::{dot, solve_spd, Matrix};
use crate::record::{Dataset, Target, N_FEATURES};

/// Ridge used when the unregularized system is singular.
pub const RIDGE_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElmConfig {
    pub hidden_size: usize,
    pub ridge: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElmParams {
    /// `(hidden, N_FEATURES)`, uniform in [-1, 1].
    pub input_weights: Matrix,
    pub hidden_bias: Vec<f64>,
    pub output_weights: Vec<f64>,
    /// Ridge actually used for `output_weights`.
    pub ridge: f64,
}

impl ElmParams {
    pub fn random_hidden(hidden_size: usize, seed: u64) -> (Matrix, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..hidden_size * N_FEATURES)
            .map(|_| rng.random_range(-1.0..=1.0))
            .collect();
        let bias = (0..hidden_size).map(|_| rng.random_range(-1.0..=1.0)).collect();
        (
            Matrix {
                rows: hidden_size,
                cols: N_FEATURES,
                data,
            },
            bias,
        )
    }

    pub fn hidden(&self, z: &[f64]) -> Vec<f64> {
        hidden_activations(&self.input_weights, &self.hidden_bias, z)
    }

    /// Hidden-layer matrix `H`, one row per input.
    pub fn hidden_matrix(&self, zs: &[[f64; N_FEATURES]]) -> Matrix {
        hidden_matrix(&self.input_weights, &self.hidden_bias, zs)
    }

    pub fn predict(&self, z: &[f64]) -> f64 {
        dot(&self.hidden(z), &self.output_weights)
    }

    pub fn check(&self) -> Result<()> {
        let l = self.input_weights.rows;
        if l == 0
            || !self.input_weights.is_consistent()
            || self.input_weights.cols != N_FEATURES
            || self.hidden_bias.len() != l
            || self.output_weights.len() != l
        {
            return Err(CoreError::Argument("ELM dimensions are inconsistent".into()));
        }
        if !self.input_weights.all_finite() || self.output_weights.iter().chain(&self.hidden_bias).any(|v| !v.is_finite()) {
            return Err(CoreError::Argument("ELM has non-finite weights".into()));
        }
        Ok(())
    }
}

fn hidden_activations(w: &Matrix, b: &[f64], z: &[f64]) -> Vec<f64> {
    (0..w.rows).map(|h| sigmoid(dot(w.row(h), z) + b[h])).collect()
}

fn hidden_matrix(w: &Matrix, b: &[f64], zs: &[[f64; N_FEATURES]]) -> Matrix {
    let mut data = Vec::with_capacity(zs.len() * w.rows);
    for z in zs {
        data.extend(hidden_activations(w, b, z));
    }
    Matrix {
        rows: zs.len(),
        cols: w.rows,
        data,
    }
}

/// Ridge solution for a given hidden matrix. Returns `(β, λ used, warning)`.
pub fn solve_output_weights(h: &Matrix, y: &[f64], ridge: f64) -> Result<(Vec<f64>, f64, Option<alloc::string::String>)> {
    let gram = h.gram();
    let rhs = h.t_mul_vec(y);
    let with_ridge = |lambda: f64| {
        let mut g = gram.clone();
        for i in 0..g.rows {
            let v = g.get(i, i) + lambda;
            g.set(i, i, v);
        }
        solve_spd(&g, &rhs)
    };
    match with_ridge(ridge) {
        Ok(beta) if beta.iter().all(|v| v.is_finite()) => Ok((beta, ridge, None)),
        Ok(_) | Err(_) if ridge < RIDGE_FLOOR => {
            let beta = with_ridge(RIDGE_FLOOR)?;
            let warn = alloc::format!(
                "normal equations singular at ridge {ridge:e}; raised to {RIDGE_FLOOR:e}"
            );
            Ok((beta, RIDGE_FLOOR, Some(warn)))
        }
        Ok(_) => Err(CoreError::Singular("ELM output weights are non-finite".into())),
        Err(e) => Err(e),
    }
}

pub fn fit(train_set: &Dataset, target: Target, cfg: &ElmConfig) -> Result<RegressorModel> {
    if cfg.hidden_size < 1 {
        return Err(CoreError::Argument("ELM hidden size must be >= 1".into()));
    }
    if !(cfg.ridge >= 0.0 && cfg.ridge.is_finite()) {
        return Err(CoreError::Argument("ELM ridge must be >= 0".into()));
    }
    let (normalizer, zs, ys) = prepare(train_set, target)?;
    let (input_weights, hidden_bias) = ElmParams::random_hidden(cfg.hidden_size, cfg.seed);
    let h = hidden_matrix(&input_weights, &hidden_bias, &zs);
    let (output_weights, ridge, warning) = solve_output_weights(&h, &ys, cfg.ridge)?;
    let mut training_meta = meta(train_set, cfg.seed, Hyperparameters::Elm(cfg.clone()));
    training_meta.warnings.extend(warning);
    Ok(RegressorModel {
        schema_version: MODEL_SCHEMA_VERSION,
        kind: ModelKind::Elm,
        target,
        normalizer,
        params: ModelParams::Elm(ElmParams {
            input_weights,
            hidden_bias,
            output_weights,
            ridge,
        }),
        training_meta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_hidden_layer() {
        assert_eq!(ElmParams::random_hidden(10, 4), ElmParams::random_hidden(10, 4));
        assert_ne!(ElmParams::random_hidden(10, 4), ElmParams::random_hidden(10, 5));
        let (w, b) = ElmParams::random_hidden(50, 1);
        assert!(w.data.iter().chain(&b).all(|v| (-1.0..=1.0).contains(v)));
    }

    #[test]
    fn singular_at_zero_ridge_raises_floor() {
        // two identical hidden columns make HᵀH exactly singular
        let h = Matrix::from_rows(&[[0.5, 0.5], [0.25, 0.25], [0.75, 0.75]]);
        let (beta, ridge, warn) = solve_output_weights(&h, &[1.0, 0.5, 1.5], 0.0).unwrap();
        assert_eq!(ridge, RIDGE_FLOOR);
        assert!(warn.is_some());
        assert!((beta[0] - 1.0).abs() < 1e-6 && (beta[1] - 1.0).abs() < 1e-6, "{beta:?}");
    }

    #[test]
    fn rejects_bad_config() {
        let ds = crate::synthetic::generate_synthetic(5, 0, &Default::default()).unwrap();
        assert!(fit(&ds, Target::Hcr, &ElmConfig { hidden_size: 0, ridge: 0.0, seed: 0 }).is_err());
        assert!(fit(&ds, Target::Hcr, &ElmConfig { hidden_size: 3, ridge: -1.0, seed: 0 }).is_err());
    }
}
