//! Multilayer feedforward network: logistic hidden layers, identity output,
//! trained by full-batch gradient descent with momentum on mean squared error.

use alloc::vec;
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{meta, prepare, sigmoid, Hyperparameters, ModelKind, ModelParams, RegressorModel, TrainedModel, MODEL_SCHEMA_VERSION};
use crate::error::{CoreError, Result};
use crate::linalg::{dot, Matrix};
use crate::record::{Dataset, DesignRecord, Target, N_FEATURES};

/// Most hidden layers an MLFN may have.
pub const MAX_HIDDEN_LAYERS: usize = 2;

/// Number of loss samples kept in the model metadata.
const HISTORY_SAMPLES: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlfnConfig {
    pub hidden_sizes: Vec<usize>,
    pub learning_rate: f64,
    pub momentum: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for MlfnConfig {
    fn default() -> Self {
        MlfnConfig {
            hidden_sizes: vec![8],
            learning_rate: 0.05,
            momentum: 0.9,
            epochs: 20_000,
            seed: 0,
        }
    }
}

impl MlfnConfig {
    fn check(&self) -> Result<()> {
        if self.hidden_sizes.is_empty() || self.hidden_sizes.len() > MAX_HIDDEN_LAYERS {
            return Err(CoreError::Argument(alloc::format!(
                "need 1..={MAX_HIDDEN_LAYERS} hidden layers, got {}",
                self.hidden_sizes.len()
            )));
        }
        if self.hidden_sizes.contains(&0) {
            return Err(CoreError::Argument("hidden layer sizes must be >= 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(CoreError::Argument("learning rate must be > 0".into()));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(CoreError::Argument("momentum must lie in [0, 1)".into()));
        }
        if self.epochs == 0 {
            return Err(CoreError::Argument("epochs must be >= 1".into()));
        }
        Ok(())
    }
}

/// One dense layer; `weights` is `(out, in)` row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub weights: Matrix,
    pub bias: Vec<f64>,
}

/// Dense network. The last layer is linear with a single output, every
/// earlier layer uses the logistic sigmoid.
///
/// The same shape doubles as the gradient container.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub layers: Vec<Layer>,
}

impl Network {
    /// Uniform `(-1/√fan_in, 1/√fan_in)` weights, zero biases.
    pub fn random(sizes: &[usize], seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layers = sizes
            .windows(2)
            .map(|w| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let bound = 1.0 / libm::sqrt(fan_in as f64);
                let data = (0..fan_in * fan_out)
                    .map(|_| rng.random_range(-bound..bound))
                    .collect();
                Layer {
                    weights: Matrix {
                        rows: fan_out,
                        cols: fan_in,
                        data,
                    },
                    bias: vec![0.0; fan_out],
                }
            })
            .collect();
        Network { layers }
    }

    pub fn zeros_like(&self) -> Self {
        Network {
            layers: self
                .layers
                .iter()
                .map(|l| Layer {
                    weights: Matrix::zeros(l.weights.rows, l.weights.cols),
                    bias: vec![0.0; l.bias.len()],
                })
                .collect(),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.layers.first().map_or(0, |l| l.weights.cols)
    }

    /// Layer widths, input first.
    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![self.input_dim()];
        s.extend(self.layers.iter().map(|l| l.weights.rows));
        s
    }

    pub fn check(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(CoreError::Argument("network has no layers".into()));
        }
        let mut width = self.input_dim();
        for (i, l) in self.layers.iter().enumerate() {
            if !l.weights.is_consistent() || l.weights.cols != width || l.bias.len() != l.weights.rows {
                return Err(CoreError::Argument(alloc::format!(
                    "layer {i} dimensions do not chain"
                )));
            }
            if !l.weights.all_finite() || l.bias.iter().any(|v| !v.is_finite()) {
                return Err(CoreError::Argument(alloc::format!(
                    "layer {i} has non-finite weights"
                )));
            }
            width = l.weights.rows;
        }
        if width != 1 {
            return Err(CoreError::Argument("network output must be scalar".into()));
        }
        Ok(())
    }

    pub fn forward(&self, x: &[f64]) -> f64 {
        let mut a = x.to_vec();
        let last = self.layers.len() - 1;
        for (li, l) in self.layers.iter().enumerate() {
            a = (0..l.weights.rows)
                .map(|r| {
                    let z = dot(l.weights.row(r), &a) + l.bias[r];
                    if li == last {
                        z
                    } else {
                        sigmoid(z)
                    }
                })
                .collect();
        }
        a[0]
    }

    /// Mean squared error over the batch and its analytic gradient.
    /// `inputs` is `(n, input_dim)`.
    pub fn loss_and_gradient(&self, inputs: &Matrix, targets: &[f64]) -> (f64, Network) {
        let n = inputs.rows;
        debug_assert_eq!(targets.len(), n);
        let mut grad = self.zeros_like();
        let n_layers = self.layers.len();
        let mut acts: Vec<Vec<f64>> = self
            .sizes()
            .into_iter()
            .map(|w| vec![0.0; w])
            .collect();
        let mut deltas: Vec<Vec<f64>> = self.layers.iter().map(|l| vec![0.0; l.weights.rows]).collect();
        let mut loss = 0.0;
        let scale = 2.0 / n as f64;

        for s in 0..n {
            acts[0].copy_from_slice(inputs.row(s));
            for li in 0..n_layers {
                let l = &self.layers[li];
                let (prev, next) = acts.split_at_mut(li + 1);
                let input = &prev[li];
                for (r, out) in next[0].iter_mut().enumerate() {
                    let z = dot(l.weights.row(r), input) + l.bias[r];
                    *out = if li + 1 == n_layers { z } else { sigmoid(z) };
                }
            }
            let err = acts[n_layers][0] - targets[s];
            loss += err * err;

            deltas[n_layers - 1][0] = scale * err;
            for li in (0..n_layers).rev() {
                if li + 1 < n_layers {
                    // δ_li = (W_{li+1}ᵀ δ_{li+1}) ⊙ σ'(z_li)
                    let (lo, hi) = deltas.split_at_mut(li + 1);
                    let up = &hi[0];
                    let w = &self.layers[li + 1].weights;
                    for (j, d) in lo[li].iter_mut().enumerate() {
                        let back: f64 = up.iter().enumerate().map(|(k, u)| w.get(k, j) * u).sum();
                        let a = acts[li + 1][j];
                        *d = back * a * (1.0 - a);
                    }
                }
                let g = &mut grad.layers[li];
                let input = &acts[li];
                for (r, &d) in deltas[li].iter().enumerate() {
                    g.bias[r] += d;
                    let row = &mut g.weights.data[r * input.len()..(r + 1) * input.len()];
                    for (gw, &a) in row.iter_mut().zip(input) {
                        *gw += d * a;
                    }
                }
            }
        }
        (loss / n as f64, grad)
    }

    pub fn loss(&self, inputs: &Matrix, targets: &[f64]) -> f64 {
        let n = inputs.rows;
        (0..n)
            .map(|s| {
                let e = self.forward(inputs.row(s)) - targets[s];
                e * e
            })
            .sum::<f64>()
            / n as f64
    }

    /// Flat view of all parameters, layer by layer, weights then biases.
    pub fn params(&self) -> Vec<f64> {
        let mut v = Vec::new();
        for l in &self.layers {
            v.extend_from_slice(&l.weights.data);
            v.extend_from_slice(&l.bias);
        }
        v
    }

    pub fn params_mut(&mut self) -> Vec<&mut f64> {
        let mut v = Vec::new();
        for l in &mut self.layers {
            v.extend(l.weights.data.iter_mut());
            v.extend(l.bias.iter_mut());
        }
        v
    }
}

/// Gradient descent with momentum on a generic batch. Returns the trained
/// network and the loss before every update plus the final loss.
pub fn train_network(inputs: &Matrix, targets: &[f64], cfg: &MlfnConfig) -> Result<(Network, Vec<f64>)> {
    cfg.check()?;
    if inputs.rows == 0 || inputs.rows != targets.len() {
        return Err(CoreError::Training("empty or mismatched training batch".into()));
    }
    let mut sizes = vec![inputs.cols];
    sizes.extend_from_slice(&cfg.hidden_sizes);
    sizes.push(1);
    let mut net = Network::random(&sizes, cfg.seed);
    let mut velocity = net.zeros_like();
    let mut history = Vec::with_capacity(cfg.epochs + 1);

    for epoch in 0..cfg.epochs {
        let (loss, grad) = net.loss_and_gradient(inputs, targets);
        if !loss.is_finite() {
            return Err(CoreError::Divergence { epoch, loss });
        }
        history.push(loss);
        for ((l, v), g) in net.layers.iter_mut().zip(&mut velocity.layers).zip(&grad.layers) {
            for ((w, vw), gw) in l.weights.data.iter_mut().zip(&mut v.weights.data).zip(&g.weights.data) {
                *vw = cfg.momentum * *vw - cfg.learning_rate * gw;
                *w += *vw;
            }
            for ((b, vb), gb) in l.bias.iter_mut().zip(&mut v.bias).zip(&g.bias) {
                *vb = cfg.momentum * *vb - cfg.learning_rate * gb;
                *b += *vb;
            }
        }
    }
    let final_loss = net.loss(inputs, targets);
    if !final_loss.is_finite() {
        return Err(CoreError::Divergence {
            epoch: cfg.epochs,
            loss: final_loss,
        });
    }
    history.push(final_loss);
    Ok((net, history))
}

/// Trained MLFN. The network sees standardized targets; predictions are
/// mapped back with `target_offset + target_scale * output`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlfnParams {
    pub network: Network,
    pub target_offset: f64,
    pub target_scale: f64,
}

impl MlfnParams {
    pub fn predict(&self, z: &[f64; N_FEATURES]) -> f64 {
        self.target_offset + self.target_scale * self.network.forward(z)
    }

    pub fn check(&self) -> Result<()> {
        self.network.check()?;
        if self.network.input_dim() != N_FEATURES {
            return Err(CoreError::Argument(alloc::format!(
                "MLFN expects {N_FEATURES} inputs, network has {}",
                self.network.input_dim()
            )));
        }
        if !(self.target_offset.is_finite() && self.target_scale.is_finite() && self.target_scale > 0.0) {
            return Err(CoreError::Argument("invalid MLFN target scaling".into()));
        }
        Ok(())
    }

    /// First-layer weights, `(hidden, N_FEATURES)`.
    pub fn first_layer(&self) -> &Matrix {
        &self.network.layers[0].weights
    }
}

pub fn fit(train_set: &Dataset, target: Target, cfg: &MlfnConfig) -> Result<TrainedModel> {
    cfg.check()?;
    let (normalizer, zs, ys) = prepare(train_set, target)?;
    let (offset, sd) = crate::stats::mean_std(&ys);
    let scale = if sd > 0.0 { sd } else { 1.0 };
    let ts: Vec<f64> = ys.iter().map(|y| (y - offset) / scale).collect();
    let inputs = Matrix::from_rows(&zs);
    let (network, history) = train_network(&inputs, &ts, cfg)?;

    let mut training_meta = meta(train_set, cfg.seed, Hyperparameters::Mlfn(cfg.clone()));
    let stride = (history.len() / HISTORY_SAMPLES).max(1);
    training_meta.loss_history = history.iter().step_by(stride).copied().collect();
    if let Some(&last) = history.last() {
        if (history.len() - 1) % stride != 0 {
            training_meta.loss_history.push(last);
        }
    }

    let model = RegressorModel {
        schema_version: MODEL_SCHEMA_VERSION,
        kind: ModelKind::Mlfn,
        target,
        normalizer,
        params: ModelParams::Mlfn(MlfnParams {
            network,
            target_offset: offset,
            target_scale: scale,
        }),
        training_meta,
    };
    Ok(TrainedModel {
        model,
        loss_history: history,
    })
}

/// Batch MSE and gradient in the model's own (normalized, standardized
/// target) space, for records carrying the model's target.
pub fn loss_gradient(model: &RegressorModel, batch: &[DesignRecord]) -> Result<(f64, Network)> {
    let p = model
        .mlfn()
        .ok_or(CoreError::UnsupportedKind("loss gradient is only defined for MLFN"))?;
    if batch.is_empty() {
        return Err(CoreError::EmptyInput("gradient batch"));
    }
    let mut zs = Vec::with_capacity(batch.len());
    let mut ts = Vec::with_capacity(batch.len());
    for (i, r) in batch.iter().enumerate() {
        let y = r.target(model.target).ok_or_else(|| CoreError::Validation {
            row: Some(i + 1),
            field: model.target.name(),
            message: "target value missing".into(),
        })?;
        zs.push(model.normalizer.apply(r));
        ts.push((y - p.target_offset) / p.target_scale);
    }
    Ok(p.network.loss_and_gradient(&Matrix::from_rows(&zs), &ts))
}

/// Number of consecutive `window`-epoch spans whose end loss exceeds their start loss.
pub fn increasing_windows(history: &[f64], window: usize) -> usize {
    history
        .windows(window.max(2))
        .step_by(window.max(1))
        .filter(|w| w[w.len() - 1] > w[0])
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(n: usize) -> (Matrix, Vec<f64>) {
        let xs: Vec<[f64; 1]> = (0..n).map(|i| [-1.0 + 2.0 * i as f64 / (n - 1) as f64]).collect();
        let ys = xs.iter().map(|x| x[0]).collect();
        (Matrix::from_rows(&xs), ys)
    }

    #[test]
    fn learns_identity() {
        let (x, y) = toy(20);
        let cfg = MlfnConfig {
            hidden_sizes: vec![4],
            epochs: 5000,
            seed: 3,
            ..MlfnConfig::default()
        };
        let (net, hist) = train_network(&x, &y, &cfg).unwrap();
        // held-out points between the training grid
        let test: Vec<f64> = (0..19).map(|i| -1.0 + (2 * i + 1) as f64 / 19.0).collect();
        let pred: Vec<f64> = test.iter().map(|t| net.forward(&[*t])).collect();
        let rms = crate::metrics::rms_error(&pred, &test).unwrap();
        assert!(rms < 0.05, "rms {rms}");
        assert!(hist.last().unwrap() < &hist[0]);
    }

    #[test]
    fn deterministic_weights() {
        let (x, y) = toy(10);
        let cfg = MlfnConfig {
            epochs: 50,
            seed: 11,
            ..MlfnConfig::default()
        };
        let a = train_network(&x, &y, &cfg).unwrap().0;
        let b = train_network(&x, &y, &cfg).unwrap().0;
        assert_eq!(a, b);
    }

    #[test]
    fn constant_target() {
        let (x, _) = toy(10);
        let y = vec![0.0; 10];
        let cfg = MlfnConfig {
            epochs: 3000,
            ..MlfnConfig::default()
        };
        let (net, _) = train_network(&x, &y, &cfg).unwrap();
        for i in 0..10 {
            assert!(net.forward(x.row(i)).abs() < 1e-3);
        }
    }

    #[test]
    fn zero_network_zero_gradient() {
        let mut net = Network::random(&[3, 4, 1], 0);
        for p in net.params_mut() {
            *p = 0.0;
        }
        let x = Matrix::zeros(5, 3);
        let (loss, g) = net.loss_and_gradient(&x, &[0.0; 5]);
        assert_eq!(loss, 0.0);
        assert!(g.params().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn divergence_reports_epoch() {
        let (x, y) = toy(10);
        let y: Vec<f64> = y.iter().map(|v| v * 1e6).collect();
        let cfg = MlfnConfig {
            learning_rate: 10.0,
            momentum: 0.99,
            epochs: 10_000,
            ..MlfnConfig::default()
        };
        match train_network(&x, &y, &cfg) {
            Err(CoreError::Divergence { epoch, .. }) => assert!(epoch < 10_000),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_config() {
        let (x, y) = toy(4);
        for cfg in [
            MlfnConfig { hidden_sizes: vec![], ..MlfnConfig::default() },
            MlfnConfig { hidden_sizes: vec![2, 2, 2], ..MlfnConfig::default() },
            MlfnConfig { learning_rate: 0.0, ..MlfnConfig::default() },
        ] {
            assert!(train_network(&x, &y, &cfg).is_err());
        }
    }
}
