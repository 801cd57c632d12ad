//! RMS error, tolerance-band prediction accuracy, residuals and the
//! validation error rate, plus the evaluation report built from them.
//!
//! A prediction `z` of an actual value `o` is "good" when
//! `|z - o| <= tolerance * |o|`; the band is relative to the actual value and
//! includes its boundary.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::model::RegressorModel;
use crate::record::{Dataset, Target};

fn check_pair(predicted: &[f64], actual: &[f64]) -> Result<()> {
    if predicted.len() != actual.len() {
        return Err(CoreError::Argument(alloc::format!(
            "length mismatch: {} predicted vs {} actual",
            predicted.len(),
            actual.len()
        )));
    }
    if predicted.is_empty() {
        return Err(CoreError::EmptyInput("prediction vectors"));
    }
    if predicted.iter().chain(actual).any(|v| !v.is_finite()) {
        return Err(CoreError::Argument("non-finite value in metric input".into()));
    }
    Ok(())
}

/// `sqrt(Σ (zᵢ - oᵢ)² / n)`.
pub fn rms_error(predicted: &[f64], actual: &[f64]) -> Result<f64> {
    check_pair(predicted, actual)?;
    let ss: f64 = predicted
        .iter()
        .zip(actual)
        .map(|(z, o)| (z - o) * (z - o))
        .sum();
    Ok(libm::sqrt(ss / predicted.len() as f64))
}

#[inline]
fn is_good(residual: f64, actual: f64, tolerance: f64) -> bool {
    libm::fabs(residual) <= tolerance * libm::fabs(actual)
}

/// Percentage of samples inside the relative tolerance band.
pub fn prediction_accuracy(predicted: &[f64], actual: &[f64], tolerance: f64) -> Result<f64> {
    check_pair(predicted, actual)?;
    check_tolerance(tolerance)?;
    let good = predicted
        .iter()
        .zip(actual)
        .filter(|(z, o)| is_good(*z - *o, **o, tolerance))
        .count();
    Ok(100.0 * good as f64 / predicted.len() as f64)
}

fn check_tolerance(tolerance: f64) -> Result<()> {
    if tolerance > 0.0 && tolerance.is_finite() {
        Ok(())
    } else {
        Err(CoreError::Argument(alloc::format!(
            "tolerance must be positive, got {tolerance}"
        )))
    }
}

/// Elementwise `zᵢ - oᵢ`.
pub fn residuals(predicted: &[f64], actual: &[f64]) -> Result<Vec<f64>> {
    if predicted.len() != actual.len() {
        return Err(CoreError::Argument(alloc::format!(
            "length mismatch: {} predicted vs {} actual",
            predicted.len(),
            actual.len()
        )));
    }
    Ok(predicted.iter().zip(actual).map(|(z, o)| z - o).collect())
}

/// `100 · |predicted − mean(days)| / mean(days)` with the unrounded mean.
pub fn validation_error_rate(predicted: f64, measured_days: &[f64]) -> Result<f64> {
    if measured_days.is_empty() {
        return Err(CoreError::EmptyInput("measured days"));
    }
    if measured_days.iter().any(|v| !(v.is_finite() && *v > 0.0)) || !predicted.is_finite() {
        return Err(CoreError::Argument(
            "measurements must be finite and positive".into(),
        ));
    }
    let mean = measured_days.iter().sum::<f64>() / measured_days.len() as f64;
    Ok(100.0 * libm::fabs(predicted - mean) / mean)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub actual: f64,
    pub predicted: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub target: Target,
    pub n_tot: usize,
    pub rms_error: f64,
    /// Percent, in `[0, 100]`.
    pub prediction_accuracy: f64,
    pub tolerance: f64,
    pub samples: Vec<Sample>,
}

impl EvalReport {
    /// Assembles a report from parallel prediction/actual vectors.
    pub fn from_predictions(
        target: Target,
        predicted: &[f64],
        actual: &[f64],
        tolerance: f64,
    ) -> Result<Self> {
        let rms = rms_error(predicted, actual)?;
        let acc = prediction_accuracy(predicted, actual, tolerance)?;
        let res = residuals(predicted, actual)?;
        let samples = actual
            .iter()
            .zip(predicted)
            .zip(res)
            .map(|((&o, &z), r)| Sample {
                actual: o,
                predicted: z,
                residual: r,
            })
            .collect();
        Ok(EvalReport {
            target,
            n_tot: predicted.len(),
            rms_error: rms,
            prediction_accuracy: acc,
            tolerance,
            samples,
        })
    }

    pub fn predicted(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.predicted).collect()
    }

    pub fn actual(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.actual).collect()
    }

    /// Accuracy recomputed from the stored residuals and actuals.
    pub fn accuracy_from_residuals(&self) -> f64 {
        let good = self
            .samples
            .iter()
            .filter(|s| is_good(s.residual, s.actual, self.tolerance))
            .count();
        100.0 * good as f64 / self.samples.len() as f64
    }
}

/// Predicts every record of `test` and scores against its stored target.
pub fn evaluate(model: &RegressorModel, test: &Dataset, tolerance: f64) -> Result<EvalReport> {
    check_tolerance(tolerance)?;
    if test.is_empty() {
        return Err(CoreError::EmptyInput("test dataset"));
    }
    let target = model.target;
    let mut predicted = Vec::with_capacity(test.len());
    let mut actual = Vec::with_capacity(test.len());
    for (i, r) in test.records().iter().enumerate() {
        let o = r.target(target).ok_or_else(|| CoreError::Validation {
            row: Some(i + 1),
            field: target.name(),
            message: "target value missing, cannot evaluate".into(),
        })?;
        predicted.push(model.predict(r)?);
        actual.push(o);
    }
    EvalReport::from_predictions(target, &predicted, &actual, tolerance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn rms_examples() {
        assert_eq!(rms_error(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(rms_error(&[10.0], &[9.0]).unwrap(), 1.0);
        // sqrt((0.01 + 0.09 + 0.01) / 3) = sqrt(0.11 / 3)
        let r = rms_error(&[8.9, 9.5, 10.1], &[9.0, 9.2, 10.0]).unwrap();
        assert!((r - 0.191_485_421_551_268_2).abs() < 1e-12, "{r}");
    }

    #[test]
    fn rms_errors() {
        assert!(rms_error(&[1.0], &[1.0, 2.0]).is_err());
        assert!(rms_error(&[], &[]).is_err());
    }

    #[test]
    fn accuracy_examples() {
        assert_eq!(prediction_accuracy(&[13.0], &[10.0], 0.30).unwrap(), 100.0);
        assert_eq!(
            prediction_accuracy(&[13.1, 10.0], &[10.0, 10.0], 0.30).unwrap(),
            50.0
        );
        assert_eq!(prediction_accuracy(&[1.0], &[0.0], 0.30).unwrap(), 0.0);
        assert!(prediction_accuracy(&[1.0], &[1.0], 0.0).is_err());
    }

    #[test]
    fn residual_examples() {
        let r = residuals(&[11.47], &[11.3175]).unwrap();
        assert!((r[0] - 0.1525).abs() < 1e-12);
        let a = [1.0, 2.5, -3.0];
        let b = [0.5, 2.0, 1.0];
        let ab = residuals(&a, &b).unwrap();
        let ba = residuals(&b, &a).unwrap();
        assert!(ab.iter().zip(&ba).all(|(x, y)| *x == -*y));
        assert!(residuals(&[1.0], &[]).is_err());
    }

    #[test]
    fn published_validation_rates() {
        let a = validation_error_rate(11.47, &[11.38, 11.26, 11.34, 11.29]).unwrap();
        let b = validation_error_rate(11.66, &[11.47, 11.43, 11.42, 11.45]).unwrap();
        assert_eq!(libm::round(a * 100.0) / 100.0, 1.35);
        assert_eq!(libm::round(b * 100.0) / 100.0, 1.90);
        assert_eq!(validation_error_rate(2.0, &[1.0, 3.0]).unwrap(), 0.0);
        assert!(validation_error_rate(1.0, &[]).is_err());
    }

    #[test]
    fn report_is_self_consistent() {
        let z = vec![8.9, 9.5, 10.1, 7.0];
        let o = vec![9.0, 9.2, 10.0, 10.5];
        let rep = EvalReport::from_predictions(Target::Hcr, &z, &o, 0.30).unwrap();
        assert_eq!(rep.n_tot, 4);
        assert_eq!(rep.rms_error, rms_error(&rep.predicted(), &rep.actual()).unwrap());
        assert_eq!(rep.prediction_accuracy, rep.accuracy_from_residuals());
        assert_eq!(rep.prediction_accuracy, 75.0);
    }
}
