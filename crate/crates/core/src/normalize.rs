use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::record::{DesignRecord, N_FEATURES};
use crate::stats::mean_std;

/// Per-feature z-score parameters captured from a training set.
///
/// Features with zero spread are only shifted by their mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub mean: [f64; N_FEATURES],
    pub std_dev: [f64; N_FEATURES],
}

impl Normalizer {
    pub fn fit(features: &[[f64; N_FEATURES]]) -> Result<Self> {
        if features.is_empty() {
            return Err(CoreError::EmptyInput("training features"));
        }
        let mut mean = [0.0; N_FEATURES];
        let mut std_dev = [0.0; N_FEATURES];
        for j in 0..N_FEATURES {
            let col: Vec<f64> = features.iter().map(|x| x[j]).collect();
            let (m, s) = mean_std(&col);
            mean[j] = m;
            std_dev[j] = s;
        }
        Ok(Normalizer { mean, std_dev })
    }

    pub fn fit_records(records: &[DesignRecord]) -> Result<Self> {
        let xs: Vec<_> = records.iter().map(|r| r.features()).collect();
        Self::fit(&xs)
    }

    pub fn transform(&self, x: &[f64; N_FEATURES]) -> [f64; N_FEATURES] {
        let mut z = [0.0; N_FEATURES];
        for j in 0..N_FEATURES {
            let d = x[j] - self.mean[j];
            z[j] = if self.std_dev[j] > 0.0 { d / self.std_dev[j] } else { d };
        }
        z
    }

    pub fn inverse(&self, z: &[f64; N_FEATURES]) -> [f64; N_FEATURES] {
        let mut x = [0.0; N_FEATURES];
        for j in 0..N_FEATURES {
            let s = if self.std_dev[j] > 0.0 { self.std_dev[j] } else { 1.0 };
            x[j] = z[j] * s + self.mean[j];
        }
        x
    }

    pub fn apply(&self, record: &DesignRecord) -> [f64; N_FEATURES] {
        self.transform(&record.features())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn rows() -> Vec<[f64; N_FEATURES]> {
        vec![
            [1600.0, 10.0, 70.0, 100.0, 1.5, 45.0, 50.0],
            [1800.0, 20.0, 75.0, 150.0, 2.5, 45.0, 52.0],
            [2100.0, 35.0, 90.0, 300.0, 4.0, 45.0, 60.0],
            [1750.0, 18.0, 80.0, 180.0, 2.0, 45.0, 55.0],
        ]
    }

    #[test]
    fn constant_feature_maps_to_zero() {
        let nz = Normalizer::fit(&rows()).unwrap();
        assert_eq!(nz.std_dev[5], 0.0);
        for r in rows() {
            assert_eq!(nz.transform(&r)[5], 0.0);
        }
    }

    #[test]
    fn inverse_is_identity() {
        let nz = Normalizer::fit(&rows()).unwrap();
        for r in rows() {
            let back = nz.inverse(&nz.transform(&r));
            for j in 0..N_FEATURES {
                assert!((back[j] - r[j]).abs() <= 1e-12 * r[j].abs());
            }
        }
    }

    #[test]
    fn transformed_columns_are_standardized() {
        let data = rows();
        let nz = Normalizer::fit(&data).unwrap();
        let z: Vec<_> = data.iter().map(|r| nz.transform(r)).collect();
        for j in [0usize, 1, 2, 3, 4, 6] {
            let col: Vec<f64> = z.iter().map(|r| r[j]).collect();
            let n = col.len() as f64;
            let m = col.iter().sum::<f64>() / n;
            let s = libm::sqrt(col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n);
            assert!(m.abs() < 1e-9, "mean {m}");
            assert!((s - 1.0).abs() < 1e-9, "std {s}");
        }
    }

    #[test]
    fn empty_rejected() {
        assert!(Normalizer::fit(&[]).is_err());
    }
}
