//! Per-column descriptive statistics (max, min, range, mean, population std).

use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::record::{Dataset, Feature, Target};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnStats {
    pub name: String,
    /// Number of non-missing values the row was computed from.
    pub count: usize,
    pub maximum: f64,
    pub minimum: f64,
    pub range: f64,
    pub average: f64,
    /// Population form, divisor `n`.
    pub std_dev: f64,
}

/// Mean and population standard deviation of a nonempty slice.
///
/// The mean is accumulated as an offset from the minimum so that constant
/// columns reproduce their value exactly and the result stays inside
/// `[min, max]`.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    debug_assert!(!values.is_empty());
    let n = values.len() as f64;
    let (lo, hi) = min_max(values);
    let shift: f64 = values.iter().map(|v| v - lo).sum::<f64>() / n;
    let mean = (lo + shift).clamp(lo, hi);
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, libm::sqrt(var))
}

fn min_max(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

pub fn column_stats(name: &str, values: &[f64]) -> Result<ColumnStats> {
    if values.is_empty() {
        return Err(CoreError::EmptyInput("column has no values"));
    }
    let (minimum, maximum) = min_max(values);
    let (average, std_dev) = mean_std(values);
    Ok(ColumnStats {
        name: name.into(),
        count: values.len(),
        maximum,
        minimum,
        range: maximum - minimum,
        average,
        std_dev,
    })
}

/// One row per feature column, then one per target column that has at
/// least one value.
pub fn descriptive_stats(ds: &Dataset) -> Result<Vec<ColumnStats>> {
    if ds.is_empty() {
        return Err(CoreError::EmptyInput("dataset"));
    }
    let mut out = Vec::with_capacity(9);
    for f in Feature::ALL {
        let col: Vec<f64> = ds.records().iter().map(|r| r.feature(f)).collect();
        out.push(column_stats(f.column(), &col)?);
    }
    for t in Target::ALL {
        let col: Vec<f64> = ds.records().iter().filter_map(|r| r.target(t)).collect();
        if !col.is_empty() {
            out.push(column_stats(t.column(), &col)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_column() {
        let s = column_stats("hcr", &[8.9, 8.9, 8.9]).unwrap();
        assert_eq!(s.average, 8.9);
        assert_eq!(s.std_dev, 0.0);
        assert_eq!(s.range, 0.0);
    }

    #[test]
    fn two_point_column() {
        // Hand computation: mean 9.0, deviations ±2.3, population std 2.3.
        let s = column_stats("hcr", &[6.7, 11.3]).unwrap();
        assert_eq!(s.maximum, 11.3);
        assert_eq!(s.minimum, 6.7);
        assert!((s.range - 4.6).abs() < 1e-12);
        assert!((s.average - 9.0).abs() < 1e-12);
        assert!((s.std_dev - 2.3).abs() < 1e-12);
    }

    #[test]
    fn empty_rejected() {
        assert!(descriptive_stats(&Dataset::default()).is_err());
        assert!(column_stats("x", &[]).is_err());
    }
}
