use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::model::RegressorModel;
use crate::record::{Feature, N_FEATURES};

/// Reference per-feature value counts; their product is 353,812,500.
pub const REFERENCE_COUNTS: [usize; N_FEATURES] = [5, 30, 5, 111, 50, 5, 17];

/// Candidate values per feature; the design space is their Cartesian product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// One strictly ascending, nonempty list per feature, in model input order.
    pub values: Vec<Vec<f64>>,
}

impl GridSpec {
    /// Validates ordering and, when `bounds` is given, that every value lies
    /// inside the experimental range.
    pub fn new(values: Vec<Vec<f64>>, bounds: Option<&[(f64, f64); N_FEATURES]>) -> Result<Self> {
        let spec = GridSpec { values };
        spec.check(bounds)?;
        Ok(spec)
    }

    pub fn check(&self, bounds: Option<&[(f64, f64); N_FEATURES]>) -> Result<()> {
        if self.values.len() != N_FEATURES {
            return Err(CoreError::Grid(alloc::format!(
                "grid needs {N_FEATURES} value lists, got {}",
                self.values.len()
            )));
        }
        for (f, vals) in Feature::ALL.iter().zip(&self.values) {
            if vals.is_empty() {
                return Err(CoreError::Grid(alloc::format!("no values for `{}`", f.name())));
            }
            if vals.iter().any(|v| !v.is_finite()) || vals.windows(2).any(|w| w[0] >= w[1]) {
                return Err(CoreError::Grid(alloc::format!(
                    "values for `{}` must be finite and strictly ascending",
                    f.name()
                )));
            }
            if let Some(b) = bounds {
                let (lo, hi) = b[f.index()];
                if vals[0] < lo || vals[vals.len() - 1] > hi {
                    return Err(CoreError::Grid(alloc::format!(
                        "values for `{}` leave the experimental range [{lo}, {hi}]",
                        f.name()
                    )));
                }
            }
        }
        self.total_combinations().map(|_| ())
    }

    pub fn radices(&self) -> [usize; N_FEATURES] {
        let mut r = [0; N_FEATURES];
        for (ri, v) in r.iter_mut().zip(&self.values) {
            *ri = v.len();
        }
        r
    }

    /// Exact product of list lengths.
    pub fn total_combinations(&self) -> Result<u128> {
        product(&self.radices())
    }

    /// Mixed-radix digits of `index`, first feature most significant.
    pub fn digits_at(&self, index: u128) -> Result<[usize; N_FEATURES]> {
        let total = self.total_combinations()?;
        if index >= total {
            return Err(CoreError::Argument(alloc::format!(
                "grid index {index} out of range (total {total})"
            )));
        }
        let radices = self.radices();
        let mut digits = [0; N_FEATURES];
        let mut rest = index;
        for j in (0..N_FEATURES).rev() {
            let r = radices[j] as u128;
            digits[j] = (rest % r) as usize;
            rest /= r;
        }
        Ok(digits)
    }

    pub fn index_of(&self, digits: &[usize; N_FEATURES]) -> Result<u128> {
        let radices = self.radices();
        let mut idx: u128 = 0;
        for j in 0..N_FEATURES {
            if digits[j] >= radices[j] {
                return Err(CoreError::Argument(alloc::format!(
                    "digit {} out of range for `{}`",
                    digits[j],
                    Feature::ALL[j].name()
                )));
            }
            idx = idx * radices[j] as u128 + digits[j] as u128;
        }
        Ok(idx)
    }

    pub fn features_of(&self, digits: &[usize; N_FEATURES]) -> [f64; N_FEATURES] {
        let mut x = [0.0; N_FEATURES];
        for j in 0..N_FEATURES {
            x[j] = self.values[j][digits[j]];
        }
        x
    }

    pub fn tuple_at(&self, index: u128) -> Result<[f64; N_FEATURES]> {
        Ok(self.features_of(&self.digits_at(index)?))
    }

    /// Inverse of [`tuple_at`](Self::tuple_at) for tuples made of grid values.
    pub fn index_of_tuple(&self, x: &[f64; N_FEATURES]) -> Option<u128> {
        let mut digits = [0; N_FEATURES];
        for j in 0..N_FEATURES {
            digits[j] = self.values[j].iter().position(|v| *v == x[j])?;
        }
        self.index_of(&digits).ok()
    }
}

fn product(counts: &[usize]) -> Result<u128> {
    counts.iter().try_fold(1u128, |acc, &c| {
        acc.checked_mul(c as u128)
            .ok_or_else(|| CoreError::Grid("combination count overflows 128 bits".into()))
    })
}

/// Relative contribution of each input: the sum of absolute first-layer
/// weights leaving it, normalized to sum to one.
pub fn weight_importance(model: &RegressorModel) -> Result<[f64; N_FEATURES]> {
    let p = model.mlfn().ok_or(CoreError::UnsupportedKind(
        "weight importance needs an MLFN; use manual count overrides for other kinds",
    ))?;
    let w = p.first_layer();
    let mut imp = [0.0; N_FEATURES];
    for h in 0..w.rows {
        for (j, v) in imp.iter_mut().enumerate() {
            *v += libm::fabs(w.get(h, j));
        }
    }
    let total: f64 = imp.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(CoreError::Argument("first-layer weights are all zero".into()));
    }
    for v in &mut imp {
        *v /= total;
    }
    Ok(imp)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationConfig {
    /// Values distributed across features in proportion to importance.
    pub value_budget: usize,
    /// Optional ceiling applied to every proportional count.
    pub per_feature_max: Option<usize>,
    /// Largest allowed product of counts.
    pub product_cap: u128,
}

/// `max(1, floor(importance · budget))` per feature, clipped by
/// `per_feature_max`, then `overrides` replace counts verbatim.
pub fn allocate_value_counts(
    importance: &[f64; N_FEATURES],
    cfg: &AllocationConfig,
    overrides: &[Option<usize>; N_FEATURES],
) -> Result<[usize; N_FEATURES]> {
    if importance.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(CoreError::Argument("importances must be finite and >= 0".into()));
    }
    let sum: f64 = importance.iter().sum();
    if libm::fabs(sum - 1.0) > 1e-9 {
        return Err(CoreError::Argument(alloc::format!("importances sum to {sum}, not 1")));
    }
    let mut counts = [1usize; N_FEATURES];
    for j in 0..N_FEATURES {
        let mut c = (libm::floor(importance[j] * cfg.value_budget as f64) as usize).max(1);
        if let Some(m) = cfg.per_feature_max {
            c = c.min(m.max(1));
        }
        counts[j] = c;
        if let Some(o) = overrides[j] {
            if o < 1 {
                return Err(CoreError::Argument(alloc::format!(
                    "override for `{}` must be >= 1",
                    Feature::ALL[j].name()
                )));
            }
            counts[j] = o;
        }
    }
    let total = product(&counts)?;
    if total > cfg.product_cap {
        return Err(CoreError::Capacity {
            product: total,
            cap: cfg.product_cap,
        });
    }
    Ok(counts)
}

fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        1 => alloc::vec![lo + (hi - lo) / 2.0],
        _ => (0..count)
            .map(|i| {
                if i + 1 == count {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (count - 1) as f64
                }
            })
            .collect(),
    }
}

/// Evenly spaced values over each `[min, max]` (a single value sits at the
/// midpoint). Explicit lists replace spacing; integer features are rounded
/// and deduplicated.
pub fn build_grid(
    counts: &[usize; N_FEATURES],
    bounds: &[(f64, f64); N_FEATURES],
    fixed_values: &[Option<Vec<f64>>; N_FEATURES],
    integer: &[bool; N_FEATURES],
) -> Result<GridSpec> {
    let mut values = Vec::with_capacity(N_FEATURES);
    for f in Feature::ALL {
        let j = f.index();
        let (lo, hi) = bounds[j];
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(CoreError::Argument(alloc::format!(
                "bounds for `{}` must satisfy min <= max",
                f.name()
            )));
        }
        let mut vals = match &fixed_values[j] {
            Some(list) => list.clone(),
            None => {
                if counts[j] < 1 {
                    return Err(CoreError::Argument(alloc::format!(
                        "count for `{}` must be >= 1",
                        f.name()
                    )));
                }
                linspace(lo, hi, counts[j])
            }
        };
        if integer[j] {
            for v in &mut vals {
                *v = libm::round(*v);
            }
        }
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        if vals.is_empty() {
            return Err(CoreError::Grid(alloc::format!("no values left for `{}`", f.name())));
        }
        values.push(vals);
    }
    GridSpec::new(values, Some(bounds))
}
