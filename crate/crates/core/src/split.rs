use alloc::vec::Vec;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{CoreError, Result};
use crate::record::Dataset;

/// Index partition produced by [`split_indices`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Seeded shuffle of `0..n`, first `round(n * train_fraction)` indices to
/// training and the rest to testing.
pub fn split_indices(n: usize, train_fraction: f64, seed: u64) -> Result<SplitIndices> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(CoreError::Argument(alloc::format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    if n < 2 {
        return Err(CoreError::Argument(alloc::format!(
            "need at least 2 records to split, got {n}"
        )));
    }
    let n_train = libm::round(n as f64 * train_fraction) as usize;
    if n_train == 0 || n_train == n {
        return Err(CoreError::Argument(alloc::format!(
            "fraction {train_fraction} of {n} records leaves an empty partition"
        )));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    idx.shuffle(&mut rng);
    let test = idx.split_off(n_train);
    Ok(SplitIndices { train: idx, test })
}

pub fn split(ds: &Dataset, train_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    let s = split_indices(ds.len(), train_fraction, seed)?;
    Ok((ds.select(&s.train), ds.select(&s.test)))
}
