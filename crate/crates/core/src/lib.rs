//! Surrogate regression and high-throughput screening for water-in-glass
//! evacuated tube solar water heaters.
//!
//! This crate is `no_std` (it needs `alloc`). It holds the data model, the
//! four regressor families (MLFN, GRNN, ELM, LS-SVM), the accuracy metrics
//! and the design-space screening machinery. File formats, the CLI and the
//! HTTP service live in the `swh` crate.
//!
//! Column statistics everywhere use the population standard deviation
//! (divisor `n`).

#![no_std]
// Index loops read better in the dense numeric kernels; `!(x > 0.0)` is the
// intended NaN-rejecting form.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod linalg;
pub mod metrics;
pub mod model;
pub mod normalize;
pub mod record;
pub mod screening;
pub mod split;
pub mod stats;
pub mod synthetic;

pub use error::{CoreError, Result};
pub use metrics::{EvalReport, Sample};
pub use model::{ModelKind, RegressorModel};
pub use normalize::Normalizer;
pub use record::{Dataset, DesignRecord, Feature, Target, N_FEATURES};
pub use stats::ColumnStats;

/// 64-bit FNV-1a digest, used to fingerprint datasets and model files.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    use core::hash::Hasher;
    let mut h = fnv::FnvHasher::default();
    h.write(bytes);
    h.finish()
}

/// Lower-case, zero-padded hex rendering of a 64-bit fingerprint.
pub fn fingerprint_hex(fp: u64) -> alloc::string::String {
    alloc::format!("{fp:016x}")
}
