//! Scoring and selection over grid index ranges.
//!
//! Candidates are ordered by predicted heat collection rate, highest first,
//! with ties broken by ascending grid index. That order is total, so merging
//! per-range results gives the same answer however the index space was
//! split.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::model::RegressorModel;
use crate::record::N_FEATURES;
use crate::screening::enumerate::enumerate_grid;
use crate::screening::grid::GridSpec;

pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Criterion {
    TopK { k: usize },
    /// Keep every design with predicted HCR `>= min_hcr`.
    Threshold { min_hcr: f64 },
}

impl Criterion {
    pub fn check(&self) -> Result<()> {
        match *self {
            Criterion::TopK { k } if k >= 1 => Ok(()),
            Criterion::Threshold { min_hcr } if min_hcr.is_finite() => Ok(()),
            _ => Err(CoreError::Argument("criterion needs k >= 1 or a finite threshold".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub grid_index: u128,
    pub features: [f64; N_FEATURES],
    pub predicted_hcr: f64,
    pub predicted_hlc: Option<f64>,
}

/// Screening order: `Less` means `a` ranks ahead of `b`.
pub fn rank_order(a: &Candidate, b: &Candidate) -> Ordering {
    b.predicted_hcr
        .total_cmp(&a.predicted_hcr)
        .then(a.grid_index.cmp(&b.grid_index))
}

pub trait Scorer {
    fn score(&self, x: &[f64; N_FEATURES]) -> f64;
}

impl Scorer for RegressorModel {
    fn score(&self, x: &[f64; N_FEATURES]) -> f64 {
        self.predict_features(x)
    }
}

impl<F: Fn(&[f64; N_FEATURES]) -> f64> Scorer for F {
    fn score(&self, x: &[f64; N_FEATURES]) -> f64 {
        self(x)
    }
}

/// Heap entry whose maximum is the weakest kept candidate.
struct Weakest(Candidate);

impl PartialEq for Weakest {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Weakest {}
impl PartialOrd for Weakest {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Weakest {
    fn cmp(&self, other: &Self) -> Ordering {
        rank_order(&self.0, &other.0)
    }
}

/// Scores `[start, end)` and keeps candidates per `criterion`, sorted in
/// screening order. Non-finite scores are skipped.
pub fn scan_range<S: Scorer + ?Sized>(
    scorer: &S,
    spec: &GridSpec,
    start: u128,
    end: u128,
    criterion: &Criterion,
) -> Result<Vec<Candidate>> {
    criterion.check()?;
    let iter = enumerate_grid(spec, start, end)?;
    let mut out = match *criterion {
        Criterion::TopK { k } => {
            let mut heap: BinaryHeap<Weakest> = BinaryHeap::with_capacity(k + 1);
            for (grid_index, features) in iter {
                let s = scorer.score(&features);
                if !s.is_finite() {
                    continue;
                }
                let c = Candidate {
                    grid_index,
                    features,
                    predicted_hcr: s,
                    predicted_hlc: None,
                };
                if heap.len() < k {
                    heap.push(Weakest(c));
                } else if let Some(top) = heap.peek() {
                    if rank_order(&c, &top.0) == Ordering::Less {
                        heap.pop();
                        heap.push(Weakest(c));
                    }
                }
            }
            heap.into_iter().map(|w| w.0).collect::<Vec<_>>()
        }
        Criterion::Threshold { min_hcr } => iter
            .filter_map(|(grid_index, features)| {
                let s = scorer.score(&features);
                (s.is_finite() && s >= min_hcr).then_some(Candidate {
                    grid_index,
                    features,
                    predicted_hcr: s,
                    predicted_hlc: None,
                })
            })
            .collect(),
    };
    out.sort_by(rank_order);
    Ok(out)
}

/// Global merge of per-range results.
pub fn merge_ranked(criterion: &Criterion, parts: Vec<Vec<Candidate>>) -> Vec<Candidate> {
    let mut all: Vec<Candidate> = parts.into_iter().flatten().collect();
    all.sort_by(rank_order);
    if let Criterion::TopK { k } = *criterion {
        all.truncate(k);
    }
    all
}

pub fn attach_hlc<S: Scorer + ?Sized>(candidates: &mut [Candidate], hlc: &S) {
    for c in candidates {
        c.predicted_hlc = Some(hlc.score(&c.features));
    }
}

/// Rejects grids above `cap` before any scoring happens.
pub fn check_capacity(spec: &GridSpec, cap: u128) -> Result<u128> {
    let total = spec.total_combinations()?;
    if total > cap {
        return Err(CoreError::Capacity { product: total, cap });
    }
    Ok(total)
}

/// Single-threaded screen of the whole grid.
pub fn screen<S: Scorer + ?Sized, T: Scorer + ?Sized>(
    hcr: &S,
    hlc: Option<&T>,
    spec: &GridSpec,
    criterion: &Criterion,
    cap: u128,
) -> Result<Vec<Candidate>> {
    let total = check_capacity(spec, cap)?;
    let mut out = scan_range(hcr, spec, 0, total, criterion)?;
    if let Some(h) = hlc {
        attach_hlc(&mut out, h);
    }
    Ok(out)
}
