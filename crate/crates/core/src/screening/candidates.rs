//! Screened candidate database and its merge with validation experiments.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::metrics::validation_error_rate;
use crate::record::{Dataset, DesignRecord, Target, N_FEATURES};
use crate::screening::grid::GridSpec;
use crate::screening::select::{rank_order, Candidate, Criterion};

pub const CANDIDATE_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateDbHeader {
    pub schema_version: u32,
    /// Fingerprint of the HCR model file.
    pub model_fingerprint: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hlc_model_fingerprint: Option<String>,
    pub criterion: Criterion,
    pub grid_spec: GridSpec,
}

/// A measured design attached to the database after screening.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationRecord {
    pub features: [f64; N_FEATURES],
    pub measured_hcr: f64,
    pub measured_hlc: Option<f64>,
    /// Set when the design matches a screened candidate.
    pub grid_index: Option<u128>,
    pub predicted_hcr: Option<f64>,
    /// `100·|predicted − measured| / measured`.
    pub error_rate_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateDb {
    pub header: CandidateDbHeader,
    pub candidates: Vec<Candidate>,
    pub validations: Vec<ValidationRecord>,
}

impl CandidateDb {
    /// Sorts candidates into screening order and checks the invariants.
    pub fn new(header: CandidateDbHeader, mut candidates: Vec<Candidate>) -> Result<Self> {
        candidates.sort_by(rank_order);
        let db = CandidateDb {
            header,
            candidates,
            validations: Vec::new(),
        };
        db.check()?;
        Ok(db)
    }

    pub fn check(&self) -> Result<()> {
        self.header.grid_spec.check(None)?;
        let total = self.header.grid_spec.total_combinations()?;
        for w in self.candidates.windows(2) {
            match rank_order(&w[0], &w[1]) {
                Ordering::Less => {}
                Ordering::Equal => {
                    return Err(CoreError::Argument(alloc::format!(
                        "duplicate grid index {}",
                        w[0].grid_index
                    )))
                }
                Ordering::Greater => {
                    return Err(CoreError::Argument("candidates are not in screening order".into()))
                }
            }
        }
        for c in &self.candidates {
            if c.grid_index >= total {
                return Err(CoreError::Argument(alloc::format!(
                    "grid index {} outside the grid ({total} designs)",
                    c.grid_index
                )));
            }
            if self.header.grid_spec.tuple_at(c.grid_index)? != c.features {
                return Err(CoreError::Argument(alloc::format!(
                    "features of candidate {} do not match its grid index",
                    c.grid_index
                )));
            }
        }
        Ok(())
    }

    pub fn find(&self, features: &[f64; N_FEATURES]) -> Option<&Candidate> {
        self.candidates.iter().find(|c| &c.features == features)
    }
}

/// Combines `original` with measured `experiments` into the new experimental
/// database and records each experiment on `db`.
///
/// A measured record replaces any record with identical features (in the
/// original data or an earlier merge), so merging is idempotent. Every
/// experiment needs a measured HCR; those matching a screened candidate get
/// a validation error rate.
pub fn merge_validated(db: &mut CandidateDb, original: &Dataset, experiments: &Dataset) -> Result<Dataset> {
    let mut measured: Vec<&DesignRecord> = Vec::new();
    for (i, r) in experiments.records().iter().enumerate() {
        if r.hcr.is_none() {
            return Err(CoreError::Validation {
                row: Some(i + 1),
                field: Target::Hcr.name(),
                message: "validation experiment lacks a measured heat collection rate".into(),
            });
        }
        let x = r.features();
        match measured.iter().position(|m| m.features() == x) {
            Some(p) => measured[p] = r,
            None => measured.push(r),
        }
    }

    let mut merged: Vec<DesignRecord> = original
        .records()
        .iter()
        .filter(|r| {
            let x = r.features();
            !measured.iter().any(|m| m.features() == x)
        })
        .cloned()
        .collect();
    merged.extend(measured.iter().map(|r| (*r).clone()));

    for r in &measured {
        let features = r.features();
        let measured_hcr = r.hcr.expect("checked above");
        let matched = db.find(&features);
        let grid_index = matched.map(|c| c.grid_index);
        let predicted_hcr = matched.map(|c| c.predicted_hcr);
        let error_rate_pct = match predicted_hcr {
            Some(p) => Some(validation_error_rate(p, &[measured_hcr])?),
            None => None,
        };
        let rec = ValidationRecord {
            features,
            measured_hcr,
            measured_hlc: r.hlc,
            grid_index,
            predicted_hcr,
            error_rate_pct,
        };
        match db.validations.iter().position(|v| v.features == features) {
            Some(p) => db.validations[p] = rec,
            None => db.validations.push(rec),
        }
    }
    Dataset::new(merged)
}
