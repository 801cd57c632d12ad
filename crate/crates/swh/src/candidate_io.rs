//! Candidate database as JSON Lines.
//!
//! Line 1 is the header. Every following line is either a candidate
//! (`grid_index`, named `features`, `predicted_hcr`, optional
//! `predicted_hlc`) or a `{"validated": {...}}` record.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use swh_core::screening::{Candidate, CandidateDb, CandidateDbHeader, ValidationRecord};
use swh_core::{Feature, N_FEATURES};

use crate::dataset_io::{read_file, write_file};
use crate::error::{Error, Result};

type NamedFeatures = BTreeMap<String, f64>;

fn named(x: &[f64; N_FEATURES]) -> NamedFeatures {
    Feature::ALL.iter().map(|f| (f.name().to_string(), x[f.index()])).collect()
}

fn unnamed(m: &NamedFeatures) -> std::result::Result<[f64; N_FEATURES], String> {
    let mut x = [0.0; N_FEATURES];
    for f in Feature::ALL {
        x[f.index()] = *m.get(f.name()).ok_or_else(|| format!("missing feature `{}`", f.name()))?;
    }
    if m.len() != N_FEATURES {
        return Err("unexpected feature name".into());
    }
    Ok(x)
}

#[derive(Serialize, Deserialize)]
struct CandidateLine {
    grid_index: u128,
    features: NamedFeatures,
    predicted_hcr: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    predicted_hlc: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct ValidationBody {
    features: NamedFeatures,
    measured_hcr: f64,
    measured_hlc: Option<f64>,
    grid_index: Option<u128>,
    predicted_hcr: Option<f64>,
    error_rate_pct: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct ValidatedLine {
    validated: ValidationBody,
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("in-memory values serialize")
}

pub fn db_to_jsonl(db: &CandidateDb) -> String {
    let mut out = json(&db.header);
    out.push('\n');
    for c in &db.candidates {
        out.push_str(&json(&CandidateLine {
            grid_index: c.grid_index,
            features: named(&c.features),
            predicted_hcr: c.predicted_hcr,
            predicted_hlc: c.predicted_hlc,
        }));
        out.push('\n');
    }
    for v in &db.validations {
        out.push_str(&json(&ValidatedLine {
            validated: ValidationBody {
                features: named(&v.features),
                measured_hcr: v.measured_hcr,
                measured_hlc: v.measured_hlc,
                grid_index: v.grid_index,
                predicted_hcr: v.predicted_hcr,
                error_rate_pct: v.error_rate_pct,
            },
        }));
        out.push('\n');
    }
    out
}

pub fn db_from_jsonl(text: &str) -> std::result::Result<CandidateDb, String> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, first) = lines.next().ok_or("empty candidate database")?;
    let header: CandidateDbHeader = serde_json::from_str(first).map_err(|e| format!("line 1: {e}"))?;
    let mut candidates = Vec::new();
    let mut validations = Vec::new();
    for (i, line) in lines {
        let at = |e: String| format!("line {}: {e}", i + 1);
        // Peek at the keys first; u128 fields rule out untagged enums.
        let keys: serde_json::Map<String, serde_json::Value> =
            serde_json::from_str(line).map_err(|e| at(e.to_string()))?;
        if keys.contains_key("validated") {
            let ValidatedLine { validated: v } = serde_json::from_str(line).map_err(|e| at(e.to_string()))?;
            validations.push(ValidationRecord {
                features: unnamed(&v.features).map_err(at)?,
                measured_hcr: v.measured_hcr,
                measured_hlc: v.measured_hlc,
                grid_index: v.grid_index,
                predicted_hcr: v.predicted_hcr,
                error_rate_pct: v.error_rate_pct,
            });
        } else {
            let c: CandidateLine = serde_json::from_str(line).map_err(|e| at(e.to_string()))?;
            candidates.push(Candidate {
                grid_index: c.grid_index,
                features: unnamed(&c.features).map_err(at)?,
                predicted_hcr: c.predicted_hcr,
                predicted_hlc: c.predicted_hlc,
            });
        }
    }
    let mut db = CandidateDb::new(header, candidates).map_err(|e| e.to_string())?;
    db.validations = validations;
    Ok(db)
}

pub fn save_db(path: &Path, db: &CandidateDb) -> Result<()> {
    write_file(path, db_to_jsonl(db).as_bytes())
}

pub fn load_db(path: &Path) -> Result<CandidateDb> {
    let bytes = read_file(path)?;
    let text = String::from_utf8(bytes).map_err(|e| Error::parse(path, e.to_string()))?;
    db_from_jsonl(&text).map_err(|m| Error::parse(path, m))
}

/// Flat CSV of the candidates in screening order.
pub fn candidates_csv(db: &CandidateDb) -> String {
    let mut out = String::from("rank,grid_index");
    for f in Feature::ALL {
        out.push(',');
        out.push_str(f.column());
    }
    out.push_str(",predicted_hcr,predicted_hlc\n");
    for (rank, c) in db.candidates.iter().enumerate() {
        out.push_str(&format!("{},{}", rank + 1, c.grid_index));
        for v in c.features {
            out.push_str(&format!(",{v}"));
        }
        let hlc = c.predicted_hlc.map(|v| v.to_string()).unwrap_or_default();
        out.push_str(&format!(",{},{}\n", c.predicted_hcr, hlc));
    }
    out
}
