//! Design records, datasets and the canonical CSV rendering.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

pub const N_FEATURES: usize = 7;

/// The seven independent variables, in model input order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feature {
    TubeLength,
    NTubes,
    Tcd,
    TankVolume,
    CollectorArea,
    TiltAngle,
    FinalTemp,
}

impl Feature {
    pub const ALL: [Feature; N_FEATURES] = [
        Feature::TubeLength,
        Feature::NTubes,
        Feature::Tcd,
        Feature::TankVolume,
        Feature::CollectorArea,
        Feature::TiltAngle,
        Feature::FinalTemp,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Field name used in records, JSON bodies and error messages.
    pub fn name(self) -> &'static str {
        match self {
            Feature::TubeLength => "tube_length",
            Feature::NTubes => "n_tubes",
            Feature::Tcd => "tcd",
            Feature::TankVolume => "tank_volume",
            Feature::CollectorArea => "collector_area",
            Feature::TiltAngle => "tilt_angle",
            Feature::FinalTemp => "final_temp",
        }
    }

    /// Column header in the dataset CSV.
    pub fn column(self) -> &'static str {
        match self {
            Feature::TubeLength => "tube_length_mm",
            Feature::NTubes => "n_tubes",
            Feature::Tcd => "tcd_mm",
            Feature::TankVolume => "tank_volume_kg",
            Feature::CollectorArea => "collector_area_m2",
            Feature::TiltAngle => "tilt_angle_deg",
            Feature::FinalTemp => "final_temp_c",
        }
    }

    /// Features that only take integer values in generated data and grids.
    pub fn is_integer(self) -> bool {
        matches!(self, Feature::NTubes | Feature::FinalTemp)
    }
}

/// Predicted thermal performance quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// Heat collection rate, MJ/m².
    Hcr,
    /// Heat loss coefficient, W/(m³K).
    Hlc,
}

impl Target {
    pub const ALL: [Target; 2] = [Target::Hcr, Target::Hlc];

    pub fn name(self) -> &'static str {
        match self {
            Target::Hcr => "hcr",
            Target::Hlc => "hlc",
        }
    }

    pub fn column(self) -> &'static str {
        match self {
            Target::Hcr => "hcr_mj_m2",
            Target::Hlc => "hlc_w_m3k",
        }
    }

    pub fn parse(s: &str) -> Option<Target> {
        match s {
            "hcr" => Some(Target::Hcr),
            "hlc" => Some(Target::Hlc),
            _ => None,
        }
    }
}

/// One solar water heater: seven measured design features plus optional
/// thermal targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignRecord {
    /// mm
    pub tube_length: f64,
    pub n_tubes: u32,
    /// Tube center distance, mm.
    pub tcd: f64,
    /// Maximum mass of water in the tank, kg.
    pub tank_volume: f64,
    /// m²
    pub collector_area: f64,
    /// Angle between tubes and ground, degrees.
    pub tilt_angle: f64,
    /// °C
    pub final_temp: f64,
    pub hcr: Option<f64>,
    pub hlc: Option<f64>,
}

impl DesignRecord {
    /// Builds a record from a feature vector. `n_tubes` must be integral.
    pub fn from_features(x: &[f64; N_FEATURES]) -> Result<Self> {
        let n = x[Feature::NTubes.index()];
        if !(n.is_finite() && n >= 1.0 && libm::trunc(n) == n && n <= u32::MAX as f64) {
            return Err(CoreError::Validation {
                row: None,
                field: "n_tubes",
                message: alloc::format!("must be a positive integer, got {n}"),
            });
        }
        let rec = DesignRecord {
            tube_length: x[0],
            n_tubes: n as u32,
            tcd: x[2],
            tank_volume: x[3],
            collector_area: x[4],
            tilt_angle: x[5],
            final_temp: x[6],
            hcr: None,
            hlc: None,
        };
        rec.validate(None)?;
        Ok(rec)
    }

    pub fn features(&self) -> [f64; N_FEATURES] {
        [
            self.tube_length,
            self.n_tubes as f64,
            self.tcd,
            self.tank_volume,
            self.collector_area,
            self.tilt_angle,
            self.final_temp,
        ]
    }

    pub fn feature(&self, f: Feature) -> f64 {
        self.features()[f.index()]
    }

    pub fn target(&self, t: Target) -> Option<f64> {
        match t {
            Target::Hcr => self.hcr,
            Target::Hlc => self.hlc,
        }
    }

    pub fn with_targets(mut self, hcr: Option<f64>, hlc: Option<f64>) -> Self {
        self.hcr = hcr;
        self.hlc = hlc;
        self
    }

    /// Checks the record invariants. `row` is echoed into the error.
    pub fn validate(&self, row: Option<usize>) -> Result<()> {
        let x = self.features();
        for f in Feature::ALL {
            let v = x[f.index()];
            if !v.is_finite() || v <= 0.0 {
                return Err(CoreError::Validation {
                    row,
                    field: f.name(),
                    message: alloc::format!("must be finite and strictly positive, got {v}"),
                });
            }
        }
        for t in Target::ALL {
            if let Some(v) = self.target(t) {
                if !v.is_finite() || v <= 0.0 {
                    return Err(CoreError::Validation {
                        row,
                        field: t.name(),
                        message: alloc::format!("must be finite and strictly positive, got {v}"),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Ordered, index-addressable collection of records.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    records: Vec<DesignRecord>,
}

impl Dataset {
    /// Validates every record; errors name the 1-based row.
    pub fn new(records: Vec<DesignRecord>) -> Result<Self> {
        for (i, r) in records.iter().enumerate() {
            r.validate(Some(i + 1))?;
        }
        Ok(Dataset { records })
    }

    pub fn records(&self) -> &[DesignRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<DesignRecord> {
        self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<&DesignRecord> {
        self.records.get(i)
    }

    /// Subset in the given index order.
    pub fn select(&self, indices: &[usize]) -> Dataset {
        Dataset {
            records: indices.iter().map(|&i| self.records[i].clone()).collect(),
        }
    }

    /// Feature vectors and targets, failing on the first record lacking `target`.
    pub fn xy(&self, target: Target) -> Result<(Vec<[f64; N_FEATURES]>, Vec<f64>)> {
        let mut xs = Vec::with_capacity(self.len());
        let mut ys = Vec::with_capacity(self.len());
        for (i, r) in self.records.iter().enumerate() {
            let y = r.target(target).ok_or_else(|| {
                CoreError::Training(alloc::format!(
                    "record {} has no `{}` value",
                    i + 1,
                    target.name()
                ))
            })?;
            xs.push(r.features());
            ys.push(y);
        }
        Ok((xs, ys))
    }

    /// Canonical CSV text: fixed header, LF endings, shortest round-trip
    /// float formatting, empty cells for absent targets.
    pub fn to_canonical_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&canonical_header());
        out.push('\n');
        for r in &self.records {
            let _ = write!(
                out,
                "{},{},{},{},{},{},{},",
                r.tube_length, r.n_tubes, r.tcd, r.tank_volume, r.collector_area, r.tilt_angle, r.final_temp
            );
            if let Some(v) = r.hcr {
                let _ = write!(out, "{v}");
            }
            out.push(',');
            if let Some(v) = r.hlc {
                let _ = write!(out, "{v}");
            }
            out.push('\n');
        }
        out
    }

    /// FNV-1a over the canonical CSV bytes.
    pub fn fingerprint(&self) -> u64 {
        crate::fnv1a64(self.to_canonical_csv().as_bytes())
    }
}

pub fn canonical_header() -> String {
    let mut cols: Vec<&str> = Feature::ALL.iter().map(|f| f.column()).collect();
    cols.push(Target::Hcr.column());
    cols.push(Target::Hlc.column());
    cols.join(",")
}
