//! Seeded synthetic dataset generator.
//!
//! Stands in for a measured database. Features are drawn from normal
//! distributions with the calibration mean/std and clipped to the
//! calibration `[min, max]`; targets come from a fixed linear ground truth in
//! calibration z-scores plus Gaussian noise, clipped to their ranges:
//!
//! ```text
//! hcr = 8.9 + 0.25 z(final_temp) + 0.20 z(collector_area) - 0.15 z(tcd)
//!           + 0.10 z(n_tubes) + 0.05 z(tube_length)          noise sd 0.20
//! hlc = 10.0 - 0.30 z(final_temp) + 0.20 z(tube_length) + 0.10 z(tank_volume)
//!                                                            noise sd 0.30
//! ```
//!
//! The coefficients say nothing about real collector physics; they only give
//! the models a smooth, learnable signal inside the calibrated ranges.

use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::record::{Dataset, DesignRecord, Feature, N_FEATURES};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub mean: f64,
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
    #[serde(default)]
    pub integer: bool,
}

impl Calibration {
    const fn new(mean: f64, std_dev: f64, min: f64, max: f64, integer: bool) -> Self {
        Calibration {
            mean,
            std_dev,
            min,
            max,
            integer,
        }
    }

    pub fn z(&self, x: f64) -> f64 {
        (x - self.mean) / self.std_dev
    }

    fn check(&self, name: &str) -> Result<()> {
        let ok = self.mean.is_finite()
            && self.std_dev.is_finite()
            && self.std_dev > 0.0
            && self.min.is_finite()
            && self.max.is_finite()
            && self.min > 0.0
            && self.min <= self.max;
        if ok {
            Ok(())
        } else {
            Err(CoreError::Argument(alloc::format!(
                "calibration for `{name}` needs finite values, std_dev > 0 and 0 < min <= max"
            )))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureCalibration {
    pub tube_length: Calibration,
    pub n_tubes: Calibration,
    pub tcd: Calibration,
    pub tank_volume: Calibration,
    pub collector_area: Calibration,
    pub tilt_angle: Calibration,
    pub final_temp: Calibration,
}

impl FeatureCalibration {
    pub fn get(&self, f: Feature) -> &Calibration {
        match f {
            Feature::TubeLength => &self.tube_length,
            Feature::NTubes => &self.n_tubes,
            Feature::Tcd => &self.tcd,
            Feature::TankVolume => &self.tank_volume,
            Feature::CollectorArea => &self.collector_area,
            Feature::TiltAngle => &self.tilt_angle,
            Feature::FinalTemp => &self.final_temp,
        }
    }

    /// `[min, max]` per feature in model input order.
    pub fn bounds(&self) -> [(f64, f64); N_FEATURES] {
        Feature::ALL.map(|f| {
            let c = self.get(f);
            (c.min, c.max)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub features: FeatureCalibration,
    pub hcr: Calibration,
    pub hlc: Calibration,
    pub hcr_noise_sd: f64,
    pub hlc_noise_sd: f64,
}

/// Measured-database statistics for 915 heaters (max, min, mean, std).
pub const MEASURED_FEATURES: FeatureCalibration = FeatureCalibration {
    tube_length: Calibration::new(1811.0, 87.8, 1600.0, 2200.0, false),
    n_tubes: Calibration::new(21.0, 5.8, 5.0, 64.0, true),
    tcd: Calibration::new(76.2, 5.11, 60.0, 151.0, false),
    tank_volume: Calibration::new(172.0, 47.0, 70.0, 403.0, false),
    collector_area: Calibration::new(2.69, 0.73, 1.27, 8.24, false),
    tilt_angle: Calibration::new(46.0, 3.89, 30.0, 85.0, false),
    final_temp: Calibration::new(53.0, 2.0, 46.0, 62.0, true),
};

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            features: MEASURED_FEATURES,
            hcr: Calibration::new(8.9, 0.48, 6.7, 11.3, false),
            hlc: Calibration::new(10.0, 0.77, 8.0, 13.0, false),
            hcr_noise_sd: 0.20,
            hlc_noise_sd: 0.30,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        for f in Feature::ALL {
            self.features.get(f).check(f.name())?;
        }
        self.hcr.check("hcr")?;
        self.hlc.check("hlc")?;
        if !(self.hcr_noise_sd >= 0.0 && self.hlc_noise_sd >= 0.0) {
            return Err(CoreError::Argument("noise sd must be >= 0".into()));
        }
        Ok(())
    }

    /// Noise-free ground-truth targets `(hcr, hlc)` for a feature vector.
    pub fn ground_truth(&self, x: &[f64; N_FEATURES]) -> (f64, f64) {
        let z = |f: Feature| self.features.get(f).z(x[f.index()]);
        let hcr = 8.9 + 0.25 * z(Feature::FinalTemp) + 0.20 * z(Feature::CollectorArea)
            - 0.15 * z(Feature::Tcd)
            + 0.10 * z(Feature::NTubes)
            + 0.05 * z(Feature::TubeLength);
        let hlc = 10.0 - 0.30 * z(Feature::FinalTemp)
            + 0.20 * z(Feature::TubeLength)
            + 0.10 * z(Feature::TankVolume);
        (hcr, hlc)
    }
}

fn draw(rng: &mut ChaCha8Rng, c: &Calibration) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    let mut v = (c.mean + c.std_dev * z).clamp(c.min, c.max);
    if c.integer {
        v = libm::round(v).clamp(libm::ceil(c.min), libm::floor(c.max));
    }
    v
}

/// Generates `n` records deterministically from `seed`.
pub fn generate_synthetic(n: usize, seed: u64, cfg: &GeneratorConfig) -> Result<Dataset> {
    if n < 1 {
        return Err(CoreError::Argument("n must be at least 1".into()));
    }
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::with_capacity(n);
    for _ in 0..n {
        let mut x = [0.0; N_FEATURES];
        for f in Feature::ALL {
            x[f.index()] = draw(&mut rng, cfg.features.get(f));
        }
        let (hcr_true, hlc_true) = cfg.ground_truth(&x);
        let e1: f64 = rng.sample(StandardNormal);
        let e2: f64 = rng.sample(StandardNormal);
        let hcr = (hcr_true + cfg.hcr_noise_sd * e1).clamp(cfg.hcr.min, cfg.hcr.max);
        let hlc = (hlc_true + cfg.hlc_noise_sd * e2).clamp(cfg.hlc.min, cfg.hlc.max);
        let rec = DesignRecord::from_features(&x)?.with_targets(Some(hcr), Some(hlc));
        records.push(rec);
    }
    Dataset::new(records)
}
