//! Model files: pretty-printed JSON of [`RegressorModel`], with floats
//! written in shortest round-trip form so save → load → save is byte-stable.

use std::path::Path;

use swh_core::{fingerprint_hex, fnv1a64, RegressorModel};

use crate::dataset_io::{read_file, write_file};
use crate::error::{Error, Result};

pub fn model_to_bytes(model: &RegressorModel) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(model).map_err(|e| Error::parse("<model>", e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn model_from_bytes(bytes: &[u8]) -> Result<RegressorModel> {
    let model: RegressorModel =
        serde_json::from_slice(bytes).map_err(|e| Error::parse("<model>", e.to_string()))?;
    model.check()?;
    Ok(model)
}

/// Writes the model and returns the file fingerprint.
pub fn save_model(path: &Path, model: &RegressorModel) -> Result<String> {
    let bytes = model_to_bytes(model)?;
    write_file(path, &bytes)?;
    Ok(fingerprint_hex(fnv1a64(&bytes)))
}

/// Loads and checks a model; also returns the file fingerprint.
pub fn load_model(path: &Path) -> Result<(RegressorModel, String)> {
    let bytes = read_file(path)?;
    let model = model_from_bytes(&bytes).map_err(|e| match e {
        Error::Parse { message, .. } => Error::parse(path, message),
        other => other,
    })?;
    Ok((model, fingerprint_hex(fnv1a64(&bytes))))
}
