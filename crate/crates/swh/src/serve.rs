//! HTTP prediction service.
//!
//! `POST /api/predict` takes the seven design features as a JSON object and
//! returns both targets plus the display string; `GET /api/health` reports
//! readiness; every other path is served from the static directory.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Serialize;
use serde_json::{json, Value};
use swh_core::{CoreError, DesignRecord, Feature, RegressorModel, Target, N_FEATURES};
use tower_http::services::ServeDir;

use crate::error::{Error, Result};
use crate::model_io::load_model;

pub struct ServeModels {
    pub hcr: RegressorModel,
    pub hlc: RegressorModel,
    pub hcr_fingerprint: String,
    pub hlc_fingerprint: String,
}

impl ServeModels {
    /// Loads both model files; fails if either is missing, malformed or
    /// trained for the wrong target.
    pub fn load(hcr: &Path, hlc: &Path) -> Result<Self> {
        let (hcr_model, hcr_fp) = load_model(hcr)?;
        let (hlc_model, hlc_fp) = load_model(hlc)?;
        for (m, want, p) in [(&hcr_model, Target::Hcr, hcr), (&hlc_model, Target::Hlc, hlc)] {
            if m.target != want {
                return Err(Error::Usage(format!(
                    "{} predicts {}, expected {}",
                    p.display(),
                    m.target.name(),
                    want.name()
                )));
            }
        }
        Ok(ServeModels {
            hcr: hcr_model,
            hlc: hlc_model,
            hcr_fingerprint: hcr_fp,
            hlc_fingerprint: hlc_fp,
        })
    }

    pub fn predict(&self, record: &DesignRecord) -> swh_core::Result<PredictResponse> {
        let hcr = self.hcr.predict(record)?;
        let hlc = self.hlc.predict(record)?;
        Ok(PredictResponse {
            heat_collection_rate: hcr,
            heat_loss_coefficient: hlc,
            display: display_string(hcr, hlc),
            model_fingerprints: Fingerprints {
                hcr: self.hcr_fingerprint.clone(),
                hlc: self.hlc_fingerprint.clone(),
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fingerprints {
    pub hcr: String,
    pub hlc: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictResponse {
    pub heat_collection_rate: f64,
    pub heat_loss_coefficient: f64,
    pub display: String,
    pub model_fingerprints: Fingerprints,
}

pub fn display_string(hcr: f64, hlc: f64) -> String {
    format!("Collection Rate:{hcr:.3};Loss Coefficient:{hlc:.3}")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

/// A rejected request: 400 for malformed bodies, 422 for values that break
/// the record invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct RequestError {
    pub status: StatusCode,
    pub fields: Vec<FieldError>,
}

impl RequestError {
    fn new(status: StatusCode, field: &str, message: impl Into<String>) -> Self {
        RequestError {
            status,
            fields: vec![FieldError {
                field: field.into(),
                message: message.into(),
            }],
        }
    }
}

impl IntoResponse for RequestError {
    fn into_response(self) -> Response {
        let error = match self.status {
            StatusCode::BAD_REQUEST => "malformed request",
            _ => "invalid design",
        };
        (self.status, Json(json!({ "error": error, "fields": self.fields }))).into_response()
    }
}

pub fn parse_predict_request(body: &[u8]) -> std::result::Result<DesignRecord, RequestError> {
    let value: Value = serde_json::from_slice(body)
        .map_err(|e| RequestError::new(StatusCode::BAD_REQUEST, "body", format!("invalid JSON: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| RequestError::new(StatusCode::BAD_REQUEST, "body", "expected a JSON object"))?;
    let mut x = [0.0; N_FEATURES];
    let mut bad = Vec::new();
    for f in Feature::ALL {
        match obj.get(f.name()) {
            None => bad.push(FieldError { field: f.name().into(), message: "missing".into() }),
            Some(v) => match v.as_f64() {
                Some(n) => x[f.index()] = n,
                None => bad.push(FieldError { field: f.name().into(), message: "must be a number".into() }),
            },
        }
    }
    if !bad.is_empty() {
        return Err(RequestError { status: StatusCode::BAD_REQUEST, fields: bad });
    }
    DesignRecord::from_features(&x).map_err(|e| match e {
        CoreError::Validation { field, message, .. } => {
            RequestError::new(StatusCode::UNPROCESSABLE_ENTITY, field, message)
        }
        other => RequestError::new(StatusCode::UNPROCESSABLE_ENTITY, "body", other.to_string()),
    })
}

#[derive(Clone)]
struct AppState {
    models: Option<Arc<ServeModels>>,
}

fn unavailable() -> Response {
    (
        StatusCode::SERVICE_UNAVAILABLE,
        Json(json!({ "status": "unavailable", "error": "models not loaded" })),
    )
        .into_response()
}

async fn predict(State(state): State<AppState>, body: Bytes) -> Response {
    let Some(models) = state.models else {
        return unavailable();
    };
    let record = match parse_predict_request(&body) {
        Ok(r) => r,
        Err(e) => return e.into_response(),
    };
    match models.predict(&record) {
        Ok(resp) => Json(resp).into_response(),
        Err(e) => RequestError::new(StatusCode::UNPROCESSABLE_ENTITY, "body", e.to_string()).into_response(),
    }
}

async fn health(State(state): State<AppState>) -> Response {
    match state.models {
        Some(m) => Json(json!({
            "status": "ok",
            "model_fingerprints": { "hcr": m.hcr_fingerprint, "hlc": m.hlc_fingerprint },
        }))
        .into_response(),
        None => unavailable(),
    }
}

pub fn router(models: Option<Arc<ServeModels>>, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/predict", post(predict))
        .route("/api/health", get(health))
        .with_state(AppState { models });
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

pub async fn run(listener: tokio::net::TcpListener, app: Router) -> Result<()> {
    axum::serve(listener, app)
        .await
        .map_err(|e| Error::Service(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_format() {
        assert_eq!(display_string(9.2254, 10.05), "Collection Rate:9.225;Loss Coefficient:10.050");
    }

    #[test]
    fn missing_and_mistyped_fields_named() {
        let e = parse_predict_request(br#"{"tube_length": 1800, "n_tubes": "x"}"#).unwrap_err();
        assert_eq!(e.status, StatusCode::BAD_REQUEST);
        let names: Vec<_> = e.fields.iter().map(|f| f.field.as_str()).collect();
        assert!(names.contains(&"n_tubes") && names.contains(&"final_temp"));
        assert!(!names.contains(&"tube_length"));
    }

    #[test]
    fn invariant_violation_is_422() {
        let body = br#"{"tube_length":1800,"n_tubes":20.5,"tcd":75,"tank_volume":150,"collector_area":2.4,"tilt_angle":45,"final_temp":56}"#;
        let e = parse_predict_request(body).unwrap_err();
        assert_eq!(e.status, StatusCode::UNPROCESSABLE_ENTITY);
        assert_eq!(e.fields[0].field, "n_tubes");
        let body = br#"{"tube_length":1800,"n_tubes":20,"tcd":-1,"tank_volume":150,"collector_area":2.4,"tilt_angle":45,"final_temp":56}"#;
        assert_eq!(parse_predict_request(body).unwrap_err().fields[0].field, "tcd");
    }
}
