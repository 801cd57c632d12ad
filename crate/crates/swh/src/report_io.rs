//! Evaluation report export: per-sample CSV plus a JSON summary.

use std::path::Path;

use serde::Serialize;
use swh_core::{EvalReport, Target};

use crate::dataset_io::write_file;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalSummary {
    pub target: Target,
    pub n_tot: usize,
    pub rms_error: f64,
    pub accuracy_pct: f64,
    pub tolerance: f64,
}

impl From<&EvalReport> for EvalSummary {
    fn from(r: &EvalReport) -> Self {
        EvalSummary {
            target: r.target,
            n_tot: r.n_tot,
            rms_error: r.rms_error,
            accuracy_pct: r.prediction_accuracy,
            tolerance: r.tolerance,
        }
    }
}

pub fn report_csv(report: &EvalReport) -> String {
    let mut out = String::from("actual,predicted,residual\n");
    for s in &report.samples {
        out.push_str(&format!("{},{},{}\n", s.actual, s.predicted, s.residual));
    }
    out
}

pub fn write_report(csv_path: Option<&Path>, json_path: Option<&Path>, report: &EvalReport) -> Result<()> {
    if let Some(p) = csv_path {
        write_file(p, report_csv(report).as_bytes())?;
    }
    if let Some(p) = json_path {
        let mut bytes = serde_json::to_vec_pretty(&EvalSummary::from(report))
            .map_err(|e| Error::parse(p, e.to_string()))?;
        bytes.push(b'\n');
        write_file(p, &bytes)?;
    }
    Ok(())
}
