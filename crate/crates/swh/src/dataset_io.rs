//! Dataset CSV reading and writing.
//!
//! Files carry a header row; columns are matched by name through a
//! [`Schema`], extra columns are ignored with a warning and target columns
//! may be absent or empty. Writing always produces the canonical layout, so
//! save → load reproduces every value bit for bit.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use swh_core::{Dataset, DesignRecord, Feature, Target, N_FEATURES};

use crate::error::{Error, Result};

/// Column name for every record field, keyed by field name
/// (`tube_length`, `n_tubes`, ..., `hcr`, `hlc`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schema {
    pub columns: BTreeMap<String, String>,
}

impl Default for Schema {
    fn default() -> Self {
        let mut columns = BTreeMap::new();
        for f in Feature::ALL {
            columns.insert(f.name().to_string(), f.column().to_string());
        }
        for t in Target::ALL {
            columns.insert(t.name().to_string(), t.column().to_string());
        }
        Schema { columns }
    }
}

impl Schema {
    fn column<'a>(&'a self, field: &'a str) -> &'a str {
        self.columns.get(field).map(String::as_str).unwrap_or(field)
    }
}

pub fn load_dataset(path: &Path, schema: &Schema) -> Result<Dataset> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_dataset(file, schema).map_err(|e| match e {
        Error::Parse { message, .. } => Error::parse(path, message),
        other => other,
    })
}

pub fn read_dataset<R: Read>(reader: R, schema: &Schema) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::parse("<csv>", format!("unreadable header: {e}")))?
        .clone();
    let find = |name: &str| headers.iter().position(|h| h == name);

    let mut feature_cols = [0usize; N_FEATURES];
    for f in Feature::ALL {
        let col = schema.column(f.name());
        feature_cols[f.index()] = find(col)
            .ok_or_else(|| Error::parse("<csv>", format!("missing required column `{col}`")))?;
    }
    let target_cols: Vec<Option<usize>> = Target::ALL.iter().map(|t| find(schema.column(t.name()))).collect();
    for (i, h) in headers.iter().enumerate() {
        if !feature_cols.contains(&i) && !target_cols.contains(&Some(i)) {
            log::warn!("ignoring unknown column `{h}`");
        }
    }

    let mut records = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row_no = i + 1;
        let row = row.map_err(|e| Error::parse("<csv>", format!("row {row_no}: {e}")))?;
        let cell = |col: usize, field: &str| -> Result<f64> {
            let raw = row.get(col).unwrap_or("");
            raw.parse::<f64>()
                .map_err(|_| Error::parse("<csv>", format!("row {row_no}, field `{field}`: cannot parse `{raw}`")))
        };
        let mut x = [0.0; N_FEATURES];
        for f in Feature::ALL {
            x[f.index()] = cell(feature_cols[f.index()], f.name())?;
        }
        let n_tubes = x[Feature::NTubes.index()];
        if n_tubes.fract() != 0.0 || !(0.0..=u32::MAX as f64).contains(&n_tubes) {
            return Err(Error::parse(
                "<csv>",
                format!("row {row_no}, field `n_tubes`: `{n_tubes}` is not a non-negative integer"),
            ));
        }
        let mut targets = [None, None];
        for (slot, (t, col)) in targets.iter_mut().zip(Target::ALL.iter().zip(&target_cols)) {
            if let Some(c) = col {
                if !row.get(*c).unwrap_or("").is_empty() {
                    *slot = Some(cell(*c, t.name())?);
                }
            }
        }
        records.push(DesignRecord {
            tube_length: x[0],
            n_tubes: n_tubes as u32,
            tcd: x[2],
            tank_volume: x[3],
            collector_area: x[4],
            tilt_angle: x[5],
            final_temp: x[6],
            hcr: targets[0],
            hlc: targets[1],
        });
    }
    Ok(Dataset::new(records)?)
}

pub fn save_dataset(path: &Path, ds: &Dataset) -> Result<()> {
    write_file(path, ds.to_canonical_csv().as_bytes())
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use swh_core::CoreError;

    const HEADER: &str = "tube_length_mm,n_tubes,tcd_mm,tank_volume_kg,collector_area_m2,tilt_angle_deg,final_temp_c,hcr_mj_m2,hlc_w_m3k";

    #[test]
    fn reads_two_rows() {
        let text = format!("{HEADER}\n1800,20,75,150.599,2.45,45,56,9.2,10.1\n1900,18,76,160,2.5,46,52,,\n");
        let ds = read_dataset(text.as_bytes(), &Schema::default()).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.records()[0].tank_volume, 150.599);
        assert_eq!(ds.records()[1].hcr, None);
    }

    #[test]
    fn zero_tubes_on_row_three() {
        let ok = "1800,20,75,150,2.45,45,56,9.2,10.1";
        let text = format!("{HEADER}\n{ok}\n{ok}\n1800,0,75,150,2.45,45,56,9.2,10.1\n");
        match read_dataset(text.as_bytes(), &Schema::default()) {
            Err(Error::Core(CoreError::Validation { row, field, .. })) => {
                assert_eq!(row, Some(3));
                assert_eq!(field, "n_tubes");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unparseable_cell_names_row_and_field() {
        let text = format!("{HEADER}\n1800,20,75,abc,2.45,45,56,9.2,10.1\n");
        let err = read_dataset(text.as_bytes(), &Schema::default()).unwrap_err().to_string();
        assert!(err.contains("row 1") && err.contains("tank_volume"), "{err}");
    }

    #[test]
    fn custom_schema_and_extra_columns() {
        let text = "id,L,N,D,V,A,T,F\nx,1800,20,75,150,2.45,45,56\n";
        let mut schema = Schema::default();
        for (field, col) in [("tube_length", "L"), ("n_tubes", "N"), ("tcd", "D"), ("tank_volume", "V"), ("collector_area", "A"), ("tilt_angle", "T"), ("final_temp", "F")] {
            schema.columns.insert(field.into(), col.into());
        }
        let ds = read_dataset(text.as_bytes(), &schema).unwrap();
        assert_eq!(ds.records()[0].n_tubes, 20);
        assert_eq!(ds.records()[0].hlc, None);
    }

    #[test]
    fn missing_column_rejected() {
        assert!(read_dataset("tube_length_mm\n1800\n".as_bytes(), &Schema::default()).is_err());
    }
}
