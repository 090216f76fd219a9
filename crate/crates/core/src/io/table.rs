//! CSV feature tables and their per-record error sidecar.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Stage};
use crate::eval::Dataset;
use crate::features::FeatureVector;
use crate::signal::Label;

const DEGENERATE_COLUMN: &str = "swenv_degenerate";

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| Error::Parse { path: path.into(), message: e.to_string() }
}

/// Writes `header` and `rows` as CSV.
pub fn write_csv_rows(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(header).map_err(csv_err(path))?;
    for row in rows {
        w.write_record(&row).map_err(csv_err(path))?;
    }
    w.flush().map_err(Error::io(path))
}

/// One row per record: id, label, the ten features and the SWEnV degeneracy flag.
pub fn write_feature_table(path: &Path, rows: &[FeatureVector<f64>]) -> Result<()> {
    let mut header = vec!["record_id", "label"];
    header.extend(FeatureVector::<f64>::NAMES);
    header.push(DEGENERATE_COLUMN);
    write_csv_rows(
        path,
        &header,
        rows.iter().map(|fv| {
            let mut r = vec![fv.record_id.clone(), fv.label.to_string()];
            r.extend(fv.values().iter().map(|v| v.to_string()));
            r.push(fv.swenv_degenerate.to_string());
            r
        }),
    )
}

/// Reads a feature table; columns are matched by name.
pub fn read_feature_table(path: &Path) -> Result<Vec<FeatureVector<f64>>> {
    let mut rdr = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let headers = rdr.headers().map_err(csv_err(path))?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let missing = |name: &str| Error::Parse { path: path.into(), message: format!("missing column '{name}'") };
    let id_col = col("record_id").ok_or_else(|| missing("record_id"))?;
    let label_col = col("label").ok_or_else(|| missing("label"))?;
    let feature_cols: Vec<usize> = FeatureVector::<f64>::NAMES
        .iter()
        .map(|n| col(n).ok_or_else(|| missing(n)))
        .collect::<Result<_>>()?;
    let degenerate_col = col(DEGENERATE_COLUMN);
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err(path))?;
        let bad = |m: String| Error::Parse { path: path.into(), message: format!("row {}: {m}", i + 1) };
        let label: Label = rec[label_col].parse().map_err(|e: Error| bad(e.to_string()))?;
        let mut values = [0.0; 10];
        for (v, &c) in values.iter_mut().zip(&feature_cols) {
            *v = rec[c].trim().parse().map_err(|_| bad(format!("invalid number '{}'", &rec[c])))?;
        }
        let mut fv = FeatureVector::from_values(rec[id_col].to_string(), label, values);
        if let Some(c) = degenerate_col {
            fv.swenv_degenerate = rec[c].trim() == "true";
        }
        out.push(fv);
    }
    Ok(out)
}

/// A record that could not be turned into a feature vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureError {
    pub record_id: String,
    pub path: String,
    pub stage: Option<Stage>,
    pub message: String,
}

pub fn write_error_table(path: &Path, errors: &[FeatureError]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    for e in errors {
        w.serialize(e).map_err(csv_err(path))?;
    }
    if errors.is_empty() {
        w.write_record(["record_id", "path", "stage", "message"]).map_err(csv_err(path))?;
    }
    w.flush().map_err(Error::io(path))
}

pub fn read_error_table(path: &Path) -> Result<Vec<FeatureError>> {
    let mut rdr = csv::Reader::from_path(path).map_err(csv_err(path))?;
    rdr.deserialize().map(|r| r.map_err(csv_err(path))).collect()
}

/// Labelled rows of a feature table as an evaluation dataset.
pub fn table_dataset(rows: &[FeatureVector<f64>]) -> Result<Dataset<f64>> {
    let names = FeatureVector::<f64>::NAMES.iter().map(|s| s.to_string()).collect();
    let labels: Vec<Label> = rows.iter().map(|r| r.label).collect();
    Dataset::from_labels(names, rows.iter().map(|r| r.values().to_vec()).collect(), &labels)
}
