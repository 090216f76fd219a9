//! Batch commands behind the CLI. Each reads and writes the formats in [`crate::io`].

use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{evaluate_model, sequential_forward_selection, EvaluationReport, RocCurve, SelectionResult};
use crate::features::{extract_all, FeatureVector};
use crate::io::{
    read_feature_table, read_json, read_record, table_dataset, write_csv_rows, write_error_table, write_feature_table,
    write_json, write_record, CohortManifest, FeatureError, ManifestEntry, RunConfig,
};
use crate::signal::Label;
use crate::synth::{generate_cohort, CohortRanges, SynthSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthOptions {
    pub out_dir: PathBuf,
    pub n_organized: usize,
    pub n_disorganized: usize,
    pub seed: u64,
    pub ranges: CohortRanges,
}

impl Default for SynthOptions {
    fn default() -> Self {
        Self { out_dir: PathBuf::from("cohort"), n_organized: 30, n_disorganized: 23, seed: 0, ranges: CohortRanges::default() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SpecEntry {
    record_id: String,
    label: Label,
    spec: SynthSpec,
}

/// Writes one record file per cohort member, `manifest.toml` and the
/// generating parameters in `specs.json`. Returns the manifest path.
pub fn cmd_synth(opts: &SynthOptions) -> Result<PathBuf> {
    let cohort = generate_cohort::<f64>(opts.n_organized, opts.n_disorganized, &opts.ranges, opts.seed)?;
    std::fs::create_dir_all(&opts.out_dir).map_err(Error::io(&opts.out_dir))?;
    let mut records = Vec::with_capacity(cohort.len());
    let mut specs = Vec::with_capacity(cohort.len());
    for m in &cohort {
        let file = format!("{}.rec", m.record.record_id);
        write_record(&opts.out_dir.join(&file), &m.record)?;
        records.push(ManifestEntry { path: file.into(), label: m.record.label });
        specs.push(SpecEntry { record_id: m.record.record_id.clone(), label: m.record.label, spec: m.spec.clone() });
    }
    let manifest = CohortManifest {
        dataset_id: format!("synth-{}", opts.seed),
        notes: format!(
            "synthetic cohort, {} organized / {} disorganized, seed {}",
            opts.n_organized, opts.n_disorganized, opts.seed
        ),
        records,
    };
    let path = opts.out_dir.join("manifest.toml");
    manifest.write(&path)?;
    write_json(&opts.out_dir.join("specs.json"), &specs)?;
    info!("wrote {} records to {}", cohort.len(), opts.out_dir.display());
    Ok(path)
}

/// Outcome of [`cmd_features`].
#[derive(Debug, Clone, PartialEq)]
pub struct FeaturesSummary {
    pub rows: Vec<FeatureVector<f64>>,
    pub errors: Vec<FeatureError>,
    pub table: PathBuf,
    pub error_table: PathBuf,
}

/// Sidecar file listing records that failed.
pub fn error_table_path(table: &Path) -> PathBuf {
    let stem = table.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    table.with_file_name(format!("{stem}.errors.csv"))
}

/// Extracts features for every manifest record in parallel. Rows follow
/// manifest order; failing records go to the error sidecar. Fails only when
/// every record fails.
pub fn cmd_features(manifest_path: &Path, config: &RunConfig, out: &Path) -> Result<FeaturesSummary> {
    let manifest = CohortManifest::read(manifest_path)?;
    let paths = manifest.resolved_paths(manifest_path);
    if manifest.records.is_empty() {
        warn!("manifest {} lists no records", manifest_path.display());
    }
    let results: Vec<std::result::Result<FeatureVector<f64>, FeatureError>> = manifest
        .records
        .par_iter()
        .zip(paths.par_iter())
        .map(|(entry, path)| process_entry(entry, path, config))
        .collect();
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for r in results {
        match r {
            Ok(fv) => rows.push(fv),
            Err(e) => {
                warn!("{}: {}", e.record_id, e.message);
                errors.push(e);
            }
        }
    }
    let error_table = error_table_path(out);
    write_feature_table(out, &rows)?;
    write_error_table(&error_table, &errors)?;
    info!("{} feature rows, {} failures", rows.len(), errors.len());
    if rows.is_empty() && !errors.is_empty() {
        return Err(Error::AllRecordsFailed { count: errors.len() });
    }
    Ok(FeaturesSummary { rows, errors, table: out.to_path_buf(), error_table })
}

fn process_entry(entry: &ManifestEntry, path: &Path, config: &RunConfig) -> std::result::Result<FeatureVector<f64>, FeatureError> {
    let fallback_id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let fail = |id: String, e: Error| FeatureError {
        record_id: id,
        path: path.display().to_string(),
        stage: e.stage(),
        message: e.to_string(),
    };
    let mut rec = read_record::<f64>(path).map_err(|e| fail(fallback_id, e))?;
    if rec.label != Label::Unlabeled && rec.label != entry.label {
        warn!("{}: file label {} differs from manifest label {}", rec.record_id, rec.label, entry.label);
    }
    rec.label = entry.label;
    extract_all(&rec, &config.features).map_err(|e| fail(rec.record_id.clone(), e))
}

/// Report file contents: the result plus the configuration and seed that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reported<R> {
    pub seed: u64,
    pub run_config: RunConfig,
    pub result: R,
}

/// Cross-validated evaluation of the feature subset `features`.
pub fn cmd_evaluate(table: &Path, features: &[String], config: &RunConfig, out: &Path) -> Result<Reported<EvaluationReport>> {
    let data = table_dataset(&read_feature_table(table)?)?;
    let names: Vec<&str> = features.iter().map(String::as_str).collect();
    let ids = data.feature_indices(&names)?;
    let report = evaluate_model(&data, &ids, &config.cv_config())?;
    let reported = Reported { seed: config.seed, run_config: config.clone(), result: report };
    write_json(out, &reported)?;
    Ok(reported)
}

/// Repeated sequential forward selection over all ten features.
pub fn cmd_select(table: &Path, config: &RunConfig, out: &Path) -> Result<Reported<SelectionResult>> {
    let data = table_dataset(&read_feature_table(table)?)?;
    let result = sequential_forward_selection(&data, &config.cv_config(), config.selection_repetitions)?;
    let reported = Reported { seed: config.seed, run_config: config.clone(), result };
    write_json(out, &reported)?;
    Ok(reported)
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Five-number summary of one feature within one class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxStats {
    pub feature: String,
    pub label: Label,
    pub n: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

pub fn box_stats(rows: &[FeatureVector<f64>]) -> Vec<BoxStats> {
    let mut out = Vec::new();
    for (j, name) in FeatureVector::<f64>::NAMES.iter().enumerate() {
        for label in [Label::SrMaintained, Label::AfRelapse] {
            let mut v: Vec<f64> = rows.iter().filter(|r| r.label == label).map(|r| r.values()[j]).collect();
            if v.is_empty() {
                continue;
            }
            v.sort_by(f64::total_cmp);
            out.push(BoxStats {
                feature: name.to_string(),
                label,
                n: v.len(),
                min: v[0],
                q1: quantile(&v, 0.25),
                median: quantile(&v, 0.5),
                q3: quantile(&v, 0.75),
                max: v[v.len() - 1],
            });
        }
    }
    out
}

/// Plot-ready tables: per-class box-plot statistics of every feature and,
/// given an evaluation report, its ROC curve. Returns the files written.
pub fn cmd_report(table: &Path, evaluation: Option<&Path>, out_dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).map_err(Error::io(out_dir))?;
    let rows = read_feature_table(table)?;
    let box_path = out_dir.join("boxplot.csv");
    write_csv_rows(
        &box_path,
        &["feature", "label", "n", "min", "q1", "median", "q3", "max"],
        box_stats(&rows).into_iter().map(|b| {
            vec![
                b.feature,
                b.label.to_string(),
                b.n.to_string(),
                b.min.to_string(),
                b.q1.to_string(),
                b.median.to_string(),
                b.q3.to_string(),
                b.max.to_string(),
            ]
        }),
    )?;
    let mut written = vec![box_path];
    if let Some(eval_path) = evaluation {
        let reported: Reported<EvaluationReport> = read_json(eval_path)?;
        let roc_path = out_dir.join("roc.csv");
        write_roc(&roc_path, &reported.result.roc_first_repetition)?;
        written.push(roc_path);
    }
    Ok(written)
}

fn write_roc(path: &Path, curve: &RocCurve) -> Result<()> {
    write_csv_rows(
        path,
        &["fpr", "tpr", "threshold"],
        curve.fpr.iter().zip(&curve.tpr).zip(&curve.thresholds).map(|((f, t), th)| {
            vec![f.to_string(), t.to_string(), th.map(|v| v.to_string()).unwrap_or_default()]
        }),
    )
}
