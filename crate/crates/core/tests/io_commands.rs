use std::fs;
use std::path::Path;

use afrecur::commands::{cmd_evaluate, cmd_features, cmd_report, cmd_select, cmd_synth, error_table_path, Reported, SynthOptions};
use afrecur::eval::EvaluationReport;
use afrecur::io::{
    read_error_table, read_feature_table, read_json, read_record, write_feature_table, write_json, write_record,
    CohortManifest, ManifestEntry, RunConfig,
};
use afrecur::{EcgRecord, Error, FeatureVector, Label, Stage};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn quick_config(seed: u64) -> RunConfig {
    let mut c = RunConfig { seed, selection_repetitions: 5, ..RunConfig::default() };
    c.cv.repetitions = 10;
    c
}

fn fake_row(i: usize, rng: &mut ChaCha8Rng) -> FeatureVector<f64> {
    let positive = i.is_multiple_of(2);
    let shift = if positive { 0.0 } else { 1.0 };
    FeatureVector {
        record_id: format!("r{i:03}"),
        label: if positive { Label::SrMaintained } else { Label::AfRelapse },
        rwem6: rng.random(),
        rwes6: rng.random(),
        rwem7: rng.random(),
        rwes7: shift + rng.random::<f64>(),
        rwem8: rng.random(),
        rwes8: rng.random(),
        swenv: shift + rng.random::<f64>(),
        daf: 3.0 + 6.0 * rng.random::<f64>(),
        sampen: rng.random(),
        fwp: 10.0 * rng.random::<f64>(),
        swenv_degenerate: i == 3,
    }
}

fn fake_table(dir: &Path, n: usize, seed: u64) -> std::path::PathBuf {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<_> = (0..n).map(|i| fake_row(i, &mut rng)).collect();
    let path = dir.join("features.csv");
    write_feature_table(&path, &rows).unwrap();
    path
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn synth_then_features_on_full_cohort() {
    let tmp = tempfile::tempdir().unwrap();
    let cohort = tmp.path().join("cohort");
    let manifest = cmd_synth(&SynthOptions { out_dir: cohort.clone(), seed: 4, ..Default::default() }).unwrap();
    let m = CohortManifest::read(&manifest).unwrap();
    assert_eq!(m.records.len(), 53);
    assert_eq!(m.records.iter().filter(|e| e.label == Label::SrMaintained).count(), 30);
    assert_eq!(fs::read_dir(&cohort).unwrap().filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "rec")).count(), 53);

    // one unreadable record among 53
    let bad = cohort.join(&m.records[7].path);
    fs::write(&bad, "record_id: broken\nfs: 1000\n---\n1.0\n").unwrap();
    let table = tmp.path().join("features.csv");
    let s = cmd_features(&manifest, &RunConfig::default(), &table).unwrap();
    assert_eq!(s.rows.len(), 52);
    assert_eq!(s.errors.len(), 1);
    assert_eq!(s.errors[0].path, bad.display().to_string());

    let rows = read_feature_table(&table).unwrap();
    assert_eq!(rows, s.rows);
    let header = fs::read_to_string(&table).unwrap();
    let cols = header.lines().next().unwrap().split(',').count();
    assert_eq!(cols, 2 + 10 + 1);
    // rows follow manifest order
    let expected: Vec<String> =
        m.records.iter().enumerate().filter(|(i, _)| *i != 7).map(|(_, e)| e.path.file_stem().unwrap().to_string_lossy().into_owned()).collect();
    let ids: Vec<String> = rows.iter().map(|r| r.record_id.clone()).collect();
    assert_eq!(ids, expected);
    assert_eq!(read_error_table(&error_table_path(&table)).unwrap(), s.errors);
}

#[test]
fn empty_manifest_gives_empty_table() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = tmp.path().join("manifest.toml");
    fs::write(&manifest, "dataset_id = \"empty\"\n").unwrap();
    let table = tmp.path().join("features.csv");
    let s = cmd_features(&manifest, &RunConfig::default(), &table).unwrap();
    assert!(s.rows.is_empty() && s.errors.is_empty());
    assert!(read_feature_table(&table).unwrap().is_empty());
}

#[test]
fn all_failing_records_is_an_error() {
    let tmp = tempfile::tempdir().unwrap();
    let rec = EcgRecord::new("short", 1000.0, vec![0.0f64; 5000]).with_label(Label::AfRelapse);
    write_record(&tmp.path().join("short.rec"), &rec).unwrap();
    let m = CohortManifest {
        dataset_id: "bad".into(),
        notes: String::new(),
        records: vec![ManifestEntry { path: "short.rec".into(), label: Label::AfRelapse }],
    };
    let manifest = tmp.path().join("manifest.toml");
    m.write(&manifest).unwrap();
    let table = tmp.path().join("features.csv");
    let r = cmd_features(&manifest, &RunConfig::default(), &table);
    assert!(matches!(r, Err(Error::AllRecordsFailed { count: 1 })));
    let errors = read_error_table(&error_table_path(&table)).unwrap();
    assert_eq!(errors[0].stage, Some(Stage::Validate));
    assert_eq!(Error::AllRecordsFailed { count: 1 }.exit_code(), 3);
}

#[test]
fn synth_is_byte_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for d in [&a, &b] {
        cmd_synth(&SynthOptions { out_dir: d.clone(), n_organized: 5, n_disorganized: 5, seed: 9, ..Default::default() }).unwrap();
    }
    let (ba, bb) = (dir_bytes(&a), dir_bytes(&b));
    assert_eq!(ba.len(), 12);
    assert_eq!(ba, bb);
}

#[test]
fn synth_rejects_invalid_spec() {
    let tmp = tempfile::tempdir().unwrap();
    let r = cmd_synth(&SynthOptions { out_dir: tmp.path().join("x"), n_organized: 2, n_disorganized: 5, ..Default::default() });
    let e = r.unwrap_err();
    assert!(matches!(e, Error::InvalidSpec(_)), "{e}");
    assert_eq!(e.exit_code(), 2);
}

#[test]
fn evaluate_report_is_byte_identical_and_embeds_config() {
    let tmp = tempfile::tempdir().unwrap();
    let table = fake_table(tmp.path(), 40, 1);
    let cfg = quick_config(31);
    let features = vec!["RWEs7".to_string(), "SWEnV".to_string()];
    let (a, b) = (tmp.path().join("a.json"), tmp.path().join("b.json"));
    let ra = cmd_evaluate(&table, &features, &cfg, &a).unwrap();
    cmd_evaluate(&table, &features, &cfg, &b).unwrap();
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let back: Reported<EvaluationReport> = read_json(&a).unwrap();
    assert_eq!(back, ra);
    assert_eq!(back.seed, 31);
    assert_eq!(back.run_config, cfg);
    assert_eq!(back.result.config.seed, 31);
    assert!(back.result.acc > 90.0, "{}", back.result.acc);

    let unknown = cmd_evaluate(&table, &["nope".to_string()], &cfg, &a);
    assert!(matches!(unknown, Err(Error::InvalidConfig(_))));
}

#[test]
fn evaluate_single_class_table_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let rows: Vec<_> = (0..10).map(|i| FeatureVector { label: Label::AfRelapse, ..fake_row(i, &mut rng) }).collect();
    let table = tmp.path().join("t.csv");
    write_feature_table(&table, &rows).unwrap();
    let r = cmd_evaluate(&table, &["RWEs7".to_string()], &quick_config(0), &tmp.path().join("r.json"));
    assert!(matches!(r, Err(Error::SingleClass)));
}

#[test]
fn select_report_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let table = fake_table(tmp.path(), 40, 3);
    let out = tmp.path().join("sel.json");
    let r = cmd_select(&table, &quick_config(5), &out).unwrap();
    assert_eq!(r.result.repetitions.len(), 5);
    let back: Reported<afrecur::eval::SelectionResult> = read_json(&out).unwrap();
    assert_eq!(back, r);
    assert!(back.result.subsets.iter().all(|s| !s.indices.is_empty() && s.indices.len() <= 10));
}

#[test]
fn report_writes_box_and_roc_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let table = fake_table(tmp.path(), 40, 4);
    let eval = tmp.path().join("eval.json");
    cmd_evaluate(&table, &["RWEs7".to_string()], &quick_config(1), &eval).unwrap();
    let out = tmp.path().join("report");
    let written = cmd_report(&table, Some(&eval), &out).unwrap();
    assert_eq!(written, vec![out.join("boxplot.csv"), out.join("roc.csv")]);
    let boxes = fs::read_to_string(&written[0]).unwrap();
    // header plus one line per feature and class
    assert_eq!(boxes.lines().count(), 1 + 20);
    let roc = fs::read_to_string(&written[1]).unwrap();
    assert!(roc.lines().count() >= 3);
}

#[test]
fn config_file_overrides_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("run.toml");
    fs::write(&path, "seed = 12\n[cv]\nfolds = 4\n").unwrap();
    let mut flags = RunConfig { seed: 3, ..RunConfig::default() };
    flags.cv.repetitions = 7;
    let c = flags.overlay_file(&path).unwrap();
    assert_eq!((c.seed, c.cv.folds, c.cv.repetitions), (12, 4, 7));
    assert_eq!(c.cv_config().seed, 12);
    fs::write(&path, "[cv]\nfolds = 1\n").unwrap();
    assert!(matches!(flags.overlay_file(&path), Err(Error::InvalidConfig(_))));
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e6f64..1e6, -1.0f64..1.0, Just(0.0)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn record_round_trip(
        samples in prop::collection::vec(finite(), 0..300),
        fs_hz in prop_oneof![Just(1000.0f64), Just(500.0), 1.0f64..5000.0],
        label in prop_oneof![Just(Label::SrMaintained), Just(Label::AfRelapse), Just(Label::Unlabeled)],
    ) {
        let tmp = tempfile::tempdir().unwrap();
        let path = tmp.path().join("r.rec");
        let rec = EcgRecord::new("p-01", fs_hz, samples).with_label(label);
        write_record(&path, &rec).unwrap();
        prop_assert_eq!(read_record::<f64>(&path).unwrap(), rec);
    }

    #[test]
    fn feature_table_round_trip(n in 0usize..20, seed in any::<u64>()) {
        let tmp = tempfile::tempdir().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<_> = (0..n).map(|i| fake_row(i, &mut rng)).collect();
        let path = tmp.path().join("t.csv");
        write_feature_table(&path, &rows).unwrap();
        prop_assert_eq!(read_feature_table(&path).unwrap(), rows);
    }

    #[test]
    fn json_report_round_trip(seed in any::<u64>(), reps in 1usize..200) {
        let tmp = tempfile::tempdir().unwrap();
        let mut cfg = RunConfig { seed, ..RunConfig::default() };
        cfg.cv.repetitions = reps;
        let path = tmp.path().join("c.json");
        write_json(&path, &cfg).unwrap();
        prop_assert_eq!(read_json::<RunConfig>(&path).unwrap(), cfg);
    }
}
