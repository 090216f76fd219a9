use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{fit_tree, roc_and_threshold, shuffled_kfold, split_seed, stratified_kfold, Dataset, Metrics, RocCurve};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// How validation scores are turned into metrics within one repetition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricPooling {
    /// One ROC over the pooled out-of-fold scores.
    #[default]
    Pooled,
    /// Metrics per fold, then averaged over folds.
    PerFold,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CvConfig {
    pub folds: usize,
    pub repetitions: usize,
    pub stratified: bool,
    pub seed: u64,
    pub max_splits: usize,
    pub pooling: MetricPooling,
}

impl Default for CvConfig {
    fn default() -> Self {
        Self { folds: 5, repetitions: 100, stratified: true, seed: 0, max_splits: 5, pooling: MetricPooling::Pooled }
    }
}

impl CvConfig {
    pub fn validate(&self) -> Result<()> {
        if self.folds < 2 {
            return Err(Error::InvalidConfig("folds must be at least 2".into()));
        }
        if self.repetitions < 1 {
            return Err(Error::InvalidConfig("repetitions must be at least 1".into()));
        }
        Ok(())
    }

    pub(crate) fn fold_assignment(&self, positive: &[bool], stream: u64) -> Result<Vec<usize>> {
        let mut rng = ChaCha8Rng::seed_from_u64(split_seed(self.seed, stream));
        if self.stratified {
            stratified_kfold(positive, self.folds, &mut rng)
        } else {
            shuffled_kfold(positive.len(), self.folds, &mut rng)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepetitionMetrics {
    pub repetition: usize,
    /// AUC in percent.
    pub auc: f64,
    #[serde(flatten)]
    pub metrics: Metrics,
}

/// Modelling choices recorded alongside every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub split_criterion: String,
    pub min_leaf_size: usize,
    pub positive_class: String,
    pub threshold_rule: String,
}

impl Default for ReportMetadata {
    fn default() -> Self {
        Self {
            split_criterion: "gini".into(),
            min_leaf_size: 1,
            positive_class: "SR_MAINTAINED".into(),
            threshold_rule: "max accuracy, ties to higher Se".into(),
        }
    }
}

/// Repetition-averaged performance of one feature subset (all values in percent).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub features: Vec<String>,
    pub n_samples: usize,
    pub n_positive: usize,
    pub config: CvConfig,
    pub metadata: ReportMetadata,
    pub se: f64,
    pub sp: f64,
    pub acc: f64,
    pub auc: f64,
    pub ppv: f64,
    pub npv: f64,
    pub repetitions: Vec<RepetitionMetrics>,
    /// Pooled ROC curve of the first repetition, for plotting.
    pub roc_first_repetition: RocCurve,
}

/// Out-of-fold positive-class scores for one fold assignment.
pub(crate) fn out_of_fold_scores<T: Real>(
    data: &Dataset<T>,
    feature_ids: &[usize],
    folds: &[usize],
    n_folds: usize,
    max_splits: usize,
) -> Result<Vec<f64>> {
    let mut scores = vec![0.0; data.len()];
    for f in 0..n_folds {
        let train: Vec<usize> = (0..data.len()).filter(|&i| folds[i] != f).collect();
        let (x, y) = data.subset(&train);
        let tree = fit_tree(&x, &y, feature_ids, max_splits)?;
        for i in (0..data.len()).filter(|&i| folds[i] == f) {
            scores[i] = tree.score(&data.rows[i]);
        }
    }
    Ok(scores)
}

fn one_repetition<T: Real>(
    data: &Dataset<T>,
    feature_ids: &[usize],
    cfg: &CvConfig,
    rep: usize,
) -> Result<(RepetitionMetrics, RocCurve)> {
    let folds = cfg.fold_assignment(&data.positive, rep as u64)?;
    let scores = out_of_fold_scores(data, feature_ids, &folds, cfg.folds, cfg.max_splits)?;
    let pooled = roc_and_threshold(&scores, &data.positive)?;
    let (auc, metrics) = match cfg.pooling {
        MetricPooling::Pooled => (pooled.auc, pooled.metrics),
        MetricPooling::PerFold => {
            let mut auc = 0.0;
            let mut m = Metrics::default();
            for f in 0..cfg.folds {
                let idx: Vec<usize> = (0..data.len()).filter(|&i| folds[i] == f).collect();
                let s: Vec<f64> = idx.iter().map(|&i| scores[i]).collect();
                let y: Vec<bool> = idx.iter().map(|&i| data.positive[i]).collect();
                let r = roc_and_threshold(&s, &y)?;
                auc += r.auc;
                m.se += r.metrics.se;
                m.sp += r.metrics.sp;
                m.acc += r.metrics.acc;
                m.ppv += r.metrics.ppv;
                m.npv += r.metrics.npv;
            }
            let k = cfg.folds as f64;
            (auc / k, Metrics { se: m.se / k, sp: m.sp / k, acc: m.acc / k, ppv: m.ppv / k, npv: m.npv / k })
        }
    };
    Ok((RepetitionMetrics { repetition: rep, auc: 100.0 * auc, metrics }, pooled.curve))
}

/// Repeated (stratified) k-fold evaluation of a tree on `feature_ids`.
///
/// Repetition `r` reshuffles with sub-seed `split_seed(cfg.seed, r)`;
/// repetitions run in parallel and are reduced in order, so the report does
/// not depend on scheduling.
pub fn evaluate_model<T: Real>(data: &Dataset<T>, feature_ids: &[usize], cfg: &CvConfig) -> Result<EvaluationReport> {
    cfg.validate()?;
    if feature_ids.is_empty() || feature_ids.iter().any(|&f| f >= data.n_features()) {
        return Err(Error::InvalidConfig("feature subset empty or out of range".into()));
    }
    let (n_pos, n_neg) = data.class_counts();
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClass);
    }
    let results: Vec<(RepetitionMetrics, RocCurve)> = (0..cfg.repetitions)
        .into_par_iter()
        .map(|rep| one_repetition(data, feature_ids, cfg, rep))
        .collect::<Result<_>>()?;
    let k = cfg.repetitions as f64;
    let avg = |f: fn(&RepetitionMetrics) -> f64| results.iter().map(|(r, _)| f(r)).sum::<f64>() / k;
    let report = EvaluationReport {
        features: feature_ids.iter().map(|&f| data.feature_names[f].clone()).collect(),
        n_samples: data.len(),
        n_positive: n_pos,
        config: *cfg,
        metadata: ReportMetadata::default(),
        se: avg(|r| r.metrics.se),
        sp: avg(|r| r.metrics.sp),
        acc: avg(|r| r.metrics.acc),
        auc: avg(|r| r.auc),
        ppv: avg(|r| r.metrics.ppv),
        npv: avg(|r| r.metrics.npv),
        roc_first_repetition: results[0].1.clone(),
        repetitions: results.into_iter().map(|(r, _)| r).collect(),
    };
    Ok(report)
}
