use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::evaluate::out_of_fold_scores;
use super::{CvConfig, Dataset};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Stream offset separating selection shuffles from evaluation shuffles.
const SELECTION_STREAM: u64 = 0x5F5_0000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionRepetition {
    pub repetition: usize,
    /// Selected feature indices in ascending order.
    pub features: Vec<usize>,
    /// Order in which features were added.
    pub order: Vec<usize>,
    /// Cross-validated misclassification rate of the final subset.
    pub loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetCount {
    pub features: Vec<String>,
    pub indices: Vec<usize>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub feature_names: Vec<String>,
    pub config: CvConfig,
    pub repetitions: Vec<SelectionRepetition>,
    /// Distinct selected subsets, most frequent first.
    pub subsets: Vec<SubsetCount>,
}

impl SelectionResult {
    pub fn modal(&self) -> &SubsetCount {
        &self.subsets[0]
    }
}

fn cv_loss<T: Real>(data: &Dataset<T>, subset: &[usize], folds: &[usize], cfg: &CvConfig) -> Result<f64> {
    let scores = out_of_fold_scores(data, subset, folds, cfg.folds, cfg.max_splits)?;
    let wrong = scores.iter().zip(&data.positive).filter(|(s, &y)| (**s >= 0.5) != y).count();
    Ok(wrong as f64 / data.len() as f64)
}

/// Greedy forward selection minimizing k-fold misclassification.
///
/// Each repetition draws one fold assignment and keeps it for every step. The
/// first feature is always added; afterwards a feature is added only if it
/// strictly lowers the loss. Ties go to the lowest feature index.
pub fn sequential_forward_selection<T: Real>(
    data: &Dataset<T>,
    cfg: &CvConfig,
    repetitions: usize,
) -> Result<SelectionResult> {
    cfg.validate()?;
    if data.n_features() < 2 {
        return Err(Error::InvalidConfig("feature selection needs at least 2 features".into()));
    }
    if repetitions == 0 {
        return Err(Error::InvalidConfig("selection repetitions must be at least 1".into()));
    }
    let (n_pos, n_neg) = data.class_counts();
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClass);
    }
    let reps: Vec<SelectionRepetition> = (0..repetitions)
        .into_par_iter()
        .map(|rep| {
            let folds = cfg.fold_assignment(&data.positive, SELECTION_STREAM + rep as u64)?;
            let mut chosen: Vec<usize> = Vec::new();
            let mut loss = f64::INFINITY;
            loop {
                let mut best: Option<(f64, usize)> = None;
                for f in (0..data.n_features()).filter(|f| !chosen.contains(f)) {
                    let mut trial = chosen.clone();
                    trial.push(f);
                    let l = cv_loss(data, &trial, &folds, cfg)?;
                    if best.is_none_or(|(b, _)| l < b) {
                        best = Some((l, f));
                    }
                }
                match best {
                    Some((l, f)) if l < loss => {
                        chosen.push(f);
                        loss = l;
                    }
                    _ => break,
                }
            }
            let mut features = chosen.clone();
            features.sort_unstable();
            Ok(SelectionRepetition { repetition: rep, features, order: chosen, loss })
        })
        .collect::<Result<_>>()?;

    let mut counts: std::collections::BTreeMap<Vec<usize>, usize> = std::collections::BTreeMap::new();
    for r in &reps {
        *counts.entry(r.features.clone()).or_default() += 1;
    }
    let mut subsets: Vec<SubsetCount> = counts
        .into_iter()
        .map(|(indices, count)| SubsetCount {
            features: indices.iter().map(|&i| data.feature_names[i].clone()).collect(),
            indices,
            count,
        })
        .collect();
    // stable: equal counts keep lexicographic subset order
    subsets.sort_by_key(|s| std::cmp::Reverse(s.count));
    Ok(SelectionResult { feature_names: data.feature_names.clone(), config: *cfg, repetitions: reps, subsets })
}
