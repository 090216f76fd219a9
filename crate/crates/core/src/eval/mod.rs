//! Decision-tree classification with repeated stratified cross-validation,
//! ROC analysis and forward sequential feature selection.
//!
//! The positive class is [`Label::SrMaintained`](crate::Label): sensitivity
//! counts correctly predicted sinus-rhythm maintenance.

mod cv;
mod evaluate;
mod roc;
mod selection;
mod tree;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal::Label;

pub use cv::{shuffled_kfold, stratified_kfold};
pub use evaluate::{evaluate_model, CvConfig, EvaluationReport, MetricPooling, ReportMetadata, RepetitionMetrics};
pub use roc::{roc_and_threshold, Confusion, Metrics, RocCurve, RocResult};
pub use selection::{sequential_forward_selection, SelectionRepetition, SelectionResult, SubsetCount};
pub use tree::{fit_tree, DecisionTree, Node};

/// Deterministic sub-seed for stream `id` of a base seed (SplitMix64 finalizer).
pub fn split_seed(seed: u64, id: u64) -> u64 {
    let mut z = seed ^ id.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0x6A09_E667_F3BC_C909);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Labeled feature matrix (rows = records).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset<T> {
    pub feature_names: Vec<String>,
    pub rows: Vec<Vec<T>>,
    /// `true` for the positive (SR maintained) class.
    pub positive: Vec<bool>,
}

impl<T: Real> Dataset<T> {
    pub fn new(feature_names: Vec<String>, rows: Vec<Vec<T>>, positive: Vec<bool>) -> Result<Self> {
        if rows.len() != positive.len() {
            return Err(Error::InvalidConfig("row and label counts differ".into()));
        }
        if rows.iter().any(|r| r.len() != feature_names.len()) {
            return Err(Error::InvalidConfig("row width differs from feature count".into()));
        }
        Ok(Self { feature_names, rows, positive })
    }

    /// Builds a dataset from labels, dropping unlabeled rows.
    pub fn from_labels(feature_names: Vec<String>, rows: Vec<Vec<T>>, labels: &[Label]) -> Result<Self> {
        let (rows, positive): (Vec<_>, Vec<_>) = rows
            .into_iter()
            .zip(labels)
            .filter(|(_, l)| **l != Label::Unlabeled)
            .map(|(r, l)| (r, l.is_positive()))
            .unzip();
        Self::new(feature_names, rows, positive)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.positive.iter().filter(|&&p| p).count();
        (pos, self.positive.len() - pos)
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|f| f.eq_ignore_ascii_case(name))
    }

    pub fn feature_indices(&self, names: &[&str]) -> Result<Vec<usize>> {
        names
            .iter()
            .map(|n| self.feature_index(n).ok_or_else(|| Error::InvalidConfig(format!("unknown feature '{n}'"))))
            .collect()
    }

    pub(crate) fn subset(&self, idx: &[usize]) -> (Vec<&[T]>, Vec<bool>) {
        (idx.iter().map(|&i| self.rows[i].as_slice()).collect(), idx.iter().map(|&i| self.positive[i]).collect())
    }
}
