use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

/// Threshold metrics in percent. Undefined ratios (empty denominator) are 0.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub se: f64,
    pub sp: f64,
    pub acc: f64,
    pub ppv: f64,
    pub npv: f64,
}

fn pct(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        100.0 * num as f64 / den as f64
    }
}

impl Confusion {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn metrics(&self) -> Metrics {
        Metrics {
            se: pct(self.tp, self.tp + self.fn_),
            sp: pct(self.tn, self.tn + self.fp),
            acc: pct(self.tp + self.tn, self.total()),
            ppv: pct(self.tp, self.tp + self.fp),
            npv: pct(self.tn, self.tn + self.fn_),
        }
    }
}

/// ROC operating points from the strictest threshold (nothing positive) down
/// to the loosest (everything positive).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub fpr: Vec<f64>,
    pub tpr: Vec<f64>,
    /// Score threshold of each point (`score >= threshold` is positive); the
    /// first point uses `+inf`, serialized as `null`.
    pub thresholds: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocResult {
    pub curve: RocCurve,
    /// Area under the curve as a fraction in [0, 1].
    pub auc: f64,
    pub best_threshold: Option<f64>,
    pub confusion: Confusion,
    pub metrics: Metrics,
}

/// ROC over every distinct score, trapezoidal AUC and the accuracy-maximizing
/// threshold (ties resolved toward higher sensitivity).
pub fn roc_and_threshold(scores: &[f64], positive: &[bool]) -> Result<RocResult> {
    if scores.len() != positive.len() {
        return Err(Error::InvalidConfig("score and label counts differ".into()));
    }
    let n_pos = positive.iter().filter(|&&p| p).count();
    let n_neg = positive.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClass);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut fpr = vec![0.0];
    let mut tpr = vec![0.0];
    let mut thresholds = vec![None];
    let mut best = Confusion { tp: 0, fp: 0, tn: n_neg, fn_: n_pos };
    let mut best_threshold = None;
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut auc2 = 0.0; // twice the area, in units of 1/(n_pos n_neg)
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        let (tp0, fp0) = (tp, fp);
        while i < order.len() && scores[order[i]] == s {
            if positive[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        auc2 += ((fp - fp0) * (tp + tp0)) as f64;
        fpr.push(fp as f64 / n_neg as f64);
        tpr.push(tp as f64 / n_pos as f64);
        thresholds.push(Some(s));
        let c = Confusion { tp, fp, tn: n_neg - fp, fn_: n_pos - tp };
        let (correct, best_correct) = (c.tp + c.tn, best.tp + best.tn);
        if correct > best_correct || (correct == best_correct && c.tp > best.tp) {
            best = c;
            best_threshold = Some(s);
        }
    }
    Ok(RocResult {
        curve: RocCurve { fpr, tpr, thresholds },
        auc: auc2 / (2.0 * n_pos as f64 * n_neg as f64),
        best_threshold,
        confusion: best,
        metrics: best.metrics(),
    })
}
