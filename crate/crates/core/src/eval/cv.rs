use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

/// Stratified fold assignment: each class is shuffled and dealt round-robin,
/// the deal continuing where the previous class stopped, so per-fold class
/// counts and fold sizes both differ by at most one.
pub fn stratified_kfold<R: Rng + ?Sized>(positive: &[bool], k: usize, rng: &mut R) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::InvalidConfig("at least 2 folds required".into()));
    }
    let mut folds = vec![0usize; positive.len()];
    let mut next = 0usize;
    for (class, name) in [(true, "SR_MAINTAINED"), (false, "AF_RELAPSE")] {
        let mut members: Vec<usize> = (0..positive.len()).filter(|&i| positive[i] == class).collect();
        if members.len() < k {
            return Err(Error::TooFewPerClass { class: name.into(), count: members.len(), needed: k });
        }
        members.shuffle(rng);
        for i in members {
            folds[i] = next;
            next = (next + 1) % k;
        }
    }
    Ok(folds)
}

/// Unstratified fold assignment of a shuffled index order.
pub fn shuffled_kfold<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Vec<usize>> {
    if k < 2 || n < k {
        return Err(Error::InvalidConfig(format!("cannot split {n} samples into {k} folds")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut folds = vec![0; n];
    for (pos, i) in order.into_iter().enumerate() {
        folds[i] = pos % k;
    }
    Ok(folds)
}
