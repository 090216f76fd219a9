use crate::error::{Error, Result};
use crate::scalar::Real;

/// Tree node; samples with `x[feature] <= threshold` go left.
#[derive(Debug, Clone, PartialEq)]
pub enum Node<T> {
    Split { feature: usize, threshold: T, left: usize, right: usize },
    Leaf { p_positive: f64, p_negative: f64, n: usize },
}

/// Binary classification tree grown best-first on Gini impurity.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree<T> {
    nodes: Vec<Node<T>>,
}

impl<T: Real> DecisionTree<T> {
    pub fn nodes(&self) -> &[Node<T>] {
        &self.nodes
    }

    pub fn n_splits(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Split { .. })).count()
    }

    /// Probability of the positive class for one feature row.
    pub fn score(&self, row: &[T]) -> f64 {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Split { feature, threshold, left, right } => {
                    i = if row[*feature] <= *threshold { *left } else { *right };
                }
                Node::Leaf { p_positive, .. } => return *p_positive,
            }
        }
    }

    /// Majority-class prediction (ties go to the positive class).
    pub fn predict(&self, row: &[T]) -> bool {
        self.score(row) >= 0.5
    }
}

struct Candidate<T> {
    gain: f64,
    feature: usize,
    threshold: T,
    left: Vec<usize>,
    right: Vec<usize>,
}

fn leaf(idx: &[usize], y: &[bool]) -> (f64, f64, usize) {
    let n = idx.len();
    if n == 0 {
        return (0.5, 0.5, 0);
    }
    let pos = idx.iter().filter(|&&i| y[i]).count();
    let p = pos as f64 / n as f64;
    (p, (n - pos) as f64 / n as f64, n)
}

/// `Σ count² / n`; the weighted Gini impurity of a node is `n − purity`.
fn purity(pos: usize, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let (p, q) = (pos as f64, (n - pos) as f64);
    (p * p + q * q) / n as f64
}

fn best_split<T: Real>(x: &[&[T]], y: &[bool], idx: &[usize], feature_ids: &[usize]) -> Option<Candidate<T>> {
    let n = idx.len();
    let total_pos = idx.iter().filter(|&&i| y[i]).count();
    if n < 2 || total_pos == 0 || total_pos == n {
        return None;
    }
    let parent = purity(total_pos, n);
    let mut best: Option<(f64, usize, T, usize)> = None;
    let mut order = idx.to_vec();
    for &f in feature_ids {
        order.sort_by(|&a, &b| x[a][f].partial_cmp(&x[b][f]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)));
        let mut left_pos = 0;
        for k in 0..n - 1 {
            if y[order[k]] {
                left_pos += 1;
            }
            let (v, next) = (x[order[k]][f], x[order[k + 1]][f]);
            if !(v < next) {
                continue;
            }
            let nl = k + 1;
            let gain = purity(left_pos, nl) + purity(total_pos - left_pos, n - nl) - parent;
            if best.as_ref().is_none_or(|b| gain > b.0 + 1e-12) {
                let mid = v + (next - v) / (T::one() + T::one());
                best = Some((gain, f, if mid < next { mid } else { v }, nl));
            }
        }
    }
    let (gain, feature, threshold, _) = best?;
    if gain <= 1e-12 {
        return None;
    }
    let (left, right): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| x[i][feature] <= threshold);
    Some(Candidate { gain, feature, threshold, left, right })
}

/// Greedy Gini tree with at most `max_splits` internal nodes and minimum leaf size 1.
///
/// At every step the split with the largest impurity decrease over all current
/// leaves is applied; equal gains favour the earlier leaf, then the lower
/// feature index, then the lower threshold. Thresholds are midpoints between
/// adjacent distinct training values. The grown structure depends only on the
/// ordering of each feature, so a strictly increasing transform of a feature
/// changes thresholds but not the training-set predictions. A
/// single-class training set yields a one-leaf tree predicting that class.
pub fn fit_tree<T: Real>(x: &[&[T]], y: &[bool], feature_ids: &[usize], max_splits: usize) -> Result<DecisionTree<T>> {
    if x.is_empty() || x.len() != y.len() {
        return Err(Error::InvalidConfig("training set empty or mislabeled".into()));
    }
    let all: Vec<usize> = (0..x.len()).collect();
    let (p, q, n) = leaf(&all, y);
    let mut nodes = vec![Node::Leaf { p_positive: p, p_negative: q, n }];
    // (node id, samples, cached best split)
    let mut open: Vec<(usize, Vec<usize>, Option<Candidate<T>>)> = Vec::new();
    let c = best_split(x, y, &all, feature_ids);
    open.push((0, all, c));
    let mut splits = 0;
    while splits < max_splits {
        let mut pick: Option<usize> = None;
        for (k, (_, _, c)) in open.iter().enumerate() {
            if let Some(c) = c {
                let better = match pick {
                    None => true,
                    Some(p) => c.gain > open[p].2.as_ref().map_or(f64::MIN, |b| b.gain) + 1e-12,
                };
                if better {
                    pick = Some(k);
                }
            }
        }
        let Some(k) = pick else { break };
        let (node, _, cand) = open.remove(k);
        let cand = cand.expect("picked leaf has a split");
        let (l, r) = (nodes.len(), nodes.len() + 1);
        for side in [&cand.left, &cand.right] {
            let (p, q, n) = leaf(side, y);
            nodes.push(Node::Leaf { p_positive: p, p_negative: q, n });
        }
        nodes[node] = Node::Split { feature: cand.feature, threshold: cand.threshold, left: l, right: r };
        let cl = best_split(x, y, &cand.left, feature_ids);
        let cr = best_split(x, y, &cand.right, feature_ids);
        // keep creation order so earlier leaves win ties
        open.push((l, cand.left, cl));
        open.push((r, cand.right, cr));
        open.sort_by_key(|e| e.0);
        splits += 1;
    }
    Ok(DecisionTree { nodes })
}
