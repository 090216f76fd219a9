//! Ventricular (QRST) cancellation by adaptive template subtraction.
//!
//! For each beat the `k` most similar complete QRST windows (zero-lag
//! normalized cross-correlation, the beat itself excluded) are stacked; the
//! dominant right singular vector of that stack is the template direction,
//! scaled by least squares onto the beat and subtracted with cosine-tapered
//! edges.

use serde::{Deserialize, Serialize};

use crate::beat::RPeakList;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CancellationConfig {
    pub pre_ms: f64,
    pub post_ms: f64,
    /// Number of similar complexes feeding each template.
    pub k_similar: usize,
    pub taper_ms: f64,
}

impl Default for CancellationConfig {
    fn default() -> Self {
        Self { pre_ms: 100.0, post_ms: 450.0, k_similar: 10, taper_ms: 10.0 }
    }
}

/// Atrial-activity signal with the R peaks it was derived from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AaSignal<T> {
    pub samples: Vec<T>,
    pub fs: f64,
    pub r_peaks: RPeakList,
    pub source_id: String,
}

/// Fixed-extent window around an R peak. Positions outside the signal are
/// zero and excluded from `valid`.
#[derive(Debug, Clone, PartialEq)]
pub struct QrstWindow<T> {
    pub beat: usize,
    pub center: usize,
    /// Signal index of `samples[0]`; may be negative for the first beat.
    pub start: isize,
    pub samples: Vec<T>,
    pub valid: std::ops::Range<usize>,
}

impl<T: Real> QrstWindow<T> {
    pub fn extract(signal: &[T], beat: usize, center: usize, pre: usize, post: usize) -> Self {
        let start = center as isize - pre as isize;
        let len = pre + post;
        let samples: Vec<T> = (0..len)
            .map(|k| {
                let i = start + k as isize;
                if i >= 0 && (i as usize) < signal.len() {
                    signal[i as usize]
                } else {
                    T::zero()
                }
            })
            .collect();
        let lo = (-start).max(0) as usize;
        let hi = ((signal.len() as isize - start).max(0) as usize).min(len);
        Self { beat, center, start, samples, valid: lo.min(hi)..hi }
    }

    pub fn is_complete(&self) -> bool {
        self.valid == (0..self.samples.len())
    }
}

/// A selected window and its correlation with the target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Similar<T> {
    pub index: usize,
    pub correlation: T,
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Zero-lag normalized cross-correlation over the target's valid samples.
pub fn correlation<T: Real>(target: &QrstWindow<T>, other: &QrstWindow<T>) -> T {
    let r = target.valid.clone();
    let (a, b) = (&target.samples[r.clone()], &other.samples[r]);
    let den = (dot(a, a) * dot(b, b)).sqrt();
    if den > T::zero() {
        dot(a, b) / den
    } else {
        T::zero()
    }
}

/// The `k` candidates most correlated with `target`, best first (ties keep
/// candidate order). The caller excludes the target itself.
pub fn select_similar_qrst<T: Real>(target: &QrstWindow<T>, candidates: &[QrstWindow<T>], k: usize) -> Result<Vec<Similar<T>>> {
    if candidates.len() < k || k == 0 {
        return Err(Error::TooFewBeats { needed: k + 1, actual: candidates.len() + 1 });
    }
    let mut scored: Vec<Similar<T>> = candidates
        .iter()
        .enumerate()
        .map(|(index, c)| Similar { index, correlation: correlation(target, c) })
        .collect();
    scored.sort_by(|a, b| b.correlation.partial_cmp(&a.correlation).unwrap_or(std::cmp::Ordering::Equal));
    scored.truncate(k);
    Ok(scored)
}

/// Unit-norm dominant right singular vector of the stacked windows (sign unresolved).
pub fn principal_direction<T: Real>(selected: &[&[T]]) -> Result<Vec<T>> {
    if selected.len() < 2 {
        return Err(Error::TooFewBeats { needed: 2, actual: selected.len() });
    }
    let len = selected[0].len();
    if selected.iter().any(|w| w.len() != len) {
        return Err(Error::InvalidConfig("template windows differ in length".into()));
    }
    let rows: Vec<Vec<f64>> = selected.iter().map(|w| w.iter().map(|v| v.as_f64()).collect()).collect();
    let k = rows.len();
    let mut gram = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i..k {
            let g: f64 = rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b).sum();
            gram[i][j] = g;
            gram[j][i] = g;
        }
    }
    if gram.iter().enumerate().all(|(i, r)| r[i] == 0.0) {
        return Err(Error::DegenerateSet);
    }
    let (values, vectors) = jacobi_eigen(gram);
    let top = (0..k).max_by(|&a, &b| values[a].total_cmp(&values[b])).expect("k >= 2");
    let mut v = vec![0.0; len];
    for (i, row) in rows.iter().enumerate() {
        let c = vectors[i][top];
        for (acc, &x) in v.iter_mut().zip(row) {
            *acc += c * x;
        }
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(Error::DegenerateSet);
    }
    Ok(v.into_iter().map(|x| T::lit(x / norm)).collect())
}

/// `α` minimizing `‖target − α·direction‖²` over `range`.
pub fn least_squares_scale<T: Real>(target: &[T], direction: &[T], range: std::ops::Range<usize>) -> T {
    let (t, d) = (&target[range.clone()], &direction[range]);
    let dd = dot(d, d);
    if dd > T::zero() {
        dot(t, d) / dd
    } else {
        T::zero()
    }
}

/// Cancellation template: principal direction of `selected`, least-squares
/// scaled onto `target`. The sign ambiguity of the direction cancels in the fit.
pub fn build_template<T: Real>(selected: &[&[T]], target: &[T]) -> Result<Vec<T>> {
    let dir = principal_direction(selected)?;
    let alpha = least_squares_scale(target, &dir, 0..target.len());
    Ok(dir.into_iter().map(|v| v * alpha).collect())
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues and the eigenvector matrix (columns).
fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let scale: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}

fn taper_weight(i: usize, range: &std::ops::Range<usize>, ramp: usize) -> f64 {
    if ramp == 0 {
        return 1.0;
    }
    let from_start = i - range.start;
    let from_end = range.end - 1 - i;
    let d = from_start.min(from_end);
    if d >= ramp {
        1.0
    } else {
        0.5 - 0.5 * (std::f64::consts::PI * (d as f64 + 0.5) / ramp as f64).cos()
    }
}

/// Subtracts an adaptive QRST template from every detected beat.
///
/// Windows span `pre_ms` before to `post_ms` after each R peak. Where
/// consecutive windows overlap, each is cut at the middle of the overlap.
/// Samples outside every window are returned unchanged.
pub fn extract_aa<T: Real>(signal: &[T], fs: T, r_peaks: &RPeakList, config: &CancellationConfig) -> Result<AaSignal<T>> {
    let needed = config.k_similar + 1;
    let beats = &r_peaks.indices;
    if beats.len() < needed {
        return Err(Error::TooFewBeats { needed, actual: beats.len() });
    }
    let fs_f = fs.as_f64();
    let pre = (config.pre_ms * 1e-3 * fs_f).round() as usize;
    let post = (config.post_ms * 1e-3 * fs_f).round() as usize;
    let ramp = (config.taper_ms * 1e-3 * fs_f).round() as usize;
    let n = signal.len();

    let windows: Vec<QrstWindow<T>> =
        beats.iter().enumerate().map(|(b, &c)| QrstWindow::extract(signal, b, c, pre, post)).collect();
    let complete: Vec<usize> = (0..windows.len()).filter(|&b| windows[b].is_complete()).collect();

    // subtraction range of each beat in signal coordinates
    let spans: Vec<std::ops::Range<usize>> = (0..beats.len())
        .map(|b| {
            let mut lo = beats[b].saturating_sub(pre);
            let mut hi = (beats[b] + post).min(n);
            if b > 0 {
                let prev_end = beats[b - 1] + post;
                if prev_end > lo {
                    lo = lo.max((lo + prev_end.min(n)) / 2);
                }
            }
            if b + 1 < beats.len() {
                let next_start = beats[b + 1].saturating_sub(pre);
                if next_start < hi {
                    hi = hi.min((next_start + hi) / 2);
                }
            }
            lo..hi.max(lo)
        })
        .collect();

    let mut out = signal.to_vec();
    for (b, target) in windows.iter().enumerate() {
        let candidate_ids: Vec<usize> = complete.iter().copied().filter(|&c| c != b).collect();
        if candidate_ids.len() < config.k_similar {
            return Err(Error::TooFewBeats { needed, actual: candidate_ids.len() + 1 });
        }
        let candidates: Vec<QrstWindow<T>> = candidate_ids.iter().map(|&c| windows[c].clone()).collect();
        let chosen = select_similar_qrst(target, &candidates, config.k_similar)?;
        let stack: Vec<&[T]> = chosen.iter().map(|s| candidates[s.index].samples.as_slice()).collect();
        let dir = match principal_direction(&stack) {
            Ok(d) => d,
            Err(Error::DegenerateSet) => continue,
            Err(e) => return Err(e),
        };
        let alpha = least_squares_scale(&target.samples, &dir, target.valid.clone());
        let span = &spans[b];
        for i in span.clone() {
            let k = (i as isize - target.start) as usize;
            let w = T::lit(taper_weight(i, span, ramp));
            out[i] = out[i] - w * alpha * dir[k];
        }
    }
    Ok(AaSignal { samples: out, fs: fs_f, r_peaks: r_peaks.clone(), source_id: String::new() })
}
