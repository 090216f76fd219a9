#![allow(dead_code)]

use std::f64::consts::TAU;

pub const FS: f64 = 1000.0;

pub fn sine(freq: f64, amp: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| amp * (TAU * freq * i as f64 / FS).sin()).collect()
}

pub fn rms(x: &[f64]) -> f64 {
    (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
}

pub fn rms_diff(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    rms(&d)
}

/// Amplitude of the `freq` component by projection onto sin/cos.
pub fn tone_amplitude(x: &[f64], freq: f64) -> f64 {
    let (mut s, mut c) = (0.0, 0.0);
    for (i, v) in x.iter().enumerate() {
        let ph = TAU * freq * i as f64 / FS;
        s += v * ph.sin();
        c += v * ph.cos();
    }
    2.0 * (s * s + c * c).sqrt() / x.len() as f64
}

/// Greedy one-to-one matching of detections to truth within `tol` samples:
/// returns (true positives, false negatives, false positives).
pub fn match_peaks(truth: &[usize], detected: &[usize], tol: usize) -> (usize, usize, usize) {
    let mut used = vec![false; detected.len()];
    let mut tp = 0;
    for &t in truth {
        let hit = detected
            .iter()
            .enumerate()
            .filter(|(j, &d)| !used[*j] && d.abs_diff(t) <= tol)
            .min_by_key(|(_, &d)| d.abs_diff(t))
            .map(|(j, _)| j);
        if let Some(j) = hit {
            used[j] = true;
            tp += 1;
        }
    }
    (tp, truth.len() - tp, detected.len() - tp)
}
