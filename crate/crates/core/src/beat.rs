//! R-peak detection in the phasor-transform phase domain.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preprocess::fir;
use crate::scalar::Real;

/// Strictly increasing R-peak sample indices, at least the refractory period apart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RPeakList {
    pub indices: Vec<usize>,
    pub fs: f64,
}

impl RPeakList {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// `true` when indices are strictly increasing, in bounds, and separated
    /// by at least `min_gap_s`.
    pub fn is_valid(&self, signal_len: usize, min_gap_s: f64) -> bool {
        let gap = (min_gap_s * self.fs).round() as usize;
        self.indices.iter().all(|&i| i < signal_len)
            && self.indices.windows(2).all(|w| w[1] > w[0] && w[1] - w[0] >= gap)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectorConfig {
    /// Phasor imaginary part, in units of the record's typical QRS envelope.
    pub rv: f64,
    pub refractory_s: f64,
    /// Span of the moving window used for the adaptive threshold.
    pub threshold_window_s: f64,
    /// Candidate must exceed this fraction of the windowed phase maximum.
    pub threshold_fraction: f64,
    /// ...and this fraction of the phase of a typical beat, so that stretches
    /// without a QRS complex do not lower the threshold onto f-waves.
    pub floor_fraction: f64,
    pub refine_ms: f64,
    pub band_hz: (f64, f64),
    pub integration_s: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            rv: 0.5,
            refractory_s: 0.2,
            threshold_window_s: 2.0,
            threshold_fraction: 0.5,
            floor_fraction: 0.25,
            refine_ms: 25.0,
            band_hz: (5.0, 20.0),
            integration_s: 0.08,
        }
    }
}

/// Phase of the phasor `rv + j·x[n]`, i.e. `atan(x[n] / rv)`, in `(−π/2, π/2)`.
pub fn phasor_phase<T: Real>(signal: &[T], rv: T) -> Vec<T> {
    signal.iter().map(|&x| (x / rv).atan()).collect()
}

/// Detects R peaks in a baseline-free ECG.
///
/// A QRS-emphasis envelope (band-passed squared slope, centered integration)
/// is normalized by the median of its 2 s maxima and passed through the
/// phasor transform, which compresses large beats so that one dominant or
/// ectopic complex cannot mask its neighbours. Local phase maxima above an
/// adaptive threshold are kept under a refractory constraint and finally moved
/// to the largest `|signal|` within `refine_ms`.
pub fn detect_r_peaks<T: Real>(signal: &[T], fs: T, config: &DetectorConfig) -> Result<RPeakList> {
    let fs_f = fs.as_f64();
    let n = signal.len();
    let no_beats = || Error::NoBeatsFound { seconds: n as f64 / fs_f };
    let empty_ok = || -> Result<RPeakList> {
        if n as f64 >= 5.0 * fs_f {
            Err(no_beats())
        } else {
            Ok(RPeakList { indices: Vec::new(), fs: fs_f })
        }
    };
    if n < 3 {
        return empty_ok();
    }

    let env = qrs_envelope(signal, fs_f, config);
    let scale = robust_peak_level(&env, (config.threshold_window_s * fs_f).round() as usize);
    if !(scale > 0.0) || !scale.is_finite() {
        return empty_ok();
    }
    let norm: Vec<f64> = env.iter().map(|v| v / scale).collect();
    let phase = phasor_phase(&norm, config.rv);

    let half_win = ((config.threshold_window_s * fs_f) / 2.0).round() as usize;
    let local_max = sliding_max(&phase, half_win);
    let refractory = (config.refractory_s * fs_f).round() as usize;
    // the envelope is normalized so that a typical beat sits at 1
    let floor = config.floor_fraction * (1.0 / config.rv).atan();

    let mut picks: Vec<usize> = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        let p = phase[i];
        if p > phase[i - 1] && p >= phase[i + 1] && p > config.threshold_fraction * local_max[i] && p > floor {
            match picks.last_mut() {
                Some(last) if i - *last < refractory => {
                    if p > phase[*last] {
                        *last = i;
                    }
                }
                _ => picks.push(i),
            }
        }
        i += 1;
    }

    let reach = (config.refine_ms * 1e-3 * fs_f).round() as usize;
    let mut refined: Vec<usize> = Vec::with_capacity(picks.len());
    for &c in &picks {
        let lo = c.saturating_sub(reach);
        let hi = (c + reach).min(n - 1);
        let best = (lo..=hi)
            .max_by(|&a, &b| signal[a].abs().partial_cmp(&signal[b].abs()).unwrap_or(std::cmp::Ordering::Equal).then(b.cmp(&a)))
            .unwrap_or(c);
        match refined.last_mut() {
            Some(last) if best <= *last || best - *last < refractory => {
                if signal[best].abs() > signal[*last].abs() {
                    *last = best;
                }
            }
            _ => refined.push(best),
        }
    }
    refined.dedup();
    if refined.is_empty() {
        return empty_ok();
    }
    Ok(RPeakList { indices: refined, fs: fs_f })
}

fn qrs_envelope<T: Real>(signal: &[T], fs: f64, config: &DetectorConfig) -> Vec<f64> {
    let x: Vec<f64> = signal.iter().map(|v| v.as_f64()).collect();
    let (f_lo, f_hi) = config.band_hz;
    let nyq = fs / 2.0;
    let hi_taps = fir::taps_for_transition(fs, (f_hi / 3.0).max(1.0));
    let lo_taps = fir::taps_for_transition(fs, (f_lo / 2.0).max(0.5));
    let upper = fir::design_lowpass(hi_taps, f_hi.min(0.9 * nyq), fs, 40.0);
    let lower = fir::design_lowpass(lo_taps, f_lo.min(0.5 * nyq), fs, 40.0);
    let a = fir::centered_convolve(&x, &upper);
    let b = fir::centered_convolve(&x, &lower);
    let band: Vec<f64> = a.iter().zip(&b).map(|(p, q)| p - q).collect();
    let n = band.len();
    let slope2: Vec<f64> = (0..n)
        .map(|i| {
            let prev = band[i.saturating_sub(1)];
            let next = band[(i + 1).min(n - 1)];
            let d = (next - prev) / 2.0;
            d * d
        })
        .collect();
    let half = ((config.integration_s * fs) / 2.0).round() as usize;
    centered_mean(&slope2, half)
}

fn centered_mean(x: &[f64], half: usize) -> Vec<f64> {
    let n = x.len();
    let mut prefix = vec![0.0; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + x[i];
    }
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(n);
            (prefix[hi] - prefix[lo]) / (hi - lo) as f64
        })
        .collect()
}

fn robust_peak_level(env: &[f64], window: usize) -> f64 {
    let window = window.max(1);
    let mut maxima: Vec<f64> = env.chunks(window).map(|c| c.iter().copied().fold(0.0, f64::max)).collect();
    if maxima.is_empty() {
        return 0.0;
    }
    let mid = maxima.len() / 2;
    let (_, m, _) = maxima.select_nth_unstable_by(mid, |a, b| a.total_cmp(b));
    *m
}

/// Maximum of `x` over `[i − half, i + half]` for every `i` (monotone deque).
fn sliding_max(x: &[f64], half: usize) -> Vec<f64> {
    let n = x.len();
    let mut out = vec![0.0; n];
    let mut dq: std::collections::VecDeque<usize> = std::collections::VecDeque::new();
    let mut next = 0;
    for (i, o) in out.iter_mut().enumerate() {
        let hi = (i + half).min(n - 1);
        while next <= hi {
            while dq.back().is_some_and(|&b| x[b] <= x[next]) {
                dq.pop_back();
            }
            dq.push_back(next);
            next += 1;
        }
        let lo = i.saturating_sub(half);
        while dq.front().is_some_and(|&f| f < lo) {
            dq.pop_front();
        }
        *o = x[*dq.front().expect("window non-empty")];
    }
    out
}
