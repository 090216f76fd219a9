//! Welch power spectrum and dominant atrial frequency.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WelchConfig {
    pub window_len: usize,
    pub overlap: f64,
    pub nfft: usize,
    /// Search band `[low, high]` in Hz for the dominant frequency.
    pub band_hz: (f64, f64),
}

impl Default for WelchConfig {
    fn default() -> Self {
        Self { window_len: 4096, overlap: 0.5, nfft: 8192, band_hz: (3.0, 9.0) }
    }
}

/// One-sided power spectral density.
#[derive(Debug, Clone, PartialEq)]
pub struct Psd {
    pub freqs: Vec<f64>,
    pub power: Vec<f64>,
}

/// Symmetric Hamming window.
pub fn hamming(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    (0..n)
        .map(|i| 0.54 - 0.46 * (2.0 * std::f64::consts::PI * i as f64 / (n - 1) as f64).cos())
        .collect()
}

/// Averaged modified periodogram. Each segment has its mean removed; a
/// trailing partial segment is dropped.
pub fn welch<T: Real>(signal: &[T], fs: f64, cfg: &WelchConfig) -> Result<Psd> {
    let w = cfg.window_len;
    if w == 0 || cfg.nfft < w || !(0.0..1.0).contains(&cfg.overlap) {
        return Err(Error::InvalidConfig("invalid Welch parameters".into()));
    }
    if signal.len() < w {
        return Err(Error::TooShort { needed: w, actual: signal.len() });
    }
    let step = ((w as f64) * (1.0 - cfg.overlap)).round().max(1.0) as usize;
    let win = hamming(w);
    let win_power: f64 = win.iter().map(|v| v * v).sum();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(cfg.nfft);
    let n_bins = cfg.nfft / 2 + 1;
    let mut power = vec![0.0; n_bins];
    let mut buf = vec![Complex::new(0.0, 0.0); cfg.nfft];
    let mut n_seg = 0usize;
    let mut start = 0;
    while start + w <= signal.len() {
        let seg = &signal[start..start + w];
        let mu = seg.iter().map(|v| v.as_f64()).sum::<f64>() / w as f64;
        for (k, slot) in buf.iter_mut().enumerate() {
            *slot = if k < w { Complex::new((seg[k].as_f64() - mu) * win[k], 0.0) } else { Complex::new(0.0, 0.0) };
        }
        fft.process(&mut buf);
        for (p, c) in power.iter_mut().zip(&buf) {
            *p += c.norm_sqr();
        }
        n_seg += 1;
        start += step;
    }
    let scale = 1.0 / (fs * win_power * n_seg as f64);
    for (k, p) in power.iter_mut().enumerate() {
        *p *= scale;
        if k != 0 && !(cfg.nfft.is_multiple_of(2) && k == n_bins - 1) {
            *p *= 2.0;
        }
    }
    let freqs = (0..n_bins).map(|k| k as f64 * fs / cfg.nfft as f64).collect();
    Ok(Psd { freqs, power })
}

/// Frequency of the largest spectral peak within the configured band.
pub fn dominant_frequency<T: Real>(signal: &[T], fs: f64, cfg: &WelchConfig) -> Result<f64> {
    let psd = welch(signal, fs, cfg)?;
    let (lo, hi) = cfg.band_hz;
    psd.freqs
        .iter()
        .zip(&psd.power)
        .filter(|(f, _)| **f >= lo && **f <= hi)
        .fold(None, |best: Option<(f64, f64)>, (&f, &p)| match best {
            Some((_, bp)) if bp >= p => best,
            _ => Some((f, p)),
        })
        .map(|(f, _)| f)
        .ok_or_else(|| Error::InvalidConfig("search band contains no frequency bins".into()))
}

/// Total power in `[lo, hi]` Hz.
pub fn band_power(psd: &Psd, lo: f64, hi: f64) -> f64 {
    let df = psd.freqs.get(1).copied().unwrap_or(0.0);
    psd.freqs.iter().zip(&psd.power).filter(|(f, _)| **f >= lo && **f <= hi).map(|(_, p)| p * df).sum()
}
