//! ECG denoising: powerline shrinkage, baseline-wander high-pass and
//! high-frequency low-pass.
//!
//! Both cutoffs are linear-phase FIR filters designed with a Dolph–Chebyshev
//! window and applied forward and backward, so the net phase is zero and the
//! magnitude response is squared.

pub mod fir;
mod powerline;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::wavelet::Wavelet;

pub use powerline::containing_scale;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterKind {
    HighPass,
    LowPass,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub kind: FilterKind,
    pub cutoff_hz: f64,
    /// Side-lobe attenuation of the design window (dB).
    pub attenuation_db: f64,
    /// Target transition width (Hz); sets the filter length.
    pub transition_hz: f64,
}

impl FilterSpec {
    pub fn baseline() -> Self {
        Self { kind: FilterKind::HighPass, cutoff_hz: 0.5, attenuation_db: 40.0, transition_hz: 0.5 }
    }

    pub fn noise() -> Self {
        Self { kind: FilterKind::LowPass, cutoff_hz: 70.0, attenuation_db: 40.0, transition_hz: 10.0 }
    }

    fn check(&self, fs: f64) -> Result<()> {
        if !(self.cutoff_hz > 0.0 && self.cutoff_hz < fs / 2.0) {
            return Err(Error::InvalidConfig(format!(
                "cutoff {} Hz outside (0, {}) Hz",
                self.cutoff_hz,
                fs / 2.0
            )));
        }
        if !(self.transition_hz > 0.0) {
            return Err(Error::InvalidConfig("transition width must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ShrinkageSpec {
    /// Powerline frequency (50 or 60 Hz).
    pub target_hz: f64,
    pub levels: usize,
    pub mother_wavelet: Wavelet,
    /// Interference is re-estimated on blocks of this length (s).
    pub block_s: f64,
}

impl Default for ShrinkageSpec {
    fn default() -> Self {
        Self { target_hz: 50.0, levels: 5, mother_wavelet: Wavelet::Daubechies(6), block_s: 1.0 }
    }
}

/// A designed zero-phase FIR filter, reusable across records of the same rate.
#[derive(Debug, Clone)]
pub struct ZeroPhaseFir<T> {
    taps: Vec<f64>,
    kernel: Vec<T>,
}

impl<T: Real> ZeroPhaseFir<T> {
    pub fn design(spec: &FilterSpec, fs: f64) -> Result<Self> {
        spec.check(fs)?;
        let n = fir::taps_for_transition(fs, spec.transition_hz);
        let taps = match spec.kind {
            FilterKind::LowPass => fir::design_lowpass(n, spec.cutoff_hz, fs, spec.attenuation_db),
            FilterKind::HighPass => fir::design_highpass(n, spec.cutoff_hz, fs, spec.attenuation_db),
        };
        // forward–backward of a symmetric FIR equals one pass of h * h
        let kernel = fir::convolve(&taps, &taps).into_iter().map(T::lit).collect();
        Ok(Self { taps, kernel })
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn apply(&self, signal: &[T]) -> Vec<T> {
        fir::centered_convolve(signal, &self.kernel)
    }
}

/// Removes powerline interference by SWT shrinkage.
///
/// The signal is decomposed to `spec.levels`; in the scale containing the
/// powerline frequency and its two neighbours the interference tone is fitted
/// per block (ignoring QRS-dominated coefficients) and subtracted; the
/// containing scale's residual is then soft-thresholded at its MAD noise level.
pub fn remove_powerline<T: Real>(signal: &[T], fs: T, spec: &ShrinkageSpec) -> Result<Vec<T>> {
    powerline::remove(signal, fs, spec)
}

pub fn highpass_baseline<T: Real>(signal: &[T], fs: T, spec: &FilterSpec) -> Result<Vec<T>> {
    Ok(ZeroPhaseFir::design(spec, fs.as_f64())?.apply(signal))
}

pub fn lowpass_noise<T: Real>(signal: &[T], fs: T, spec: &FilterSpec) -> Result<Vec<T>> {
    Ok(ZeroPhaseFir::design(spec, fs.as_f64())?.apply(signal))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PreprocessConfig {
    pub powerline: ShrinkageSpec,
    pub highpass: FilterSpec,
    pub lowpass: FilterSpec,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self { powerline: ShrinkageSpec::default(), highpass: FilterSpec::baseline(), lowpass: FilterSpec::noise() }
    }
}

/// The full denoising cascade with filters designed once.
#[derive(Debug, Clone)]
pub struct Preprocessor<T> {
    fs: f64,
    config: PreprocessConfig,
    highpass: ZeroPhaseFir<T>,
    lowpass: ZeroPhaseFir<T>,
}

impl<T: Real> Preprocessor<T> {
    pub fn new(config: PreprocessConfig, fs: f64) -> Result<Self> {
        Ok(Self {
            fs,
            highpass: ZeroPhaseFir::design(&config.highpass, fs)?,
            lowpass: ZeroPhaseFir::design(&config.lowpass, fs)?,
            config,
        })
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    /// Powerline removal, then high-pass, then low-pass.
    pub fn run(&self, signal: &[T]) -> Result<Vec<T>> {
        let x = remove_powerline(signal, T::lit(self.fs), &self.config.powerline)?;
        let x = self.highpass.apply(&x);
        Ok(self.lowpass.apply(&x))
    }
}
