//! Per-record feature extraction from the atrial-activity signal.

pub mod entropy;
pub mod spectral;

use serde::{Deserialize, Serialize};

use crate::aa::{extract_aa, AaSignal, CancellationConfig};
use crate::beat::{detect_r_peaks, DetectorConfig, RPeakList};
use crate::error::{Error, Result, Stage};
use crate::preprocess::{PreprocessConfig, Preprocessor};
use crate::scalar::{mean, rms, std_pop, Real};
use crate::signal::{segment, validate_record, EcgRecord, Label, SegmentPlan, ANALYSIS_WINDOW_S};
use crate::wavelet::{relative_wavelet_energy, swen, swt_decompose, RweVector, Wavelet};

pub use entropy::{match_counts, sample_entropy, swenv, EntropyParams, MatchCounts, Swenv};
pub use spectral::{dominant_frequency, welch, Psd, WelchConfig};

/// Detail scales whose relative energy is summarized.
pub const RWE_SCALES: [usize; 3] = [6, 7, 8];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WaveletConfig {
    pub wavelet: Wavelet,
    pub levels: usize,
}

impl Default for WaveletConfig {
    fn default() -> Self {
        Self { wavelet: Wavelet::default(), levels: 8 }
    }
}

/// Relative wavelet energy of every segment.
pub fn rwe_series<T: Real>(aa: &[T], fs: T, plan: &SegmentPlan, wcfg: &WaveletConfig) -> Result<Vec<RweVector<T>>> {
    segment(aa, fs, plan)?
        .into_iter()
        .map(|s| relative_wavelet_energy(&swt_decompose(s, wcfg.levels, wcfg.wavelet)?))
        .collect()
}

/// Mean and population standard deviation of one scale's RWE across segments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RweStat<T> {
    pub scale: usize,
    pub mean: T,
    pub std: T,
}

pub fn rwe_stats<T: Real>(rwe: &[RweVector<T>], scales: &[usize]) -> Vec<RweStat<T>> {
    scales
        .iter()
        .map(|&j| {
            let v: Vec<T> = rwe.iter().map(|r| r.scale(j)).collect();
            RweStat { scale: j, mean: mean(&v), std: std_pop(&v) }
        })
        .collect()
}

/// Wavelet entropy of each segment.
pub fn swen_series<T: Real>(rwe: &[RweVector<T>]) -> Vec<T> {
    rwe.iter().map(swen).collect()
}

/// AA RMS as a percentage of the mean absolute ECG amplitude at the R peaks.
pub fn fwp<T: Real>(aa: &[T], signal: &[T], r_peaks: &RPeakList) -> Result<T> {
    if r_peaks.is_empty() {
        return Err(Error::TooFewBeats { needed: 1, actual: 0 });
    }
    let r_mag: Vec<T> = r_peaks.indices.iter().map(|&i| signal[i].abs()).collect();
    let r = mean(&r_mag);
    if !(r > T::zero()) {
        return Err(Error::ZeroRPeak);
    }
    Ok(T::lit(100.0) * rms(aa) / r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector<T> {
    pub record_id: String,
    pub label: Label,
    pub rwem6: T,
    pub rwes6: T,
    pub rwem7: T,
    pub rwes7: T,
    pub rwem8: T,
    pub rwes8: T,
    pub swenv: T,
    pub daf: T,
    pub sampen: T,
    pub fwp: T,
    /// SWEnV was computed on a constant SWEn series.
    pub swenv_degenerate: bool,
}

impl<T: Real> FeatureVector<T> {
    pub const NAMES: [&'static str; 10] =
        ["RWEm6", "RWEs6", "RWEm7", "RWEs7", "RWEm8", "RWEs8", "SWEnV", "DAF", "SampEn", "fWP"];

    pub fn values(&self) -> [T; 10] {
        [
            self.rwem6, self.rwes6, self.rwem7, self.rwes7, self.rwem8, self.rwes8, self.swenv, self.daf, self.sampen,
            self.fwp,
        ]
    }

    pub fn from_values(record_id: String, label: Label, v: [T; 10]) -> Self {
        Self {
            record_id,
            label,
            rwem6: v[0],
            rwes6: v[1],
            rwem7: v[2],
            rwes7: v[3],
            rwem8: v[4],
            rwes8: v[5],
            swenv: v[6],
            daf: v[7],
            sampen: v[8],
            fwp: v[9],
            swenv_degenerate: false,
        }
    }

    pub fn get(&self, name: &str) -> Option<T> {
        Self::NAMES.iter().position(|n| n.eq_ignore_ascii_case(name)).map(|i| self.values()[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureConfig {
    /// Start of the analysed excerpt within the record.
    pub offset_s: f64,
    pub window_s: f64,
    pub preprocess: PreprocessConfig,
    pub detector: DetectorConfig,
    pub cancellation: CancellationConfig,
    pub segments: SegmentPlan,
    pub wavelet: WaveletConfig,
    pub swenv: EntropyParams,
    pub sampen: EntropyParams,
    pub welch: WelchConfig,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            offset_s: 0.0,
            window_s: ANALYSIS_WINDOW_S,
            preprocess: PreprocessConfig::default(),
            detector: DetectorConfig::default(),
            cancellation: CancellationConfig::default(),
            segments: SegmentPlan::default(),
            wavelet: WaveletConfig::default(),
            swenv: EntropyParams::SWENV,
            sampen: EntropyParams::AA,
            welch: WelchConfig::default(),
        }
    }
}

/// Intermediate products of [`extract_all`].
#[derive(Debug, Clone)]
pub struct PipelineOutput<T> {
    pub filtered: Vec<T>,
    pub aa: AaSignal<T>,
    pub features: FeatureVector<T>,
}

/// Features of an already extracted AA signal.
pub fn features_from_aa<T: Real>(
    record_id: &str,
    label: Label,
    filtered: &[T],
    aa: &AaSignal<T>,
    config: &FeatureConfig,
) -> Result<FeatureVector<T>> {
    let fs = T::lit(aa.fs);
    let rwe = rwe_series(&aa.samples, fs, &config.segments, &config.wavelet)?;
    let stats = rwe_stats(&rwe, &RWE_SCALES);
    let sw = swenv(&swen_series(&rwe), config.swenv)?;
    let daf = dominant_frequency(&aa.samples, aa.fs, &config.welch)?;
    let sampen = entropy::sample_entropy_relative(&aa.samples, config.sampen)?;
    let fwp = fwp(&aa.samples, filtered, &aa.r_peaks)?;
    Ok(FeatureVector {
        record_id: record_id.to_string(),
        label,
        rwem6: stats[0].mean,
        rwes6: stats[0].std,
        rwem7: stats[1].mean,
        rwes7: stats[1].std,
        rwem8: stats[2].mean,
        rwes8: stats[2].std,
        swenv: sw.value,
        daf: T::lit(daf),
        sampen,
        fwp,
        swenv_degenerate: sw.degenerate,
    })
}

/// Validate → preprocess → detect → cancel → features, keeping intermediates.
/// Errors carry the stage that raised them.
pub fn run_pipeline<T: Real>(record: &EcgRecord<T>, config: &FeatureConfig) -> Result<PipelineOutput<T>> {
    let rec = record
        .excerpt(T::lit(config.offset_s), T::lit(config.window_s))
        .map_err(Error::at(Stage::Validate))?;
    validate_record(&rec).into_result().map_err(Error::at(Stage::Validate))?;
    let fs = rec.fs.as_f64();
    let filtered = Preprocessor::<T>::new(config.preprocess, fs)
        .and_then(|p| p.run(&rec.samples))
        .map_err(Error::at(Stage::Preprocess))?;
    let peaks = detect_r_peaks(&filtered, rec.fs, &config.detector).map_err(Error::at(Stage::BeatDetect))?;
    let mut aa = extract_aa(&filtered, rec.fs, &peaks, &config.cancellation).map_err(Error::at(Stage::AaExtract))?;
    aa.source_id = rec.record_id.clone();
    let features =
        features_from_aa(&rec.record_id, rec.label, &filtered, &aa, config).map_err(Error::at(Stage::Features))?;
    Ok(PipelineOutput { filtered, aa, features })
}

pub fn extract_all<T: Real>(record: &EcgRecord<T>, config: &FeatureConfig) -> Result<FeatureVector<T>> {
    run_pipeline(record, config).map(|o| o.features)
}
