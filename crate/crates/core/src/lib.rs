//! Atrial-activity organization features from single-lead ECG and
//! cross-validated decision-tree prediction of post-ablation outcome.
//!
//! Stages: [`preprocess`] → [`beat`] → [`aa`] → [`wavelet`] / [`features`] →
//! [`eval`]. [`synth`] generates ECGs with known ground truth, and [`io`] /
//! [`commands`] provide the file formats and batch commands behind the CLI.
//!
//! Numeric stages are generic over [`Real`] (`f32` or `f64`); the aliases
//! below name the `f64` instantiations used by the command layer.

pub mod aa;
pub mod beat;
pub mod commands;
pub mod error;
pub mod eval;
pub mod features;
pub mod io;
pub mod preprocess;
pub mod scalar;
pub mod signal;
pub mod synth;
pub mod wavelet;

pub use error::{Error, Result, Stage};
pub use scalar::Real;
pub use aa::AaSignal;
pub use features::{FeatureConfig, FeatureVector};
pub use signal::{EcgRecord, Label, SegmentPlan};
pub use wavelet::{RweVector, Wavelet, WaveletDecomposition};

pub type EcgRecordF64 = EcgRecord<f64>;
pub type EcgRecordF32 = EcgRecord<f32>;
pub type WaveletDecompositionF64 = WaveletDecomposition<f64>;
pub type FeatureVectorF64 = FeatureVector<f64>;
pub type AaSignalF64 = AaSignal<f64>;
