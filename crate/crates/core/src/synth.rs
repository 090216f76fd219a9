//! Synthetic single-lead AF ECG with known ground truth.
//!
//! The atrial component is a sawtooth-like sum of a fundamental at the
//! per-segment dominant frequency and decaying harmonics. Disorganization
//! (`1 − organization`) scales slow random amplitude, frequency and
//! harmonic-phase modulation; `daf_jitter_hz` moves the dominant frequency
//! between 0.8 s segments. Ventricular activity is a train of analytic
//! Gaussian-composite QRST complexes at irregular RR intervals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal::{EcgRecord, Label};

/// Length of one ground-truth DAF segment (s).
pub const TRUTH_SEGMENT_S: f64 = 0.8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub fs: f64,
    pub duration_s: f64,
    pub daf_hz: f64,
    pub daf_jitter_hz: f64,
    pub fwave_amp_mv: f64,
    pub fwave_harmonics: usize,
    pub harmonic_decay: f64,
    pub rr_mean_s: f64,
    pub rr_cv: f64,
    pub qrst_template_id: u8,
    /// Beat-to-beat relative amplitude variation of the QRST complex.
    pub qrst_amp_cv: f64,
    /// Beat numbers (0-based) rendered with the ectopic morphology.
    pub ectopic_beats: Vec<usize>,
    pub noise_rms_mv: f64,
    pub powerline_amp_mv: f64,
    pub powerline_hz: f64,
    pub baseline_wander_mv: f64,
    pub organization: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            fs: 1000.0,
            duration_s: 20.0,
            daf_hz: 6.0,
            daf_jitter_hz: 0.0,
            fwave_amp_mv: 0.1,
            fwave_harmonics: 2,
            harmonic_decay: 0.5,
            rr_mean_s: 0.75,
            rr_cv: 0.15,
            qrst_template_id: 0,
            qrst_amp_cv: 0.0,
            ectopic_beats: Vec::new(),
            noise_rms_mv: 0.0,
            powerline_amp_mv: 0.0,
            powerline_hz: 50.0,
            baseline_wander_mv: 0.0,
            organization: 1.0,
            seed: 0,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidSpec(m.to_string()));
        if !(self.fs > 0.0 && self.fs.is_finite()) {
            return bad("fs must be positive");
        }
        if !(self.duration_s > 0.0) {
            return bad("duration must be positive");
        }
        if !(3.0..=9.0).contains(&self.daf_hz) {
            return bad("daf_hz must lie in [3, 9]");
        }
        if !(self.rr_mean_s > 0.3) {
            return bad("rr_mean_s must exceed 0.3 s");
        }
        if !(0.0..=1.0).contains(&self.organization) {
            return bad("organization must lie in [0, 1]");
        }
        let non_negative = [
            self.daf_jitter_hz,
            self.fwave_amp_mv,
            self.harmonic_decay,
            self.rr_cv,
            self.qrst_amp_cv,
            self.noise_rms_mv,
            self.powerline_amp_mv,
            self.baseline_wander_mv,
        ];
        if non_negative.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return bad("amplitudes, jitters and variation coefficients must be non-negative");
        }
        if self.qrst_template_id as usize >= TEMPLATES.len() {
            return bad("unknown qrst_template_id");
        }
        Ok(())
    }

    /// Noise level giving `snr_db` relative to the noise-free composite.
    pub fn with_snr_db(mut self, snr_db: f64) -> Result<Self> {
        self.noise_rms_mv = 0.0;
        let (clean, _) = generate::<f64>(&self)?;
        let p = clean.samples.iter().map(|v| v * v).sum::<f64>() / clean.samples.len() as f64;
        self.noise_rms_mv = (p / 10f64.powf(snr_db / 10.0)).sqrt();
        Ok(self)
    }
}

/// Ground truth accompanying a generated record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthTruth {
    pub beat_times: Vec<f64>,
    pub beat_indices: Vec<usize>,
    pub ectopic: Vec<bool>,
    pub true_aa: Vec<f64>,
    /// Ventricular (QRST) component alone.
    pub qrst: Vec<f64>,
    pub true_daf_per_segment: Vec<f64>,
    pub label: Label,
}

/// Gaussian wave: (amplitude mV, offset from R s, width s).
type Wave = (f64, f64, f64);

const TEMPLATES: [[Wave; 4]; 3] = [
    [(-0.12, -0.030, 0.008), (1.0, 0.0, 0.010), (-0.30, 0.030, 0.009), (0.25, 0.26, 0.045)],
    [(-0.05, -0.035, 0.010), (0.8, 0.0, 0.012), (-0.20, 0.035, 0.011), (0.20, 0.28, 0.050)],
    [(-0.10, -0.028, 0.007), (1.2, 0.0, 0.009), (-0.40, 0.028, 0.008), (-0.20, 0.25, 0.045)],
];

const ECTOPIC: [Wave; 4] = [(0.0, 0.0, 0.01), (1.5, 0.0, 0.025), (-0.40, 0.055, 0.02), (-0.40, 0.30, 0.06)];

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(crate::eval::split_seed(seed, id))
}

/// Smooth zero-mean random process in [-1, 1] built from three slow sinusoids.
struct SlowProcess {
    parts: [(f64, f64); 3],
}

impl SlowProcess {
    fn new(rng: &mut ChaCha8Rng) -> Self {
        let mut part = || (rng.random_range(0.05..0.6), rng.random_range(0.0..std::f64::consts::TAU));
        Self { parts: [part(), part(), part()] }
    }

    fn at(&self, t: f64) -> f64 {
        self.parts.iter().map(|(f, p)| (std::f64::consts::TAU * f * t + p).sin()).sum::<f64>() / 3.0
    }
}

pub fn generate<T: Real>(spec: &SynthSpec) -> Result<(EcgRecord<T>, SynthTruth)> {
    spec.validate()?;
    let fs = spec.fs;
    let n = (spec.duration_s * fs).round() as usize;
    let disorder = 1.0 - spec.organization;

    // atrial activity
    let mut rng_aa = stream(spec.seed, 1);
    let n_seg = (spec.duration_s / TRUTH_SEGMENT_S).ceil() as usize;
    let daf: Vec<f64> = (0..n_seg)
        .map(|_| {
            let z: f64 = rng_aa.sample(StandardNormal);
            (spec.daf_hz + spec.daf_jitter_hz * z).clamp(3.0, 9.0)
        })
        .collect();
    // per-segment amplitude and harmonic balance, both scaled by disorder
    let seg_shape: Vec<(f64, f64)> = (0..n_seg)
        .map(|_| {
            let za: f64 = rng_aa.sample(StandardNormal);
            let zh: f64 = rng_aa.sample(StandardNormal);
            ((disorder * 0.5 * za).exp().clamp(0.6, 1.6), (disorder * 1.6 * zh).exp().clamp(0.5, 1.6))
        })
        .collect();
    let fm = SlowProcess::new(&mut rng_aa);
    let am = SlowProcess::new(&mut rng_aa);
    let phase_walk: Vec<SlowProcess> = (0..spec.fwave_harmonics).map(|_| SlowProcess::new(&mut rng_aa)).collect();
    let phase0: f64 = rng_aa.random_range(0.0..std::f64::consts::TAU);
    let norm: f64 = (0..=spec.fwave_harmonics).map(|h| spec.harmonic_decay.powi(h as i32)).sum();
    let mut true_aa = vec![0.0; n];
    let mut theta = phase0;
    for (i, v) in true_aa.iter_mut().enumerate() {
        let t = i as f64 / fs;
        let seg = ((t / TRUTH_SEGMENT_S) as usize).min(n_seg - 1);
        let f = (daf[seg] + disorder * 0.8 * fm.at(t)).max(1.0);
        let (seg_gain, seg_harm) = seg_shape[seg];
        let amp = spec.fwave_amp_mv * seg_gain * (1.0 + disorder * 0.6 * am.at(t)) / norm;
        let decay = (spec.harmonic_decay * seg_harm).min(1.0);
        let mut s = theta.sin();
        for (h, walk) in phase_walk.iter().enumerate() {
            let order = (h + 2) as f64;
            // sawtooth sign pattern: alternating harmonics
            let sign = if h % 2 == 0 { -1.0 } else { 1.0 };
            s += sign * decay.powi(h as i32 + 1) * (order * theta + disorder * 1.5 * walk.at(t)).sin();
        }
        *v = amp * s;
        theta += std::f64::consts::TAU * f / fs;
    }

    // ventricular activity
    let mut rng_v = stream(spec.seed, 2);
    let mut beat_times = Vec::new();
    let mut t = rng_v.random_range(0.2..0.6);
    while t < spec.duration_s - 0.05 {
        beat_times.push(t);
        let z: f64 = rng_v.sample(StandardNormal);
        t += (spec.rr_mean_s * (1.0 + spec.rr_cv * z)).max(0.3);
    }
    let template = &TEMPLATES[spec.qrst_template_id as usize];
    let mut qrst = vec![0.0; n];
    let mut ectopic = Vec::with_capacity(beat_times.len());
    let mut beat_indices = Vec::with_capacity(beat_times.len());
    for (b, &tb) in beat_times.iter().enumerate() {
        let is_ectopic = spec.ectopic_beats.contains(&b);
        ectopic.push(is_ectopic);
        let gain = 1.0 + spec.qrst_amp_cv * rng_v.sample::<f64, _>(StandardNormal);
        let waves = if is_ectopic { &ECTOPIC } else { template };
        let lo = ((tb - 0.5) * fs).floor().max(0.0) as usize;
        let hi = (((tb + 0.7) * fs).ceil() as usize).min(n);
        for (i, q) in qrst.iter_mut().enumerate().take(hi).skip(lo) {
            let dt = i as f64 / fs - tb;
            *q += gain * waves.iter().map(|&(a, mu, sd)| a * (-(dt - mu).powi(2) / (2.0 * sd * sd)).exp()).sum::<f64>();
        }
        beat_indices.push(((tb * fs).round() as usize).min(n - 1));
    }

    // noise, powerline and baseline wander
    let mut rng_n = stream(spec.seed, 3);
    let pl_phase: f64 = rng_n.random_range(0.0..std::f64::consts::TAU);
    let bw_phase: f64 = rng_n.random_range(0.0..std::f64::consts::TAU);
    let samples: Vec<T> = (0..n)
        .map(|i| {
            let t = i as f64 / fs;
            let noise: f64 = if spec.noise_rms_mv > 0.0 {
                spec.noise_rms_mv * rng_n.sample::<f64, _>(StandardNormal)
            } else {
                0.0
            };
            let pl = spec.powerline_amp_mv * (std::f64::consts::TAU * spec.powerline_hz * t + pl_phase).sin();
            let bw = spec.baseline_wander_mv * (std::f64::consts::TAU * 0.3 * t + bw_phase).sin();
            T::lit(true_aa[i] + qrst[i] + noise + pl + bw)
        })
        .collect();

    let label = if spec.organization >= 0.5 { Label::SrMaintained } else { Label::AfRelapse };
    let record = EcgRecord {
        record_id: format!("synth_{:016x}", spec.seed),
        lead: "V1".into(),
        fs: T::lit(fs),
        samples,
        label,
    };
    let truth = SynthTruth {
        beat_times,
        beat_indices,
        ectopic,
        true_aa,
        qrst,
        true_daf_per_segment: daf,
        label,
    };
    Ok((record, truth))
}

/// Inclusive parameter range sampled uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl Range {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub const fn fixed(v: f64) -> Self {
        Self { lo: v, hi: v }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        if self.hi > self.lo {
            rng.random_range(self.lo..=self.hi)
        } else {
            self.lo
        }
    }

    fn overlaps(&self, other: &Range) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}

/// Per-class parameter ranges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassRanges {
    pub organization: Range,
    pub daf_jitter_hz: Range,
    pub daf_hz: Range,
    pub fwave_amp_mv: Range,
    pub rr_mean_s: Range,
    pub rr_cv: Range,
    pub noise_rms_mv: Range,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CohortRanges {
    pub organized: ClassRanges,
    pub disorganized: ClassRanges,
}

impl Default for CohortRanges {
    fn default() -> Self {
        let shared = ClassRanges {
            organization: Range::new(0.85, 1.0),
            daf_jitter_hz: Range::new(0.0, 0.2),
            daf_hz: Range::new(5.0, 7.0),
            fwave_amp_mv: Range::new(0.06, 0.15),
            rr_mean_s: Range::new(0.8, 1.1),
            rr_cv: Range::new(0.1, 0.25),
            noise_rms_mv: Range::new(0.005, 0.015),
        };
        Self {
            organized: shared,
            disorganized: ClassRanges {
                organization: Range::new(0.0, 0.3),
                daf_jitter_hz: Range::new(2.0, 3.0),
                ..shared
            },
        }
    }
}

impl CohortRanges {
    /// `true` when the classes cannot share an organization or jitter value.
    pub fn is_disjoint(&self) -> bool {
        !self.organized.organization.overlaps(&self.disorganized.organization)
            && !self.organized.daf_jitter_hz.overlaps(&self.disorganized.daf_jitter_hz)
    }

    fn validate(&self) -> Result<()> {
        for c in [&self.organized, &self.disorganized] {
            let all = [c.organization, c.daf_jitter_hz, c.daf_hz, c.fwave_amp_mv, c.rr_mean_s, c.rr_cv, c.noise_rms_mv];
            if all.iter().any(|r| !(r.lo <= r.hi)) {
                return Err(Error::InvalidSpec("range with lo > hi".into()));
            }
        }
        Ok(())
    }
}

/// One generated cohort member.
#[derive(Debug, Clone)]
pub struct CohortMember<T> {
    pub record: EcgRecord<T>,
    pub truth: SynthTruth,
    pub spec: SynthSpec,
}

/// `n_organized` SR-maintained records followed by `n_disorganized` AF-relapse
/// records, each drawn from its class ranges.
pub fn generate_cohort<T: Real>(
    n_organized: usize,
    n_disorganized: usize,
    ranges: &CohortRanges,
    seed: u64,
) -> Result<Vec<CohortMember<T>>> {
    if n_organized < 5 || n_disorganized < 5 {
        return Err(Error::InvalidSpec("each class needs at least 5 records".into()));
    }
    ranges.validate()?;
    let mut rng = stream(seed, 0xC0_4027);
    let classes = std::iter::repeat_n((Label::SrMaintained, &ranges.organized), n_organized)
        .chain(std::iter::repeat_n((Label::AfRelapse, &ranges.disorganized), n_disorganized));
    let specs: Vec<(Label, SynthSpec)> = classes
        .enumerate()
        .map(|(i, (label, r))| {
            let spec = SynthSpec {
                organization: r.organization.sample(&mut rng).clamp(0.0, 1.0),
                daf_jitter_hz: r.daf_jitter_hz.sample(&mut rng),
                daf_hz: r.daf_hz.sample(&mut rng).clamp(3.0, 9.0),
                fwave_amp_mv: r.fwave_amp_mv.sample(&mut rng),
                rr_mean_s: r.rr_mean_s.sample(&mut rng),
                rr_cv: r.rr_cv.sample(&mut rng),
                noise_rms_mv: r.noise_rms_mv.sample(&mut rng),
                qrst_template_id: rng.random_range(0..TEMPLATES.len() as u8),
                seed: crate::eval::split_seed(seed, i as u64 + 1),
                ..SynthSpec::default()
            };
            (label, spec)
        })
        .collect();
    specs
        .into_iter()
        .enumerate()
        .map(|(i, (label, spec))| {
            let (mut record, mut truth) = generate::<T>(&spec)?;
            record.record_id = format!("synth_{i:03}");
            record.label = label;
            truth.label = label;
            Ok(CohortMember { record, truth, spec })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_given_seed() {
        let spec = SynthSpec { seed: 42, noise_rms_mv: 0.02, organization: 0.3, daf_jitter_hz: 1.0, ..Default::default() };
        let (a, ta) = generate::<f64>(&spec).unwrap();
        let (b, tb) = generate::<f64>(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(ta, tb);
    }

    #[test]
    fn composite_is_sum_of_parts_without_noise() {
        let spec = SynthSpec { seed: 1, ..Default::default() };
        let (rec, truth) = generate::<f64>(&spec).unwrap();
        for i in (0..rec.samples.len()).step_by(97) {
            assert!((rec.samples[i] - truth.true_aa[i] - truth.qrst[i]).abs() < 1e-12);
        }
        assert!(truth.beat_times.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(truth.true_aa.len(), rec.samples.len());
    }

    #[test]
    fn snr_noise_level() {
        let spec = SynthSpec { seed: 5, ..Default::default() }.with_snr_db(20.0).unwrap();
        let (clean, _) = generate::<f64>(&SynthSpec { noise_rms_mv: 0.0, ..spec.clone() }).unwrap();
        let p = clean.samples.iter().map(|v| v * v).sum::<f64>() / clean.samples.len() as f64;
        assert!((spec.noise_rms_mv - (p / 100.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rejects_invalid_spec() {
        for spec in [
            SynthSpec { rr_mean_s: 0.3, ..Default::default() },
            SynthSpec { fwave_amp_mv: -1.0, ..Default::default() },
            SynthSpec { daf_hz: 12.0, ..Default::default() },
            SynthSpec { organization: 1.5, ..Default::default() },
        ] {
            assert!(matches!(generate::<f64>(&spec), Err(Error::InvalidSpec(_))));
        }
    }

    #[test]
    fn cohort_class_balance() {
        let cohort = generate_cohort::<f64>(30, 23, &CohortRanges::default(), 7).unwrap();
        assert_eq!(cohort.len(), 53);
        let sr = cohort.iter().filter(|m| m.record.label == Label::SrMaintained).count();
        assert_eq!(sr, 30);
        assert!((100.0 * sr as f64 / 53.0 - 56.60).abs() < 0.01);
        assert!((100.0f64 * 23.0 / 53.0 - 43.40).abs() < 0.01);
        assert!(CohortRanges::default().is_disjoint());
    }

    #[test]
    fn zero_width_ranges_share_parameters() {
        let fixed = ClassRanges {
            organization: Range::fixed(0.9),
            daf_jitter_hz: Range::fixed(0.1),
            daf_hz: Range::fixed(6.0),
            fwave_amp_mv: Range::fixed(0.1),
            rr_mean_s: Range::fixed(0.7),
            rr_cv: Range::fixed(0.1),
            noise_rms_mv: Range::fixed(0.01),
        };
        let ranges = CohortRanges { organized: fixed, disorganized: ClassRanges { organization: Range::fixed(0.1), ..fixed } };
        let cohort = generate_cohort::<f64>(5, 5, &ranges, 3).unwrap();
        assert_eq!(cohort.len(), 10);
        for class in cohort.chunks(5) {
            for m in class {
                let mut a = m.spec.clone();
                let mut b = class[0].spec.clone();
                a.seed = 0;
                b.seed = 0;
                a.qrst_template_id = 0;
                b.qrst_template_id = 0;
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn cohort_needs_five_per_class() {
        assert!(matches!(
            generate_cohort::<f64>(4, 5, &CohortRanges::default(), 1),
            Err(Error::InvalidSpec(_))
        ));
    }
}
