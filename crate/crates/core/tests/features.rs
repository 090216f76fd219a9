mod common;

use afrecur::beat::RPeakList;
use afrecur::features::entropy::sample_entropy_relative;
use afrecur::features::{
    dominant_frequency, extract_all, fwp, match_counts, rwe_series, rwe_stats, sample_entropy, swen_series, swenv,
    EntropyParams, FeatureConfig, MatchCounts, WaveletConfig, WelchConfig, RWE_SCALES,
};
use afrecur::synth::{generate, generate_cohort, CohortRanges, SynthSpec};
use afrecur::{EcgRecord, Error, Label, SegmentPlan, Stage};
use common::{sine, FS};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Exhaustive pair counting over the first n - m templates.
fn brute_counts(x: &[f64], m: usize, r: f64) -> MatchCounts {
    let n = x.len();
    let (mut a, mut b) = (0, 0);
    for i in 0..n - m {
        for j in i + 1..n - m {
            if (0..m).all(|k| (x[i + k] - x[j + k]).abs() <= r) {
                b += 1;
                if (x[i + m] - x[j + m]).abs() <= r {
                    a += 1;
                }
            }
        }
    }
    MatchCounts { a, b }
}

fn brute_sampen(x: &[f64], m: usize, r: f64) -> f64 {
    let c = brute_counts(x, m, r);
    if c.a == 0 || c.b == 0 {
        let n = x.len();
        -(2.0 / ((n - m - 1) * (n - m)) as f64).ln()
    } else {
        -(c.a as f64 / c.b as f64).ln()
    }
}

fn sd_pop(x: &[f64]) -> f64 {
    let mu = x.iter().sum::<f64>() / x.len() as f64;
    (x.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / x.len() as f64).sqrt()
}

fn stats7(aa: &[f64]) -> (f64, f64) {
    let rwe = rwe_series(aa, FS, &SegmentPlan::default(), &WaveletConfig::default()).unwrap();
    let s = rwe_stats(&rwe, &RWE_SCALES);
    (s[1].mean, s[1].std)
}

#[test]
fn stationary_fwave_has_low_rwe_spread() {
    let spec = SynthSpec { seed: 3, organization: 1.0, daf_jitter_hz: 0.0, ..Default::default() };
    let (_, truth) = generate::<f64>(&spec).unwrap();
    let (_, s7) = stats7(&truth.true_aa);
    assert!(s7 < 0.05, "rwes7 {s7}");
}

#[test]
fn repeated_segment_has_zero_spread() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let seg: Vec<f64> = (0..800).map(|_| rng.random_range(-1.0..1.0)).collect();
    let aa: Vec<f64> = seg.iter().cycle().take(20_000).copied().collect();
    let rwe = rwe_series(&aa, FS, &SegmentPlan::default(), &WaveletConfig::default()).unwrap();
    assert!(rwe_stats(&rwe, &RWE_SCALES).iter().all(|s| s.std == 0.0));
    let sw = swen_series(&rwe);
    assert_eq!(sw.len(), 25);
    assert!(sw.iter().all(|&v| v == sw[0]));
    assert!(swenv(&sw, EntropyParams::SWENV).unwrap().degenerate);
}

#[test]
fn white_noise_and_tone_wavelet_entropy() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let noise: Vec<f64> = (0..20_000).map(|_| rng.random_range(-1.0..1.0)).collect();
    let rwe = rwe_series(&noise, FS, &SegmentPlan::default(), &WaveletConfig::default()).unwrap();
    for v in swen_series(&rwe) {
        assert!((v / 8f64.ln() - 1.0).abs() < 0.1, "SWEn {v}");
    }
    let tone = sine(6.0, 1.0, 20_000);
    let rwe = rwe_series(&tone, FS, &SegmentPlan::default(), &WaveletConfig::default()).unwrap();
    assert!(swen_series(&rwe).iter().all(|&v| v < 1.0));
}

#[test]
fn sample_entropy_reference_series() {
    let x = [1.0, 2.0, 1.0, 2.0, 1.0, 2.0, 1.0, 2.0];
    assert_eq!(match_counts(&x, 1, 0.1).unwrap(), brute_counts(&x, 1, 0.1));
    assert_eq!(sample_entropy(&x, 1, 0.1).unwrap(), brute_sampen(&x, 1, 0.1));
    assert_eq!(sample_entropy(&[3.0; 30], 2, 0.2).unwrap(), 0.0);
}

#[test]
fn uniform_noise_sample_entropy_matches_oracle() {
    for seed in 0..100 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..1000).map(|_| rng.random::<f64>()).collect();
        let r = 0.2 * sd_pop(&x);
        let got = sample_entropy(&x, 2, r).unwrap();
        assert!((got - brute_sampen(&x, 2, r)).abs() <= 0.05);
        assert_eq!(match_counts(&x, 2, r).unwrap(), brute_counts(&x, 2, r));
    }
}

#[test]
fn swenv_on_alternating_series() {
    let s: Vec<f64> = (0..25).map(|i| if i % 2 == 0 { 1.2 } else { 1.5 }).collect();
    let r = 0.15 * sd_pop(&s);
    let mean = s.iter().sum::<f64>() / 25.0;
    let oracle = brute_sampen(&s, 1, r) + (2.0 * r).ln() - mean.ln();
    let got = swenv(&s, EntropyParams::SWENV).unwrap();
    assert!(!got.degenerate);
    assert!((got.value - oracle).abs() < 1e-12);
}

#[test]
fn daf_examples() {
    let cfg = WelchConfig::default();
    assert!((dominant_frequency(&sine(6.0, 1.0, 20_000), FS, &cfg).unwrap() - 6.0).abs() <= 0.13);
    let two: Vec<f64> = sine(6.0, 1.0, 20_000).iter().zip(sine(15.0, 2.0, 20_000)).map(|(a, b)| a + b).collect();
    assert!((dominant_frequency(&two, FS, &cfg).unwrap() - 6.0).abs() <= 0.13);
    let spec = SynthSpec { seed: 4, daf_hz: 7.3, organization: 1.0, fwave_harmonics: 2, ..Default::default() };
    let (_, truth) = generate::<f64>(&spec).unwrap();
    assert!((dominant_frequency(&truth.true_aa, FS, &cfg).unwrap() - 7.3).abs() <= 0.13);
    assert!(matches!(dominant_frequency(&vec![0.0; 4000], FS, &cfg), Err(Error::TooShort { .. })));
}

#[test]
fn generator_daf_ground_truth() {
    for seed in 0..6 {
        let spec = SynthSpec { seed, daf_hz: 3.5 + seed as f64, daf_jitter_hz: 0.0, ..Default::default() };
        let (_, truth) = generate::<f64>(&spec).unwrap();
        let expected = truth.true_daf_per_segment.iter().sum::<f64>() / truth.true_daf_per_segment.len() as f64;
        let got = dominant_frequency(&truth.true_aa, FS, &WelchConfig::default()).unwrap();
        assert!((got - expected).abs() <= 0.15, "{got} vs {expected}");
    }
}

#[test]
fn fwp_examples() {
    let peaks = RPeakList { indices: vec![100, 900, 1700], fs: FS };
    let mut ecg = vec![0.0; 2000];
    for (&i, r) in peaks.indices.iter().zip([1.0, -1.2, 0.8]) {
        ecg[i] = r;
    }
    assert_eq!(fwp(&[0.0; 2000], &ecg, &peaks).unwrap(), 0.0);
    // whole periods of a 5 Hz tone in 2 s
    let a = 0.07;
    let aa = sine(5.0, a, 2000);
    let expect = 100.0 * a / (2f64.sqrt() * 1.0);
    assert!((fwp(&aa, &ecg, &peaks).unwrap() - expect).abs() < 1e-9);
    assert!(matches!(fwp(&aa, &[0.0; 2000], &peaks), Err(Error::ZeroRPeak)));
}

#[test]
fn failing_record_yields_no_vector() {
    let rec = EcgRecord::new("short", FS, vec![0.0; 5000]).with_label(Label::AfRelapse);
    let err = extract_all(&rec, &FeatureConfig::default()).unwrap_err();
    assert_eq!(err.stage(), Some(Stage::Validate));
}

#[test]
fn pipeline_is_deterministic_and_within_ranges() {
    let spec = SynthSpec { seed: 17, organization: 0.4, daf_jitter_hz: 1.0, noise_rms_mv: 0.01, ..Default::default() };
    let (rec, _) = generate::<f64>(&spec).unwrap();
    let a = extract_all(&rec, &FeatureConfig::default()).unwrap();
    let b = extract_all(&rec, &FeatureConfig::default()).unwrap();
    assert_eq!(a, b);
    for v in [a.rwem6, a.rwem7, a.rwem8] {
        assert!((0.0..=1.0).contains(&v));
    }
    for v in [a.rwes6, a.rwes7, a.rwes8] {
        assert!((0.0..=0.5).contains(&v));
    }
    assert!((3.0..=9.0).contains(&a.daf));
    assert!(a.sampen >= 0.0 && a.fwp >= 0.0);
    assert!(a.values().iter().all(|v| v.is_finite()));
}

#[test]
fn organized_and_disorganized_extremes_in_cohort() {
    let cfg = FeatureConfig::default();
    let cohort = generate_cohort::<f64>(10, 10, &CohortRanges::default(), 21).unwrap();
    let feats: Vec<_> = cohort.iter().map(|m| extract_all(&m.record, &cfg).unwrap()).collect();
    let median = |f: fn(&afrecur::FeatureVector<f64>) -> f64| {
        let mut v: Vec<f64> = feats.iter().map(f).collect();
        v.sort_by(f64::total_cmp);
        (v[9] + v[10]) / 2.0
    };
    let (m_rwes7, m_swenv) = (median(|f| f.rwes7), median(|f| f.swenv));

    let base = SynthSpec { fwave_amp_mv: 0.1, rr_mean_s: 0.95, noise_rms_mv: 0.01, ..Default::default() };
    let organized = SynthSpec { seed: 901, organization: 1.0, daf_jitter_hz: 0.0, ..base.clone() };
    let disorganized = SynthSpec { seed: 902, organization: 0.0, daf_jitter_hz: 3.0, ..base };
    let o = extract_all(&generate::<f64>(&organized).unwrap().0, &cfg).unwrap();
    let d = extract_all(&generate::<f64>(&disorganized).unwrap().0, &cfg).unwrap();
    assert!(o.rwes7 < m_rwes7 && o.swenv < m_swenv, "organized {} {}", o.rwes7, o.swenv);
    assert!(d.rwes7 > m_rwes7 && d.swenv > m_swenv, "disorganized {} {}", d.rwes7, d.swenv);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn counts_match_exhaustive_oracle(x in prop::collection::vec(-1.0f64..1.0, 3..200), m in 1usize..4, rf in 0.05f64..0.5) {
        prop_assume!(x.len() > m + 1);
        let r = rf * (sd_pop(&x) + 1e-3);
        prop_assert_eq!(match_counts(&x, m, r).unwrap(), brute_counts(&x, m, r));
    }

    #[test]
    fn quantized_series_with_ties(x in prop::collection::vec(0u8..4, 5..120), m in 1usize..3) {
        let x: Vec<f64> = x.into_iter().map(f64::from).collect();
        prop_assert_eq!(match_counts(&x, m, 1.0).unwrap(), brute_counts(&x, m, 1.0));
    }

    #[test]
    fn relative_sampen_is_affine_invariant(x in prop::collection::vec(0.5f64..2.0, 25), k in prop_oneof![Just(0.5f64), Just(2.0f64)], c in -1.0f64..1.0) {
        prop_assume!(sd_pop(&x) > 1e-3);
        let y: Vec<f64> = x.iter().map(|v| k * v + c).collect();
        let a = sample_entropy_relative(&x, EntropyParams::SWENV).unwrap();
        let b = sample_entropy_relative(&y, EntropyParams::SWENV).unwrap();
        let oracle = brute_sampen(&x, 1, 0.15 * sd_pop(&x));
        prop_assert!((a - oracle).abs() < 1e-12);
        // k = 0.5 and 2 scale exactly in binary, so the counts are identical
        prop_assert_eq!(a, b);
    }

    #[test]
    fn daf_ignores_gain_and_offset(f in 3.0f64..9.0, k in 0.01f64..100.0, dc in -5.0f64..5.0) {
        let cfg = WelchConfig::default();
        let x = sine(f, 1.0, 20_000);
        let y: Vec<f64> = x.iter().map(|v| k * v + dc).collect();
        let (a, b) = (dominant_frequency(&x, FS, &cfg).unwrap(), dominant_frequency(&y, FS, &cfg).unwrap());
        prop_assert_eq!(a, b);
        prop_assert!((a - f).abs() <= 0.13);
    }

    #[test]
    fn fwp_ignores_joint_scaling(k in prop_oneof![0.001f64..0.5, 2.0f64..1000.0], seed in 0u64..100) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ecg: Vec<f64> = (0..3000).map(|_| rng.random_range(-1.0..1.0)).collect();
        let aa: Vec<f64> = (0..3000).map(|_| rng.random_range(-0.1..0.1)).collect();
        let peaks = RPeakList { indices: vec![200, 1100, 2500], fs: FS };
        let (ks, ka): (Vec<f64>, Vec<f64>) = (ecg.iter().map(|v| k * v).collect(), aa.iter().map(|v| k * v).collect());
        let (a, b) = (fwp(&aa, &ecg, &peaks).unwrap(), fwp(&ka, &ks, &peaks).unwrap());
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
    }

    #[test]
    fn rwe_stat_ranges(seed in 0u64..1000, org in 0.0f64..1.0) {
        let spec = SynthSpec { seed, organization: org, daf_jitter_hz: 2.0 * (1.0 - org), ..Default::default() };
        let (_, truth) = generate::<f64>(&spec).unwrap();
        let rwe = rwe_series(&truth.true_aa, FS, &SegmentPlan::default(), &WaveletConfig::default()).unwrap();
        for s in rwe_stats(&rwe, &RWE_SCALES) {
            prop_assert!((0.0..=1.0).contains(&s.mean));
            prop_assert!((0.0..=0.5).contains(&s.std));
        }
        for v in swen_series(&rwe) {
            prop_assert!((0.0..=8f64.ln() + 1e-12).contains(&v));
        }
    }
}
