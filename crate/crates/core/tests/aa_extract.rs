mod common;

use afrecur::aa::{
    build_template, correlation, extract_aa, least_squares_scale, principal_direction, select_similar_qrst,
    CancellationConfig, QrstWindow,
};
use afrecur::beat::RPeakList;
use afrecur::synth::{generate, SynthSpec};
use afrecur::Error;
use common::{rms, FS};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn peaks(indices: Vec<usize>) -> RPeakList {
    RPeakList { indices, fs: FS }
}

fn window(samples: Vec<f64>) -> QrstWindow<f64> {
    let n = samples.len();
    QrstWindow { beat: 0, center: 0, start: 0, samples, valid: 0..n }
}

#[test]
fn zero_atrial_component_is_cancelled() {
    for seed in [1u64, 2, 3, 4] {
        let spec = SynthSpec { seed, fwave_amp_mv: 0.0, qrst_template_id: (seed % 3) as u8, ..Default::default() };
        let (rec, truth) = generate::<f64>(&spec).unwrap();
        let aa = extract_aa(&rec.samples, FS, &peaks(truth.beat_indices.clone()), &CancellationConfig::default()).unwrap();
        assert_eq!(aa.samples.len(), rec.samples.len());
        let ratio = rms(&aa.samples) / rms(&truth.qrst);
        assert!(ratio < 0.10, "seed {seed}: residual {ratio:.4}");
    }
}

#[test]
fn five_beats_are_too_few() {
    let spec = SynthSpec { seed: 8, duration_s: 4.0, ..Default::default() };
    let (rec, truth) = generate::<f64>(&spec).unwrap();
    let five = peaks(truth.beat_indices[..5].to_vec());
    let r = extract_aa(&rec.samples, FS, &five, &CancellationConfig::default());
    assert!(matches!(r, Err(Error::TooFewBeats { needed: 11, actual: 5 })));
}

#[test]
fn samples_outside_windows_are_untouched() {
    let spec = SynthSpec { seed: 12, rr_mean_s: 0.9, rr_cv: 0.1, noise_rms_mv: 0.01, ..Default::default() };
    let (rec, truth) = generate::<f64>(&spec).unwrap();
    let aa = extract_aa(&rec.samples, FS, &peaks(truth.beat_indices.clone()), &CancellationConfig::default()).unwrap();
    let covered = |i: usize| truth.beat_indices.iter().any(|&b| i + 100 >= b && i < b + 450);
    for (i, (a, x)) in aa.samples.iter().zip(&rec.samples).enumerate() {
        if !covered(i) {
            assert_eq!(a.to_bits(), x.to_bits(), "sample {i} changed");
        }
    }
}

/// Indices (into the beat list) of the k windows most similar to each beat.
fn similarity_sets(signal: &[f64], beats: &[usize], k: usize) -> Vec<Vec<usize>> {
    let windows: Vec<QrstWindow<f64>> =
        beats.iter().enumerate().map(|(b, &c)| QrstWindow::extract(signal, b, c, 100, 450)).collect();
    (0..beats.len())
        .map(|b| {
            let ids: Vec<usize> = (0..beats.len()).filter(|&c| c != b && windows[c].is_complete()).collect();
            let cands: Vec<_> = ids.iter().map(|&c| windows[c].clone()).collect();
            select_similar_qrst(&windows[b], &cands, k).unwrap().iter().map(|s| ids[s.index]).collect()
        })
        .collect()
}

#[test]
fn cancellation_is_local() {
    // windows never overlap at this rate, so each beat owns its whole window
    let spec = SynthSpec { seed: 5, rr_mean_s: 0.9, rr_cv: 0.05, noise_rms_mv: 0.01, ..Default::default() };
    let (rec, truth) = generate::<f64>(&spec).unwrap();
    let beats = truth.beat_indices.clone();
    let cfg = CancellationConfig::default();
    let base = extract_aa(&rec.samples, FS, &peaks(beats.clone()), &cfg).unwrap();
    for i in [3usize, 9, 15] {
        let mut x = rec.samples.clone();
        for v in &mut x[beats[i] - 100..beats[i] + 450] {
            *v *= 1.07;
        }
        let moved = extract_aa(&x, FS, &peaks(beats.clone()), &cfg).unwrap();
        let before = similarity_sets(&rec.samples, &beats, cfg.k_similar);
        let after = similarity_sets(&x, &beats, cfg.k_similar);
        for (j, &b) in beats.iter().enumerate() {
            if j == i || before[j].contains(&i) || after[j].contains(&i) {
                continue;
            }
            let lo = b.saturating_sub(100);
            let hi = (b + 450).min(x.len());
            assert_eq!(base.samples[lo..hi], moved.samples[lo..hi], "beat {j} changed after editing beat {i}");
        }
    }
}

#[test]
fn matching_window_ranked_first() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let target: Vec<f64> = (0..120).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut cands: Vec<QrstWindow<f64>> = Vec::new();
    for _ in 0..9 {
        // Gram-Schmidt against the target: orthogonal noise
        let mut v: Vec<f64> = (0..120).map(|_| rng.random_range(-1.0..1.0)).collect();
        let p = v.iter().zip(&target).map(|(a, b)| a * b).sum::<f64>() / target.iter().map(|a| a * a).sum::<f64>();
        v.iter_mut().zip(&target).for_each(|(a, b)| *a -= p * b);
        cands.push(window(v));
    }
    cands.insert(6, window(target.clone()));
    let sel = select_similar_qrst(&window(target.clone()), &cands, 10).unwrap();
    assert_eq!(sel[0].index, 6);
    assert!((sel[0].correlation - 1.0).abs() < 1e-12);
    for s in &sel[1..] {
        // oracle: plain cosine similarity
        let c = &cands[s.index].samples;
        let cos = c.iter().zip(&target).map(|(a, b)| a * b).sum::<f64>()
            / (c.iter().map(|a| a * a).sum::<f64>() * target.iter().map(|a| a * a).sum::<f64>()).sqrt();
        assert!((s.correlation - cos).abs() < 1e-12);
        assert!(s.correlation.abs() < 1e-12);
    }
}

#[test]
fn template_matches_svd_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..20 {
        let l = rng.random_range(20..200);
        let rows: Vec<Vec<f64>> = (0..10).map(|_| (0..l).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        let dir = principal_direction(&refs).unwrap();
        let m = DMatrix::from_fn(10, l, |i, j| rows[i][j]);
        let svd = m.svd(false, true);
        let k = svd.singular_values.imax();
        let v = svd.v_t.unwrap().row(k).transpose();
        let sign = if dir.iter().zip(v.iter()).map(|(a, b)| a * b).sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
        let dev = dir.iter().zip(v.iter()).map(|(a, b)| (a - sign * b).abs()).fold(0.0, f64::max);
        assert!(dev < 1e-8, "deviation {dev}");

        let target: Vec<f64> = (0..l).map(|_| rng.random_range(-1.0..1.0)).collect();
        let t = build_template(&refs, &target).unwrap();
        let alpha = least_squares_scale(&target, &dir, 0..l);
        let closed = target.iter().zip(&dir).map(|(a, b)| a * b).sum::<f64>() / dir.iter().map(|b| b * b).sum::<f64>();
        assert!((alpha - closed).abs() < 1e-12);
        assert!(t.iter().zip(&dir).all(|(a, b)| (a - alpha * b).abs() < 1e-12));
    }
}

#[test]
fn sign_flip_resolved_by_fit() {
    let w: Vec<f64> = (0..80).map(|i| (i as f64 * 0.17).sin() * (-(i as f64 - 40.0).powi(2) / 200.0).exp()).collect();
    let neg: Vec<f64> = w.iter().map(|v| -v).collect();
    let t = build_template(&[&w, &neg], &w).unwrap();
    assert!(t.iter().zip(&w).all(|(a, b)| (a - b).abs() < 1e-12));
    assert!(matches!(build_template(&[&[0.0; 5][..], &[0.0; 5][..]], &[1.0; 5]), Err(Error::DegenerateSet)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn least_squares_scale_is_optimal(
        target in prop::collection::vec(-2.0f64..2.0, 30),
        dir in prop::collection::vec(-2.0f64..2.0, 30),
        eps in -0.1f64..0.1,
    ) {
        prop_assume!(dir.iter().map(|v| v * v).sum::<f64>() > 1e-3);
        let a = least_squares_scale(&target, &dir, 0..30);
        let cost = |s: f64| target.iter().zip(&dir).map(|(t, d)| (t - s * d).powi(2)).sum::<f64>();
        prop_assert!(cost(a) <= cost(a + eps) + 1e-12);
    }

    #[test]
    fn correlation_is_bounded(a in prop::collection::vec(-1.0f64..1.0, 40), b in prop::collection::vec(-1.0f64..1.0, 40)) {
        let c = correlation(&window(a), &window(b));
        prop_assert!(c.abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn output_length_and_finiteness(seed in 0u64..500) {
        let spec = SynthSpec { seed, duration_s: 12.0, noise_rms_mv: 0.02, organization: 0.3, ..Default::default() };
        let (rec, truth) = generate::<f64>(&spec).unwrap();
        prop_assume!(truth.beat_indices.len() >= 11);
        let aa = extract_aa(&rec.samples, FS, &peaks(truth.beat_indices), &CancellationConfig::default()).unwrap();
        prop_assert_eq!(aa.samples.len(), rec.samples.len());
        prop_assert!(aa.samples.iter().all(|v| v.is_finite()));
    }
}
