//! Band-selective SWT shrinkage of powerline interference.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::wavelet::{swt_decompose, WaveletDecomposition};

use super::ShrinkageSpec;

/// Detail scale whose nominal band contains `hz`.
pub fn containing_scale(hz: f64, fs: f64) -> Option<usize> {
    (1..=30).find(|&j| {
        let high = fs / f64::powi(2.0, j as i32);
        hz <= high && hz > high / 2.0
    })
}

pub(super) fn remove<T: Real>(signal: &[T], fs: T, spec: &ShrinkageSpec) -> Result<Vec<T>> {
    let fs_f = fs.as_f64();
    if spec.levels == 0 {
        return Err(Error::InvalidConfig("shrinkage levels must be at least 1".into()));
    }
    if !(spec.target_hz > 0.0 && spec.target_hz < fs_f / 2.0) {
        return Err(Error::UnsupportedRate(format!(
            "powerline {} Hz not below Nyquist at fs = {fs_f} Hz",
            spec.target_hz
        )));
    }
    let center = containing_scale(spec.target_hz, fs_f)
        .filter(|&j| j <= spec.levels)
        .ok_or_else(|| {
            Error::UnsupportedRate(format!(
                "{} levels at fs = {fs_f} Hz do not reach the {} Hz band",
                spec.levels, spec.target_hz
            ))
        })?;
    if signal.iter().all(|v| *v == T::zero()) {
        return Ok(signal.to_vec());
    }
    let mut dec = swt_decompose(signal, spec.levels, spec.mother_wavelet)?;
    let n = signal.len();
    let block = ((spec.block_s * fs_f).round() as usize).max(1);
    let omega = 2.0 * std::f64::consts::PI * spec.target_hz / fs_f;
    let lo = center.saturating_sub(1).max(1);
    let hi = (center + 1).min(spec.levels);
    for j in lo..=hi {
        shrink_level(&mut dec, j, n, block, omega, j == center);
    }
    dec.reconstruct()
}

fn shrink_level<T: Real>(
    dec: &mut WaveletDecomposition<T>,
    j: usize,
    n: usize,
    block: usize,
    omega: f64,
    threshold_residual: bool,
) {
    let coeffs = dec.full_detail_mut(j);
    // The stored period is the signal followed by its mirror image; the tone
    // phase flips at the junction, so each half is blocked separately.
    for half in [0..n, n..coeffs.len()] {
        for range in blocks(half, block) {
            let seg = &mut coeffs[range.clone()];
            let fitted = fit_tone(seg, range.start, omega);
            for (i, c) in seg.iter_mut().enumerate() {
                let t = (range.start + i) as f64;
                let tone = fitted.0 * (omega * t).cos() + fitted.1 * (omega * t).sin();
                *c = *c - T::lit(tone);
            }
            if threshold_residual {
                let lambda = mad_sigma(seg);
                for c in seg.iter_mut() {
                    *c = soft(*c, lambda);
                }
            }
        }
    }
}

fn blocks(range: std::ops::Range<usize>, block: usize) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = range.start;
    while start < range.end {
        let mut end = (start + block).min(range.end);
        // fold a short tail into the current block
        if range.end - end < block / 2 {
            end = range.end;
        }
        out.push(start..end);
        start = end;
    }
    out
}

/// Least-squares `(a, b)` of `a cos(ωt) + b sin(ωt)` over coefficients that are
/// not dominated by QRS energy.
fn fit_tone<T: Real>(seg: &[T], t0: usize, omega: f64) -> (f64, f64) {
    let mut mags: Vec<f64> = seg.iter().map(|c| c.as_f64().abs()).collect();
    let med = median_in_place(&mut mags);
    let cutoff = 3.0 * med;
    let (mut scc, mut sss, mut scs, mut syc, mut sys) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (i, c) in seg.iter().enumerate() {
        let y = c.as_f64();
        if y.abs() > cutoff {
            continue;
        }
        let t = (t0 + i) as f64;
        let (s, co) = (omega * t).sin_cos();
        scc += co * co;
        sss += s * s;
        scs += co * s;
        syc += y * co;
        sys += y * s;
    }
    let det = scc * sss - scs * scs;
    if det.abs() < 1e-12 {
        return (0.0, 0.0);
    }
    ((syc * sss - sys * scs) / det, (sys * scc - syc * scs) / det)
}

fn mad_sigma<T: Real>(seg: &[T]) -> T {
    let mut mags: Vec<f64> = seg.iter().map(|c| c.as_f64().abs()).collect();
    T::lit(median_in_place(&mut mags) / 0.6745)
}

fn soft<T: Real>(c: T, lambda: T) -> T {
    let m = c.abs() - lambda;
    if m > T::zero() {
        c.signum() * m
    } else {
        T::zero()
    }
}

fn median_in_place(v: &mut [f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    let mid = v.len() / 2;
    let (_, m, _) = v.select_nth_unstable_by(mid, |a, b| a.total_cmp(b));
    *m
}
