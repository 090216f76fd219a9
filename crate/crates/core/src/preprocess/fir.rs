//! Dolph–Chebyshev windowed-sinc FIR design and zero-phase FFT filtering.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::scalar::Real;

/// Dolph–Chebyshev window of length `m` with `atten_db` side-lobe attenuation,
/// normalized to unit peak.
pub fn chebwin(m: usize, atten_db: f64) -> Vec<f64> {
    if m == 0 {
        return Vec::new();
    }
    if m == 1 {
        return vec![1.0];
    }
    let order = (m - 1) as f64;
    let beta = ((10f64.powf(atten_db.abs() / 20.0)).acosh() / order).cosh();
    let sign_neg = if m % 2 == 1 { 1.0 } else { -1.0 };
    let mut p: Vec<Complex<f64>> = (0..m)
        .map(|k| {
            let x = beta * (std::f64::consts::PI * k as f64 / m as f64).cos();
            let v = if x > 1.0 {
                (order * x.acosh()).cosh()
            } else if x < -1.0 {
                sign_neg * (order * (-x).acosh()).cosh()
            } else {
                (order * x.acos()).cos()
            };
            Complex::new(v, 0.0)
        })
        .collect();
    if m.is_multiple_of(2) {
        for (k, c) in p.iter_mut().enumerate() {
            *c *= Complex::from_polar(1.0, std::f64::consts::PI / m as f64 * k as f64);
        }
    }
    FftPlanner::<f64>::new().plan_fft_forward(m).process(&mut p);
    let re: Vec<f64> = p.iter().map(|c| c.re).collect();
    let mut w = Vec::with_capacity(m);
    if m % 2 == 1 {
        let n = m.div_ceil(2);
        w.extend(re[1..n].iter().rev());
        w.extend_from_slice(&re[..n]);
    } else {
        let n = m / 2 + 1;
        w.extend(re[1..n].iter().rev());
        w.extend_from_slice(&re[1..n]);
    }
    let peak = w.iter().copied().fold(f64::MIN, f64::max);
    w.iter().map(|v| v / peak).collect()
}

/// Odd tap count giving roughly `transition_hz` between the −1 dB and −20 dB
/// points of the forward–backward response.
pub fn taps_for_transition(fs: f64, transition_hz: f64) -> usize {
    let n = (2.0 * fs / transition_hz).ceil() as usize;
    n | 1
}

/// Low-pass windowed-sinc taps with unit DC gain.
pub fn design_lowpass(n_taps: usize, cutoff_hz: f64, fs: f64, atten_db: f64) -> Vec<f64> {
    let w = chebwin(n_taps, atten_db);
    let fc = 2.0 * cutoff_hz / fs;
    let mid = (n_taps as f64 - 1.0) / 2.0;
    let mut h: Vec<f64> = (0..n_taps)
        .map(|i| {
            let t = i as f64 - mid;
            let sinc = if t == 0.0 {
                1.0
            } else {
                let a = std::f64::consts::PI * fc * t;
                a.sin() / a
            };
            fc * sinc * w[i]
        })
        .collect();
    let dc: f64 = h.iter().sum();
    h.iter_mut().for_each(|v| *v /= dc);
    h
}

/// High-pass by spectral inversion of the matching low-pass.
pub fn design_highpass(n_taps: usize, cutoff_hz: f64, fs: f64, atten_db: f64) -> Vec<f64> {
    let n_taps = n_taps | 1;
    let mut h = design_lowpass(n_taps, cutoff_hz, fs, atten_db);
    h.iter_mut().for_each(|v| *v = -*v);
    h[n_taps / 2] += 1.0;
    h
}

/// Full linear convolution of two sequences.
pub fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Mirror index for half-sample symmetric extension of any reach.
#[inline]
pub(crate) fn mirror_index(i: i64, n: usize) -> usize {
    let period = 2 * n as i64;
    let r = i.rem_euclid(period);
    if r < n as i64 {
        r as usize
    } else {
        (period - 1 - r) as usize
    }
}

/// Convolves `x` with the odd-length, symmetric `kernel` centered on each
/// sample, after symmetric extension by one kernel length. Uses FFT.
pub fn centered_convolve<T: Real>(x: &[T], kernel: &[T]) -> Vec<T> {
    let n = x.len();
    if n == 0 {
        return Vec::new();
    }
    let k = kernel.len();
    let half = k / 2;
    let ext = k;
    let total = n + 2 * ext;
    let fft_len = (total + k - 1).next_power_of_two();
    let mut planner = FftPlanner::<T>::new();
    let fwd = planner.plan_fft_forward(fft_len);
    let inv = planner.plan_fft_inverse(fft_len);

    let mut xs: Vec<Complex<T>> = (0..fft_len)
        .map(|i| {
            if i < total {
                Complex::new(x[mirror_index(i as i64 - ext as i64, n)], T::zero())
            } else {
                Complex::new(T::zero(), T::zero())
            }
        })
        .collect();
    let mut ks: Vec<Complex<T>> = (0..fft_len)
        .map(|i| Complex::new(if i < k { kernel[i] } else { T::zero() }, T::zero()))
        .collect();
    fwd.process(&mut xs);
    fwd.process(&mut ks);
    for (a, b) in xs.iter_mut().zip(&ks) {
        *a = *a * *b;
    }
    inv.process(&mut xs);
    let scale = T::one() / T::from_usize_lossy(fft_len);
    (0..n).map(|i| xs[i + ext + half].re * scale).collect()
}
