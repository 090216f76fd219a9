//! Stationary (undecimated, à-trous) wavelet transform, relative wavelet
//! energy and stationary wavelet entropy.
//!
//! Boundaries use half-sample symmetric extension: a length-`n` input is
//! mirrored into a `2n` period `[x, reverse(x)]` and filtered circularly,
//! which equals infinite mirror extension at every level. The public detail
//! series are the first `n` coefficients of each level, time-aligned with the
//! input; the mirrored half is kept so that [`WaveletDecomposition::reconstruct`]
//! is exact.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Mother wavelet. Only orthogonal Daubechies filters are provided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Wavelet {
    /// Daubechies with the given number of vanishing moments (1, 2, 4 or 6).
    Daubechies(u8),
}

impl Default for Wavelet {
    fn default() -> Self {
        Wavelet::Daubechies(6)
    }
}

impl std::fmt::Display for Wavelet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Wavelet::Daubechies(n) => write!(f, "db{n}"),
        }
    }
}

impl std::str::FromStr for Wavelet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let w = s
            .strip_prefix("db")
            .and_then(|n| n.parse::<u8>().ok())
            .map(Wavelet::Daubechies)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown wavelet '{s}'")))?;
        w.scaling_filter()?;
        Ok(w)
    }
}

impl TryFrom<String> for Wavelet {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Wavelet> for String {
    fn from(w: Wavelet) -> Self {
        w.to_string()
    }
}

const DB1: [f64; 2] = [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2];

const DB2: [f64; 4] = [
    0.48296291314469025,
    0.836516303737469,
    0.22414386804185735,
    -0.12940952255092145,
];

const DB4: [f64; 8] = [
    0.23037781330885523,
    0.7148465705525415,
    0.6308807679295904,
    -0.02798376941698385,
    -0.18703481171888114,
    0.030841381835986965,
    0.032883011666982945,
    -0.010597401784997278,
];

const DB6: [f64; 12] = [
    0.11154074335008017,
    0.4946238903983854,
    0.7511339080215775,
    0.3152503517092432,
    -0.22626469396516913,
    -0.12976686756709563,
    0.09750160558707936,
    0.02752286553001629,
    -0.031582039318031156,
    0.0005538422009938016,
    0.004777257511010651,
    -0.00107730108499558,
];

impl Wavelet {
    /// Scaling (low-pass) filter, normalized to unit energy.
    pub fn scaling_filter(&self) -> Result<&'static [f64]> {
        match self {
            Wavelet::Daubechies(1) => Ok(&DB1),
            Wavelet::Daubechies(2) => Ok(&DB2),
            Wavelet::Daubechies(4) => Ok(&DB4),
            Wavelet::Daubechies(6) => Ok(&DB6),
            Wavelet::Daubechies(n) => Err(Error::InvalidConfig(format!("unsupported wavelet db{n}"))),
        }
    }
}

/// Analysis filter pair with the tap offsets used for time alignment.
#[derive(Debug, Clone)]
pub struct FilterBank<T> {
    pub lo: Vec<T>,
    pub hi: Vec<T>,
    lo_center: usize,
    hi_center: usize,
}

impl<T: Real> FilterBank<T> {
    pub fn new(wavelet: Wavelet) -> Result<Self> {
        let h = wavelet.scaling_filter()?;
        let len = h.len();
        let lo: Vec<T> = h.iter().map(|&v| T::lit(v)).collect();
        // Quadrature mirror: g[k] = (-1)^k h[L-1-k]
        let hi: Vec<T> = (0..len)
            .map(|k| {
                let v = h[len - 1 - k];
                T::lit(if k % 2 == 0 { v } else { -v })
            })
            .collect();
        Ok(Self { lo_center: energy_centroid(h), hi_center: len - 1 - energy_centroid(h), lo, hi })
    }

    pub fn len(&self) -> usize {
        self.lo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lo.is_empty()
    }

    /// Tap index aligned with the output sample (low-pass, high-pass).
    pub fn centers(&self) -> (usize, usize) {
        (self.lo_center, self.hi_center)
    }
}

fn energy_centroid(h: &[f64]) -> usize {
    let e: f64 = h.iter().map(|v| v * v).sum();
    let c: f64 = h.iter().enumerate().map(|(k, v)| k as f64 * v * v).sum::<f64>() / e;
    c.round() as usize
}

/// Per-scale SWT detail coefficients plus the final approximation.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletDecomposition<T> {
    wavelet: Wavelet,
    len: usize,
    // Each series spans one full extension period; the first `len` entries are public.
    details: Vec<Vec<T>>,
    approx: Vec<T>,
}

impl<T: Real> WaveletDecomposition<T> {
    /// Builds a decomposition from explicit coefficient series of equal length.
    pub fn from_parts(wavelet: Wavelet, details: Vec<Vec<T>>, approx: Vec<T>) -> Result<Self> {
        let len = approx.len();
        if details.is_empty() || details.iter().any(|d| d.len() != len) {
            return Err(Error::InvalidConfig(
                "detail series must be non-empty and match the approximation length".into(),
            ));
        }
        Ok(Self { wavelet, len, details, approx })
    }

    pub fn levels(&self) -> usize {
        self.details.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn wavelet(&self) -> Wavelet {
        self.wavelet
    }

    /// Detail series of scale `j` (1-based), same length as the input.
    pub fn detail(&self, j: usize) -> &[T] {
        &self.details[j - 1][..self.len]
    }

    pub fn details(&self) -> impl Iterator<Item = &[T]> {
        self.details.iter().map(move |d| &d[..self.len])
    }

    pub fn approx(&self) -> &[T] {
        &self.approx[..self.len]
    }

    /// Applies `f` to every stored coefficient of scale `j`, including the
    /// mirrored extension, so that reconstruction stays consistent.
    pub fn map_detail(&mut self, j: usize, mut f: impl FnMut(T) -> T) {
        for c in self.details[j - 1].iter_mut() {
            *c = f(*c);
        }
    }

    /// Every stored coefficient of scale `j`: the signal half followed by its mirror.
    pub(crate) fn full_detail_mut(&mut self, j: usize) -> &mut [T] {
        &mut self.details[j - 1]
    }

    /// Inverse transform.
    pub fn reconstruct(&self) -> Result<Vec<T>> {
        let bank = FilterBank::<T>::new(self.wavelet)?;
        let period = self.approx.len();
        let half = T::lit(0.5);
        let mut a = self.approx.clone();
        let mut next = vec![T::zero(); period];
        for j in (1..=self.levels()).rev() {
            let step = 1usize << (j - 1);
            let lo_off = adjoint_offsets(bank.lo.len(), bank.lo_center, step, period);
            let hi_off = adjoint_offsets(bank.hi.len(), bank.hi_center, step, period);
            let d = &self.details[j - 1];
            for (m, out) in next.iter_mut().enumerate() {
                let mut acc = T::zero();
                for (k, &off) in lo_off.iter().enumerate() {
                    acc = acc + bank.lo[k] * a[wrap(m + off, period)];
                }
                for (k, &off) in hi_off.iter().enumerate() {
                    acc = acc + bank.hi[k] * d[wrap(m + off, period)];
                }
                *out = acc * half;
            }
            std::mem::swap(&mut a, &mut next);
        }
        a.truncate(self.len);
        Ok(a)
    }
}

#[inline]
fn wrap(i: usize, period: usize) -> usize {
    if i >= period {
        i - period
    } else {
        i
    }
}

/// Offsets (mod period) of `x[n + (k - center) * step]`.
fn analysis_offsets(len: usize, center: usize, step: usize, period: usize) -> Vec<usize> {
    (0..len)
        .map(|k| ((k as i64 - center as i64) * step as i64).rem_euclid(period as i64) as usize)
        .collect()
}

/// Offsets (mod period) of `x[m - (k - center) * step]`.
fn adjoint_offsets(len: usize, center: usize, step: usize, period: usize) -> Vec<usize> {
    (0..len)
        .map(|k| (-(k as i64 - center as i64) * step as i64).rem_euclid(period as i64) as usize)
        .collect()
}

/// Undecimated decomposition of `segment` into `levels` detail scales.
pub fn swt_decompose<T: Real>(segment: &[T], levels: usize, wavelet: Wavelet) -> Result<WaveletDecomposition<T>> {
    let bank = FilterBank::<T>::new(wavelet)?;
    if segment.len() < bank.len() {
        return Err(Error::TooShort { needed: bank.len(), actual: segment.len() });
    }
    if levels == 0 {
        return Err(Error::InvalidConfig("levels must be at least 1".into()));
    }
    let n = segment.len();
    let period = 2 * n;
    let mut a: Vec<T> = segment.iter().chain(segment.iter().rev()).copied().collect();
    let mut details = Vec::with_capacity(levels);
    for j in 1..=levels {
        let step = 1usize << (j - 1);
        let lo_off = analysis_offsets(bank.lo.len(), bank.lo_center, step, period);
        let hi_off = analysis_offsets(bank.hi.len(), bank.hi_center, step, period);
        let mut next = vec![T::zero(); period];
        let mut d = vec![T::zero(); period];
        for n_i in 0..period {
            let mut acc_lo = T::zero();
            for (k, &off) in lo_off.iter().enumerate() {
                acc_lo = acc_lo + bank.lo[k] * a[wrap(n_i + off, period)];
            }
            let mut acc_hi = T::zero();
            for (k, &off) in hi_off.iter().enumerate() {
                acc_hi = acc_hi + bank.hi[k] * a[wrap(n_i + off, period)];
            }
            next[n_i] = acc_lo;
            d[n_i] = acc_hi;
        }
        details.push(d);
        a = next;
    }
    Ok(WaveletDecomposition { wavelet, len: n, details, approx: a })
}

/// Frequency band `[low, high]` (Hz) nominally covered by detail scale `j`.
pub fn scale_band(j: usize, fs: f64) -> (f64, f64) {
    let high = fs / f64::powi(2.0, j as i32);
    (high / 2.0, high)
}

/// Fraction of total detail energy per scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RweVector<T> {
    pub rwe: Vec<T>,
}

impl<T: Real> RweVector<T> {
    /// Value at scale `j` (1-based).
    pub fn scale(&self, j: usize) -> T {
        self.rwe[j - 1]
    }
}

/// Relative wavelet energy over detail scales 1..N; the approximation is excluded.
pub fn relative_wavelet_energy<T: Real>(dec: &WaveletDecomposition<T>) -> Result<RweVector<T>> {
    let energies: Vec<T> = dec.details().map(|d| d.iter().map(|&c| c * c).sum()).collect();
    let total: T = energies.iter().copied().sum();
    if !(total > T::zero()) {
        return Err(Error::ZeroEnergy);
    }
    Ok(RweVector { rwe: energies.into_iter().map(|e| e / total).collect() })
}

/// Shannon entropy (nats) of a relative-energy distribution; `0 ln 0 = 0`.
pub fn swen<T: Real>(rwe: &RweVector<T>) -> T {
    rwe.rwe
        .iter()
        .filter(|&&p| p > T::zero())
        .map(|&p| -p * p.ln())
        .sum()
}
