//! Sample entropy and the variability of wavelet-entropy series.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{mean, std_pop, Real};

/// Template-pair match counts: `b` at length `m`, `a` at length `m + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchCounts {
    pub a: u64,
    pub b: u64,
}

/// Counts matching template pairs (Chebyshev distance `<= r`, self-matches
/// excluded). Both lengths use the first `n - m` templates.
///
/// Templates are sorted by their first sample so only pairs within `r` on
/// that coordinate are compared; the counts equal the exhaustive ones.
pub fn match_counts<T: Real>(series: &[T], m: usize, r: T) -> Result<MatchCounts> {
    let n = series.len();
    if m == 0 {
        return Err(Error::InvalidConfig("embedding dimension must be at least 1".into()));
    }
    if n <= m + 1 {
        return Err(Error::TooShort { needed: m + 2, actual: n });
    }
    if !(r > T::zero()) {
        return Err(Error::InvalidConfig("tolerance must be positive".into()));
    }
    let n_templates = n - m;
    let mut order: Vec<usize> = (0..n_templates).collect();
    order.sort_by(|&i, &j| series[i].partial_cmp(&series[j]).unwrap_or(std::cmp::Ordering::Equal));

    let (mut a, mut b) = (0u64, 0u64);
    for p in 0..n_templates {
        let i = order[p];
        let xi = series[i];
        for &j in &order[p + 1..] {
            if series[j] - xi > r {
                break;
            }
            if (1..m).all(|k| (series[i + k] - series[j + k]).abs() <= r) {
                b += 1;
                if (series[i + m] - series[j + m]).abs() <= r {
                    a += 1;
                }
            }
        }
    }
    Ok(MatchCounts { a, b })
}

/// Value reported when no template pair matches: the largest estimable entropy.
pub fn no_match_sentinel(n: usize, m: usize) -> f64 {
    let pairs = ((n - m - 1) * (n - m)) as f64;
    -(2.0 / pairs).ln()
}

/// `-ln(A / B)`; falls back to [`no_match_sentinel`] when `A` or `B` is zero.
pub fn sample_entropy<T: Real>(series: &[T], m: usize, r: T) -> Result<T> {
    let c = match_counts(series, m, r)?;
    if c.a == 0 || c.b == 0 {
        return Ok(T::lit(no_match_sentinel(series.len(), m)));
    }
    Ok(T::lit(-(c.a as f64 / c.b as f64).ln()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyParams {
    pub m: usize,
    /// Tolerance as a fraction of the population standard deviation.
    pub r_frac: f64,
}

impl EntropyParams {
    pub const SWENV: Self = Self { m: 1, r_frac: 0.15 };
    pub const AA: Self = Self { m: 2, r_frac: 0.2 };
}

/// Sample entropy with tolerance relative to the series' own spread.
pub fn sample_entropy_relative<T: Real>(series: &[T], params: EntropyParams) -> Result<T> {
    let sd = std_pop(series);
    if !(sd > T::zero()) {
        return Ok(T::zero());
    }
    sample_entropy(series, params.m, T::lit(params.r_frac) * sd)
}

/// Tolerance substituted when the series has zero spread.
pub const DEGENERATE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Swenv<T> {
    pub value: T,
    /// The series was constant: the entropy term is 0 and `r` is [`DEGENERATE_EPS`].
    pub degenerate: bool,
}

/// `SampEn(s; m, r) + ln(2r) - ln(mean(s))` with `r = r_frac · SD(s)`.
pub fn swenv<T: Real>(series: &[T], params: EntropyParams) -> Result<Swenv<T>> {
    let mu = mean(series);
    if !(mu > T::zero()) {
        return Err(Error::ZeroEnergy);
    }
    let sd = std_pop(series);
    let r = T::lit(params.r_frac) * sd;
    if !(r > T::zero()) {
        let eps = T::lit(DEGENERATE_EPS);
        return Ok(Swenv { value: (T::lit(2.0) * eps).ln() - mu.ln(), degenerate: true });
    }
    let se = sample_entropy(series, params.m, r)?;
    Ok(Swenv { value: se + (T::lit(2.0) * r).ln() - mu.ln(), degenerate: false })
}
