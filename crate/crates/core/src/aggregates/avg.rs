//! AVG = E[Y/Z], where Y is the realized sum and Z the realized count.
//!
//! Two regimes share one pass. When COUNT is at least
//! `c = 12ε⁻²·ln(10nm/ε)` the realized count concentrates and SUM/COUNT is
//! already an ε-approximation. Otherwise a dynamic program tracks, for every
//! count z inside a band of half-width `w = εc` around the running
//! expectation E[Z_j],
//!
//! ```text
//! A_z = Pr[Z_j = z, band held at every prefix]
//! B_z = Σ_y y·Pr[Y_j = y, Z_j = z, band held at every prefix]
//! ```
//!
//! and the estimate is `Σ_{z≥1} B_z/z`. The outcome Z = 0 contributes 0.

use std::fmt::Debug;
use std::ops::{Add, Mul, Sub};

use super::basic::CountSum;
use crate::error::{Error, Result};
use crate::model::{check_unit_open, ProbItem, ProbStream};
use crate::oracle::in_band;

/// Arithmetic the band DP needs; lets the same recurrence run in wider
/// precision for cross-checking.
pub trait DpScalar:
    Copy + Debug + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self>
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn div_f64(self, d: f64) -> Self;
}

impl DpScalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }

    fn to_f64(self) -> f64 {
        self
    }

    fn div_f64(self, d: f64) -> Self {
        self / d
    }
}

/// Band DP over the realized count.
///
/// `a[k]`, `b[k]` hold `A_z`, `B_z` for `z = z_lo + k`. Entries outside the
/// band are dropped after every item, so the band never holds more than
/// `2w + 1` counts.
#[derive(Debug, Clone)]
pub struct AvgDp<T: DpScalar = f64> {
    w: f64,
    expected_z: f64,
    z_lo: usize,
    a: Vec<T>,
    b: Vec<T>,
    items: usize,
    peak_band: usize,
}

impl<T: DpScalar> AvgDp<T> {
    pub fn new(w: f64) -> Result<Self> {
        if w.is_nan() || w <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "band half-width must be positive, got {w}"
            )));
        }
        Ok(AvgDp {
            w,
            expected_z: 0.0,
            z_lo: 0,
            a: vec![T::from_f64(1.0)],
            b: vec![T::from_f64(0.0)],
            items: 0,
            peak_band: 1,
        })
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    /// `E[Z_j]` after the items consumed so far.
    pub fn expected_z(&self) -> f64 {
        self.expected_z
    }

    pub fn items(&self) -> usize {
        self.items
    }

    pub fn push(&mut self, item: &ProbItem) {
        let zero = T::from_f64(0.0);
        let one = T::from_f64(1.0);
        let mut mass = zero;
        let mut weighted = zero;
        for t in item.tuples() {
            let p = T::from_f64(t.prob);
            mass = mass + p;
            weighted = weighted + T::from_f64(t.value as f64) * p;
        }
        if mass.to_f64() > 1.0 {
            mass = one;
        }
        let p_bot = one - mass;

        self.items += 1;
        self.expected_z += item.mass();
        let Some((lo, hi)) = band_range(self.expected_z, self.w, self.items) else {
            self.a.clear();
            self.b.clear();
            self.z_lo = 0;
            return;
        };

        // Advance every stored count in place, highest first, so each step
        // still reads the previous item's A_{z−1} and B_{z−1}.
        self.a.push(zero);
        self.b.push(zero);
        for k in (1..self.a.len()).rev() {
            let (a_prev, b_prev) = (self.a[k - 1], self.b[k - 1]);
            self.b[k] = p_bot * self.b[k] + weighted * a_prev + mass * b_prev;
            self.a[k] = a_prev * mass + self.a[k] * p_bot;
        }
        self.a[0] = self.a[0] * p_bot;
        self.b[0] = p_bot * self.b[0];

        // Re-window the storage to [lo, hi].
        let old_lo = self.z_lo;
        if lo >= old_lo {
            let cut = (lo - old_lo).min(self.a.len());
            self.a.drain(..cut);
            self.b.drain(..cut);
        } else {
            let pad = std::iter::repeat_n(zero, old_lo - lo);
            self.a.splice(0..0, pad.clone());
            self.b.splice(0..0, pad);
        }
        self.a.resize(hi - lo + 1, zero);
        self.b.resize(hi - lo + 1, zero);
        self.z_lo = lo;
        self.peak_band = self.peak_band.max(self.a.len());
    }

    /// `(z, A_z, B_z)` for every stored count.
    pub fn band(&self) -> impl Iterator<Item = (usize, T, T)> + '_ {
        self.a
            .iter()
            .zip(&self.b)
            .enumerate()
            .map(move |(k, (&a, &b))| (self.z_lo + k, a, b))
    }

    pub fn band_len(&self) -> usize {
        self.a.len()
    }

    /// Largest band held after any item.
    pub fn peak_band(&self) -> usize {
        self.peak_band
    }

    /// `A_z`, zero outside the band.
    pub fn a(&self, z: usize) -> T {
        self.band()
            .find(|&(zz, _, _)| zz == z)
            .map_or(T::from_f64(0.0), |(_, a, _)| a)
    }

    /// `B_z`, zero outside the band.
    pub fn b(&self, z: usize) -> T {
        self.band()
            .find(|&(zz, _, _)| zz == z)
            .map_or(T::from_f64(0.0), |(_, _, b)| b)
    }

    /// `Σ_z A_z = Pr[band held at every prefix]`.
    pub fn total_mass(&self) -> T {
        self.a.iter().fold(T::from_f64(0.0), |acc, &x| acc + x)
    }

    /// `Σ_{z≥1} B_z / z`.
    pub fn ratio_sum(&self) -> T {
        self.band()
            .filter(|&(z, _, _)| z >= 1)
            .fold(T::from_f64(0.0), |acc, (z, _, b)| acc + b.div_f64(z as f64))
    }
}

/// Counts `z ∈ [0, max_z]` with `|z − expected| ≤ w`, as an inclusive range.
fn band_range(expected: f64, w: f64, max_z: usize) -> Option<(usize, usize)> {
    let mut lo = (expected - w).ceil().max(0.0) as usize;
    let mut hi = ((expected + w).floor().max(0.0) as usize).min(max_z);
    // Settle rounding at the edges against the exact predicate.
    while lo > 0 && in_band(lo - 1, expected, w) {
        lo -= 1;
    }
    while lo <= hi && !in_band(lo, expected, w) {
        lo += 1;
    }
    while hi < max_z && in_band(hi + 1, expected, w) {
        hi += 1;
    }
    while hi >= lo && !in_band(hi, expected, w) {
        if hi == 0 {
            return None;
        }
        hi -= 1;
    }
    (lo <= hi).then_some((lo, hi))
}

/// Runs the band DP with half-width `w` over the whole stream.
pub fn avg_dp(stream: &ProbStream, w: f64) -> Result<AvgDp> {
    let mut dp = AvgDp::new(w)?;
    stream.items().iter().for_each(|i| dp.push(i));
    Ok(dp)
}

/// Regime threshold `c` and band half-width `w = εc`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AvgConfig {
    pub epsilon: f64,
    pub c: f64,
    pub w: f64,
}

impl AvgConfig {
    /// `n` and `m` may be upper bounds on the domain size and stream length;
    /// larger bounds only make both regimes more conservative.
    pub fn new(epsilon: f64, n: u64, m: u64) -> Result<Self> {
        check_unit_open("epsilon", epsilon)?;
        let (n, m) = (n.max(1) as f64, m.max(1) as f64);
        let c = 12.0 / (epsilon * epsilon) * (10.0 * n * m / epsilon).ln();
        Ok(AvgConfig {
            epsilon,
            c,
            w: epsilon * c,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AvgRegime {
    /// COUNT reached the threshold; SUM/COUNT was returned.
    SumCount,
    /// Banded dynamic program.
    Dp,
}

impl AvgRegime {
    pub fn as_str(self) -> &'static str {
        match self {
            AvgRegime::SumCount => "sum_count",
            AvgRegime::Dp => "dp",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AvgEstimate {
    pub value: f64,
    pub regime: AvgRegime,
    pub config: AvgConfig,
    /// Largest DP band held during the pass (0 if the DP never ran).
    pub peak_band: usize,
}

/// One-pass AVG estimator maintaining both regimes.
///
/// COUNT only grows, so once it reaches `c` the SUM/COUNT regime is settled
/// and the DP band is released.
#[derive(Debug, Clone)]
pub struct AvgEstimator {
    config: AvgConfig,
    m_bound: u64,
    totals: CountSum,
    dp: Option<AvgDp>,
    items: u64,
    peak_band: usize,
}

impl AvgEstimator {
    pub fn new(epsilon: f64, n: u64, m_bound: u64) -> Result<Self> {
        let config = AvgConfig::new(epsilon, n, m_bound)?;
        Ok(AvgEstimator {
            config,
            m_bound,
            totals: CountSum::new(),
            dp: Some(AvgDp::new(config.w)?),
            items: 0,
            peak_band: 1,
        })
    }

    pub fn config(&self) -> AvgConfig {
        self.config
    }

    pub fn push(&mut self, item: &ProbItem) -> Result<()> {
        self.items += 1;
        if self.items > self.m_bound {
            return Err(Error::InvalidParams(format!(
                "stream longer than the declared bound m = {}",
                self.m_bound
            )));
        }
        self.totals.push(item);
        if self.totals.count() >= self.config.c {
            self.dp = None;
        } else if let Some(dp) = &mut self.dp {
            dp.push(item);
            self.peak_band = self.peak_band.max(dp.band_len());
        }
        Ok(())
    }

    pub fn finish(self) -> Result<AvgEstimate> {
        let count = self.totals.count();
        if count <= 0.0 {
            return Err(Error::UndefinedAverage);
        }
        let (value, regime) = match &self.dp {
            Some(dp) if count < self.config.c => (dp.ratio_sum(), AvgRegime::Dp),
            _ => (self.totals.sum() / count, AvgRegime::SumCount),
        };
        Ok(AvgEstimate {
            value,
            regime,
            config: self.config,
            peak_band: if regime == AvgRegime::Dp {
                self.peak_band
            } else {
                0
            },
        })
    }
}

/// Deterministic (ε, 0)-approximation of AVG in one pass.
pub fn avg(stream: &ProbStream, epsilon: f64) -> Result<AvgEstimate> {
    let mut est = AvgEstimator::new(epsilon, stream.n(), stream.len() as u64)?;
    for item in stream.items() {
        est.push(item)?;
    }
    est.finish()
}
