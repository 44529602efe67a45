//! ε-approximate MEDIAN.
//!
//! Each tuple `(j, p)` contributes `⌊2·m·p/ε⌋` copies of `j` to a deterministic
//! induced stream, which is summarized with a GK summary at accuracy `ε/4`.
//! The reported value is the summary's answer for rank `⌈|A′|/2⌉`.

use super::basic::CountSum;
use crate::error::{Error, Result};
use crate::model::{check_unit_open, ProbItem, ProbStream};
use crate::sketches::GkSummary;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MedianEstimate {
    pub value: u64,
    /// Length of the induced stream.
    pub induced_len: u64,
    pub peak_entries: usize,
}

#[derive(Debug, Clone)]
pub struct MedianEstimator {
    epsilon: f64,
    m_bound: u64,
    items: u64,
    summary: GkSummary,
}

impl MedianEstimator {
    /// `m_bound` must be at least the number of items that will be pushed.
    pub fn new(epsilon: f64, m_bound: u64, n: u64) -> Result<Self> {
        check_unit_open("epsilon", epsilon)?;
        if m_bound == 0 {
            return Err(Error::InvalidParams(
                "stream length bound must be positive".into(),
            ));
        }
        Ok(MedianEstimator {
            epsilon,
            m_bound,
            items: 0,
            summary: GkSummary::new(epsilon / 4.0, n)?,
        })
    }

    /// Copies of a value with probability `p`: `⌊((2·m)·p)/ε⌋`.
    pub fn copies(&self, p: f64) -> u64 {
        (2.0 * self.m_bound as f64 * p / self.epsilon).floor() as u64
    }

    pub fn push(&mut self, item: &ProbItem) -> Result<()> {
        self.items += 1;
        if self.items > self.m_bound {
            return Err(Error::InvalidParams(format!(
                "stream longer than the declared bound m = {}",
                self.m_bound
            )));
        }
        for t in item.tuples() {
            let copies = self.copies(t.prob);
            self.summary.insert_many(t.value, copies)?;
        }
        Ok(())
    }

    pub fn summary(&self) -> &GkSummary {
        &self.summary
    }

    pub fn finish(&self) -> Result<MedianEstimate> {
        let len = self.summary.count();
        if len == 0 {
            return Err(Error::EmptyInducedStream);
        }
        let value = self.summary.query(len.div_ceil(2))?;
        Ok(MedianEstimate {
            value,
            induced_len: len,
            peak_entries: self.summary.peak_entries(),
        })
    }
}

/// ε-approximate median, with `m` taken from the stream.
pub fn median(stream: &ProbStream, epsilon: f64) -> Result<MedianEstimate> {
    median_with_m_hint(stream, epsilon, stream.len() as u64)
}

/// ε-approximate median using an upper bound `m_hint ≥ m` on the length.
pub fn median_with_m_hint(
    stream: &ProbStream,
    epsilon: f64,
    m_hint: u64,
) -> Result<MedianEstimate> {
    let n = if stream.n() == 0 { 1 } else { stream.n() };
    let mut est = MedianEstimator::new(epsilon, m_hint, n)?;
    for item in stream.items() {
        est.push(item)?;
    }
    est.finish()
}

/// Expected numbers of realized elements strictly below and strictly above a
/// candidate, with the COUNT they are measured against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankMasses {
    pub below: f64,
    pub above: f64,
    pub count: f64,
}

impl RankMasses {
    pub fn of(stream: &ProbStream, x: u64) -> Self {
        let (mut below, mut above) = (0.0, 0.0);
        let mut totals = CountSum::new();
        for item in stream.items() {
            totals.push(item);
            for t in item.tuples() {
                if t.value < x {
                    below += t.prob;
                } else if t.value > x {
                    above += t.prob;
                }
            }
        }
        RankMasses {
            below,
            above,
            count: totals.count(),
        }
    }

    /// `(1/2 + ε)·⌈COUNT⌉`.
    pub fn bound(&self, epsilon: f64) -> f64 {
        (0.5 + epsilon) * (self.count - ROUNDING).ceil().max(0.0)
    }

    pub fn is_approx_median(&self, epsilon: f64) -> bool {
        let bound = self.bound(epsilon);
        self.below <= bound + ROUNDING && self.above <= bound + ROUNDING
    }
}

/// Floating-point slack for the two inequalities and the ceiling.
const ROUNDING: f64 = 1e-9;

/// Whether `x` is an ε-approximate median: the expected numbers of realized
/// elements below and above `x` are both at most `(1/2 + ε)·⌈COUNT⌉`.
pub fn check_approx_median(stream: &ProbStream, x: u64, epsilon: f64) -> bool {
    RankMasses::of(stream, x).is_approx_median(epsilon)
}
