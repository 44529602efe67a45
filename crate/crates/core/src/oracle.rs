//! Exhaustive ground truth for small streams.
//!
//! Every realization `⟨x₁, …, x_m⟩` is visited with probability `Π Pr[X_i = x_i]`
//! and the aggregates are accumulated directly from their definitions. The
//! outcome space is walked as a mixed-radix counter over per-item outcome
//! indices, tuples first and ⊥ last.

use crate::error::{Error, Result};
use crate::model::ProbStream;

/// Largest outcome space [`enumerate`] will walk.
pub const ENUMERATION_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// Size of the outcome space walked.
    pub outcomes: u64,
    /// Σ of outcome probabilities; 1 up to rounding.
    pub total_prob: f64,
    pub count: f64,
    pub sum: f64,
    /// `E[(Y/Z)·1[Z ≥ 1]]`, or `None` when `Pr[Z ≥ 1] = 0`.
    pub avg: Option<f64>,
    pub pr_nonempty: f64,
    pub distinct: f64,
    pub repeat_rate: f64,
    /// Probability that every prefix count stays within `w` of its
    /// expectation, when a `w` was supplied.
    pub pr_band: Option<f64>,
    /// `value_mass[v] = E[|{i : X_i = v}|]` for `v` in `0..=n`.
    pub value_mass: Vec<f64>,
}

impl OracleResult {
    /// `E[|{i : X_i < x}|]`.
    pub fn below(&self, x: u64) -> f64 {
        let end = (x as usize).min(self.value_mass.len());
        self.value_mass[..end].iter().sum()
    }

    /// `E[|{i : X_i > x}|]`.
    pub fn above(&self, x: u64) -> f64 {
        let start = (x as usize + 1).min(self.value_mass.len());
        self.value_mass[start..].iter().sum()
    }
}

/// Outcome-space size `Π (l_i + 1)`, saturating.
pub fn outcome_space(stream: &ProbStream) -> u128 {
    stream
        .items()
        .iter()
        .fold(1u128, |acc, it| acc.saturating_mul(it.len() as u128 + 1))
}

/// Whether `z` lies within `w` of `expected`; shared with the band DP.
#[inline]
pub(crate) fn in_band(z: usize, expected: f64, w: f64) -> bool {
    (z as f64 - expected).abs() <= w
}

#[derive(Debug, Clone, Copy, Default)]
struct Compensated {
    total: f64,
    comp: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.total + x;
        if self.total.abs() >= x.abs() {
            self.comp += (self.total - t) + x;
        } else {
            self.comp += (x - t) + self.total;
        }
        self.total = t;
    }

    fn value(&self) -> f64 {
        self.total + self.comp
    }
}

pub fn enumerate(stream: &ProbStream, w: Option<f64>) -> Result<OracleResult> {
    let space = outcome_space(stream);
    if space > ENUMERATION_BUDGET as u128 {
        return Err(Error::EnumerationTooLarge {
            outcomes: space,
            budget: ENUMERATION_BUDGET,
        });
    }
    let items = stream.items();
    let m = items.len();
    // Per item: (value, prob) outcomes with ⊥ encoded as value 0, last.
    let outcomes: Vec<Vec<(u64, f64)>> = items
        .iter()
        .map(|it| {
            let mut o: Vec<(u64, f64)> = it.tuples().iter().map(|t| (t.value, t.prob)).collect();
            o.push((0, it.p_bot()));
            o
        })
        .collect();
    let mut expected_prefix = Vec::with_capacity(m);
    let mut running = 0.0;
    for it in items {
        running += it.mass();
        expected_prefix.push(running);
    }

    let n = stream.n() as usize;
    let mut value_mass = vec![Compensated::default(); n + 1];
    let mut total_prob = Compensated::default();
    let (mut count, mut sum) = (Compensated::default(), Compensated::default());
    let (mut avg, mut pr_nonempty) = (Compensated::default(), Compensated::default());
    let (mut distinct, mut repeat) = (Compensated::default(), Compensated::default());
    let mut band = Compensated::default();

    let mut digits = vec![0usize; m];
    let mut realized: Vec<u64> = Vec::with_capacity(m);
    loop {
        let mut prob = 1.0;
        realized.clear();
        let mut held = true;
        for (i, &d) in digits.iter().enumerate() {
            let (v, p) = outcomes[i][d];
            prob *= p;
            if v != 0 {
                realized.push(v);
            }
            if let Some(w) = w {
                held &= in_band(realized.len(), expected_prefix[i], w);
            }
        }

        if prob > 0.0 {
            total_prob.add(prob);
            let z = realized.len();
            let y: u128 = realized.iter().map(|&v| v as u128).sum();
            count.add(prob * z as f64);
            sum.add(prob * y as f64);
            if z > 0 {
                avg.add(prob * (y as f64 / z as f64));
                pr_nonempty.add(prob);
            }
            for &v in &realized {
                value_mass[v as usize].add(prob);
            }
            realized.sort_unstable();
            let (mut kinds, mut squares, mut run) = (0u64, 0u64, 0u64);
            for (k, &v) in realized.iter().enumerate() {
                if k > 0 && realized[k - 1] == v {
                    run += 1;
                } else {
                    squares += run * run;
                    kinds += 1;
                    run = 1;
                }
            }
            squares += run * run;
            distinct.add(prob * kinds as f64);
            repeat.add(prob * squares as f64);
            if held {
                band.add(prob);
            }
        }

        // Advance the mixed-radix counter.
        let mut pos = 0;
        loop {
            if pos == m {
                let pr_nonempty = pr_nonempty.value();
                return Ok(OracleResult {
                    outcomes: space as u64,
                    total_prob: total_prob.value(),
                    count: count.value(),
                    sum: sum.value(),
                    avg: (pr_nonempty > 0.0).then(|| avg.value()),
                    pr_nonempty,
                    distinct: distinct.value(),
                    repeat_rate: repeat.value(),
                    pr_band: w.map(|_| band.value()),
                    value_mass: value_mass.iter().map(Compensated::value).collect(),
                });
            }
            digits[pos] += 1;
            if digits[pos] < outcomes[pos].len() {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
}
