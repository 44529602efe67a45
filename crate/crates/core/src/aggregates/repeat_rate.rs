//! REPEAT-RATE = Σ_j f_j² + Σ_tuples p(1 − p), with `f_j = Σ_i p_ij`.
//!
//! The first term is the second frequency moment of the fractional frequency
//! vector and goes to an F₂ sketch; the second term is kept exactly.

use std::collections::BTreeMap;

use super::basic::neumaier_add;
use crate::error::{Error, Result};
use crate::model::{ApproxParams, ProbItem, ProbStream};
use crate::sketches::F2Sketch;

/// Exact REPEAT-RATE with one running frequency per touched value.
pub fn repeat_rate_exact(stream: &ProbStream) -> f64 {
    let mut freq: BTreeMap<u64, f64> = BTreeMap::new();
    let mut spread = 0.0;
    for t in stream.items().iter().flat_map(ProbItem::tuples) {
        *freq.entry(t.value).or_insert(0.0) += t.prob;
        spread += t.prob * (1.0 - t.prob);
    }
    freq.values().map(|f| f * f).sum::<f64>() + spread
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepeatRateEstimate {
    pub value: f64,
    /// Sketch estimate of `Σ_j f_j²`.
    pub moment: f64,
    /// Exact `Σ p(1 − p)`.
    pub spread: f64,
    pub counters: usize,
}

#[derive(Debug, Clone)]
pub struct RepeatRateEstimator {
    sketch: F2Sketch,
    spread: f64,
    spread_comp: f64,
}

impl RepeatRateEstimator {
    pub fn new(params: ApproxParams, n: u64) -> Result<Self> {
        Ok(RepeatRateEstimator {
            sketch: F2Sketch::new(params.epsilon, params.delta, n, params.seed)?,
            spread: 0.0,
            spread_comp: 0.0,
        })
    }

    pub fn push(&mut self, item: &ProbItem) -> Result<()> {
        for t in item.tuples() {
            self.sketch.update(t.value, t.prob)?;
            neumaier_add(
                &mut self.spread,
                &mut self.spread_comp,
                t.prob * (1.0 - t.prob),
            );
        }
        Ok(())
    }

    /// The exactly maintained second term.
    pub fn spread(&self) -> f64 {
        self.spread + self.spread_comp
    }

    pub fn sketch(&self) -> &F2Sketch {
        &self.sketch
    }

    pub fn finish(&self) -> RepeatRateEstimate {
        let moment = self.sketch.estimate();
        let spread = self.spread();
        RepeatRateEstimate {
            value: moment + spread,
            moment,
            spread,
            counters: self.sketch.counters().len(),
        }
    }
}

/// (ε, δ)-approximate REPEAT-RATE. Needs an explicit domain size.
pub fn repeat_rate(stream: &ProbStream, params: ApproxParams) -> Result<RepeatRateEstimate> {
    let n = stream.explicit_n().ok_or(Error::DomainUnknown)?;
    let mut est = RepeatRateEstimator::new(params, n)?;
    for item in stream.items() {
        est.push(item)?;
    }
    Ok(est.finish())
}
