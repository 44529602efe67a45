//! DISTINCT = Σ_j (1 − Π_i (1 − p_ij)).
//!
//! When COUNT ≤ ln(1 + ε), COUNT itself is within ε of DISTINCT. Otherwise
//! `c₁` independent basic estimators each instantiate a multiset by keeping
//! every tuple `(j, p)` with probability `p` (one coin per tuple, so several
//! values of one item may survive), feed it to an F₀ sketch with parameters
//! `(ε/3, δ/(2c₁))`, and the estimate is the mean of the `c₁` sketch outputs.

use std::collections::BTreeMap;

use super::basic::CountSum;
use crate::error::{Error, Result};
use crate::hash::{derive_seed, splitmix64};
use crate::model::{ApproxParams, ProbItem, ProbStream};
use crate::sketches::F0Sketch;

/// Exact DISTINCT with one running product per touched value.
pub fn distinct_exact(stream: &ProbStream) -> f64 {
    let mut absent: BTreeMap<u64, f64> = BTreeMap::new();
    for t in stream.items().iter().flat_map(ProbItem::tuples) {
        *absent.entry(t.value).or_insert(1.0) *= 1.0 - t.prob;
    }
    absent.values().map(|q| 1.0 - q).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistinctConfig {
    pub epsilon: f64,
    pub delta: f64,
    /// Number of basic estimators, `⌈54·ε⁻³·ln(4/δ)⌉`.
    pub c1: usize,
    /// Accuracy handed to each F₀ sketch, `ε/3`.
    pub sketch_epsilon: f64,
    /// Failure probability handed to each F₀ sketch, `δ/(2c₁)`.
    pub sketch_delta: f64,
    pub seed: u64,
}

impl DistinctConfig {
    pub fn new(params: ApproxParams) -> Self {
        let ApproxParams {
            epsilon,
            delta,
            seed,
        } = params;
        let c1 = (54.0 * epsilon.powi(-3) * (4.0 / delta).ln())
            .ceil()
            .max(1.0) as usize;
        DistinctConfig {
            epsilon,
            delta,
            c1,
            sketch_epsilon: epsilon / 3.0,
            sketch_delta: delta / (2.0 * c1 as f64),
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DistinctVariant {
    /// COUNT was small enough to return directly.
    Shortcut,
    /// Mean of the basic estimators.
    Estimators,
    /// Exact product formula.
    Exact,
}

impl DistinctVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            DistinctVariant::Shortcut => "shortcut",
            DistinctVariant::Estimators => "estimators",
            DistinctVariant::Exact => "exact",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistinctEstimate {
    pub value: f64,
    pub variant: DistinctVariant,
    pub count: f64,
    /// Coordinates held across all F₀ sketches at the end of the pass.
    pub sketch_entries: usize,
}

#[derive(Debug, Clone)]
struct BasicEstimator {
    coin_seed: u64,
    sketch: F0Sketch,
}

/// One-pass (ε, δ) DISTINCT estimator.
#[derive(Debug, Clone)]
pub struct DistinctEstimator {
    config: DistinctConfig,
    totals: CountSum,
    estimators: Vec<BasicEstimator>,
    item_index: u64,
}

impl DistinctEstimator {
    pub fn new(params: ApproxParams, n: u64) -> Result<Self> {
        let config = DistinctConfig::new(params);
        let estimators = (0..config.c1)
            .map(|k| {
                let seed = derive_seed(config.seed, k as u64);
                Ok(BasicEstimator {
                    coin_seed: splitmix64(seed ^ 0x5851_f42d_4c95_7f2d),
                    sketch: F0Sketch::new(config.sketch_epsilon, config.sketch_delta, n, seed)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(DistinctEstimator {
            config,
            totals: CountSum::new(),
            estimators,
            item_index: 0,
        })
    }

    pub fn config(&self) -> DistinctConfig {
        self.config
    }

    pub fn push(&mut self, item: &ProbItem) -> Result<()> {
        self.totals.push(item);
        for (ti, t) in item.tuples().iter().enumerate() {
            let key = splitmix64(self.item_index.wrapping_mul(0x1_0000_0001) ^ ti as u64);
            // Keep iff u < p, with u uniform on [0, 1) in steps of 2⁻⁵³.
            let threshold = t.prob * (1u64 << 53) as f64;
            for est in &mut self.estimators {
                let u = (splitmix64(est.coin_seed ^ key) >> 11) as f64;
                if u < threshold {
                    est.sketch.insert(t.value)?;
                }
            }
        }
        self.item_index += 1;
        Ok(())
    }

    pub fn finish(&self) -> DistinctEstimate {
        let count = self.totals.count();
        let sketch_entries = self
            .estimators
            .iter()
            .map(|e| e.sketch.stored_entries())
            .sum();
        if count <= (1.0 + self.config.epsilon).ln() {
            return DistinctEstimate {
                value: count,
                variant: DistinctVariant::Shortcut,
                count,
                sketch_entries,
            };
        }
        let total: f64 = self.estimators.iter().map(|e| e.sketch.estimate()).sum();
        DistinctEstimate {
            value: total / self.estimators.len() as f64,
            variant: DistinctVariant::Estimators,
            count,
            sketch_entries,
        }
    }
}

/// (ε, δ)-approximate DISTINCT. Needs an explicit domain size to size the
/// sketches before the pass.
pub fn distinct_estimate(stream: &ProbStream, params: ApproxParams) -> Result<DistinctEstimate> {
    let n = stream.explicit_n().ok_or(Error::DomainUnknown)?;
    let mut est = DistinctEstimator::new(params, n)?;
    for item in stream.items() {
        est.push(item)?;
    }
    Ok(est.finish())
}
