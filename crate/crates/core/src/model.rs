//! Probabilistic stream items and their derived per-item quantities.

use crate::error::{Error, Result};

/// Slack allowed on the total probability mass of one item, absorbing
/// decimal-to-binary rounding when the masses are meant to sum to exactly 1.
pub const TOL_PARSE: f64 = 1e-9;

/// One `(value, probability)` outcome of an item.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbTuple {
    pub value: u64,
    pub prob: f64,
}

/// A single stream element: a random variable over `[1, n] ∪ {⊥}`.
///
/// The ⊥ outcome is implicit and carries whatever mass the tuples leave over.
/// An item with no tuples is ⊥ with probability 1.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProbItem {
    tuples: Vec<ProbTuple>,
}

impl ProbItem {
    /// Validates raw `(value, prob)` pairs into an item.
    ///
    /// Values must be at least 1 and pairwise distinct, probabilities must be
    /// strictly positive, and the total mass may exceed 1 by at most
    /// [`TOL_PARSE`].
    pub fn new<I>(raw: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, f64)>,
    {
        let tuples: Vec<ProbTuple> = raw
            .into_iter()
            .map(|(value, prob)| ProbTuple { value, prob })
            .collect();
        let mut total = 0.0;
        for (idx, t) in tuples.iter().enumerate() {
            if t.value == 0 {
                return Err(Error::NonPositiveValue);
            }
            // NaN fails this test too.
            if !(t.prob.is_finite() && t.prob > 0.0) {
                return Err(Error::NonPositiveProb {
                    value: t.value,
                    prob: t.prob,
                });
            }
            if tuples[..idx].iter().any(|u| u.value == t.value) {
                return Err(Error::DuplicateValue { value: t.value });
            }
            total += t.prob;
        }
        if total > 1.0 + TOL_PARSE {
            return Err(Error::ProbSumExceedsOne { sum: total });
        }
        Ok(ProbItem { tuples })
    }

    /// An item that is `value` with probability 1.
    pub fn certain(value: u64) -> Result<Self> {
        Self::new([(value, 1.0)])
    }

    pub fn tuples(&self) -> &[ProbTuple] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    /// Total mass on non-⊥ outcomes, clamped to at most 1.
    pub fn mass(&self) -> f64 {
        self.tuples.iter().map(|t| t.prob).sum::<f64>().min(1.0)
    }

    /// `Pr[X = ⊥]`.
    pub fn p_bot(&self) -> f64 {
        (1.0 - self.tuples.iter().map(|t| t.prob).sum::<f64>()).clamp(0.0, 1.0)
    }

    /// `Σ j·p_j`, i.e. `E[X | X ≠ ⊥]·(1 − p_⊥)`.
    pub fn weighted_sum(&self) -> f64 {
        self.tuples.iter().map(|t| t.value as f64 * t.prob).sum()
    }

    /// `E[X | X ≠ ⊥]`.
    pub fn cond_mean(&self) -> Result<f64> {
        let mass: f64 = self.tuples.iter().map(|t| t.prob).sum();
        if self.tuples.is_empty() || mass <= 0.0 {
            return Err(Error::AllBotItem);
        }
        Ok(self.weighted_sum() / mass)
    }

    pub fn max_value(&self) -> Option<u64> {
        self.tuples.iter().map(|t| t.value).max()
    }
}

/// A finite probabilistic stream held in memory.
///
/// `n` is either supplied by the caller or inferred as the largest value
/// seen. Operations that must size state before the pass (the sketches) only
/// accept an explicit domain; see [`ProbStream::explicit_n`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProbStream {
    items: Vec<ProbItem>,
    n: u64,
    n_explicit: bool,
    l_max: usize,
}

impl ProbStream {
    /// Builds a stream whose domain is inferred from the largest value.
    pub fn new(items: Vec<ProbItem>) -> Result<Self> {
        let n = items
            .iter()
            .filter_map(ProbItem::max_value)
            .max()
            .unwrap_or(0);
        let l_max = items.iter().map(ProbItem::len).max().unwrap_or(0);
        Ok(ProbStream {
            items,
            n,
            n_explicit: false,
            l_max,
        })
    }

    /// Builds a stream over the explicit domain `[1, n]`.
    pub fn with_domain(items: Vec<ProbItem>, n: u64) -> Result<Self> {
        let mut s = Self::new(items)?;
        if s.n > n {
            return Err(Error::ValueOutOfDomain { value: s.n, n });
        }
        s.n = n;
        s.n_explicit = true;
        Ok(s)
    }

    pub fn items(&self) -> &[ProbItem] {
        &self.items
    }

    /// Number of items, `m`.
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Domain size: explicit if supplied, otherwise the largest value seen.
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn explicit_n(&self) -> Option<u64> {
        self.n_explicit.then_some(self.n)
    }

    /// Largest number of tuples carried by any single item.
    pub fn l_max(&self) -> usize {
        self.l_max
    }

    /// Total number of tuples across all items.
    pub fn tuple_count(&self) -> usize {
        self.items.iter().map(ProbItem::len).sum()
    }
}

/// Accuracy and randomness parameters for the (ε, δ) estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxParams {
    pub epsilon: f64,
    pub delta: f64,
    pub seed: u64,
}

impl ApproxParams {
    pub fn new(epsilon: f64, delta: f64, seed: u64) -> Result<Self> {
        check_unit_open("epsilon", epsilon)?;
        check_unit_open("delta", delta)?;
        Ok(ApproxParams {
            epsilon,
            delta,
            seed,
        })
    }
}

pub(crate) fn check_unit_open(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!(
            "{name} must lie strictly inside (0, 1), got {x}"
        )))
    }
}

/// Checks `1 ≤ value ≤ n`.
pub(crate) fn check_domain(value: u64, n: u64) -> Result<()> {
    if value == 0 || value > n {
        Err(Error::ValueOutOfDomain { value, n })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_mass_item_has_no_bot() {
        let item = ProbItem::new([(3, 0.5), (7, 0.5)]).unwrap();
        assert_eq!(item.p_bot(), 0.0);
    }

    #[test]
    fn empty_item_is_all_bot() {
        let item = ProbItem::new([]).unwrap();
        assert_eq!(item.p_bot(), 1.0);
        assert_eq!(item.cond_mean(), Err(Error::AllBotItem));
    }

    #[test]
    fn duplicates_rejected_before_mass_check() {
        assert_eq!(
            ProbItem::new([(3, 0.6), (3, 0.6)]),
            Err(Error::DuplicateValue { value: 3 })
        );
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(
            ProbItem::new([(1, 0.7), (2, 0.4)]),
            Err(Error::ProbSumExceedsOne { .. })
        ));
        assert!(matches!(
            ProbItem::new([(1, 0.0)]),
            Err(Error::NonPositiveProb { .. })
        ));
        assert!(matches!(
            ProbItem::new([(1, -0.1)]),
            Err(Error::NonPositiveProb { .. })
        ));
        assert!(matches!(
            ProbItem::new([(1, f64::NAN)]),
            Err(Error::NonPositiveProb { .. })
        ));
        assert_eq!(ProbItem::new([(0, 0.5)]), Err(Error::NonPositiveValue));
    }

    #[test]
    fn rounding_slack_is_accepted() {
        let item = ProbItem::new([(1, 0.1), (2, 0.2), (3, 0.7 + 5e-10)]).unwrap();
        assert_eq!(item.p_bot(), 0.0);
        assert_eq!(item.mass(), 1.0);
    }

    #[test]
    fn p_bot_examples() {
        assert_eq!(ProbItem::new([(5, 0.25)]).unwrap().p_bot(), 0.75);
        assert_eq!(ProbItem::new([(1, 0.5), (2, 0.5)]).unwrap().p_bot(), 0.0);
    }

    #[test]
    fn cond_mean_examples() {
        assert_eq!(ProbItem::new([(4, 0.5)]).unwrap().cond_mean(), Ok(4.0));
        assert_eq!(
            ProbItem::new([(2, 0.25), (6, 0.25)]).unwrap().cond_mean(),
            Ok(4.0)
        );
    }

    #[test]
    fn explicit_domain_is_enforced() {
        let items = vec![ProbItem::certain(5).unwrap()];
        assert_eq!(
            ProbStream::with_domain(items.clone(), 4),
            Err(Error::ValueOutOfDomain { value: 5, n: 4 })
        );
        let s = ProbStream::with_domain(items.clone(), 9).unwrap();
        assert_eq!(s.explicit_n(), Some(9));
        let s = ProbStream::new(items).unwrap();
        assert_eq!((s.n(), s.explicit_n()), (5, None));
    }

    #[test]
    fn approx_params_bounds() {
        assert!(ApproxParams::new(0.1, 0.1, 0).is_ok());
        assert!(ApproxParams::new(0.0, 0.1, 0).is_err());
        assert!(ApproxParams::new(0.1, 1.0, 0).is_err());
    }
}
