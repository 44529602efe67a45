//! Tug-of-war sketch for the second frequency moment with real-valued
//! updates.
//!
//! Every accumulator holds `Σ_j sign(j)·f_j` for its own 4-wise independent
//! sign hash, so its square is an unbiased estimate of `Σ_j f_j²`. The
//! accumulators form `groups × per_group` cells; the estimate is the median
//! over groups of the mean square within a group.

use crate::error::{Error, Result};
use crate::hash::{key_powers, FourWiseHash, SeedStream};
use crate::model::{check_domain, check_unit_open};

/// Accumulators per group: `⌈C_AMS/ε²⌉`.
pub const C_AMS: f64 = 16.0;
/// Groups: `⌈C_MED·ln(1/δ)⌉`.
pub const C_MED: f64 = 8.0;

#[derive(Debug, Clone)]
pub struct F2Sketch {
    epsilon: f64,
    delta: f64,
    n: u64,
    seed: u64,
    per_group: usize,
    groups: usize,
    signs: Vec<FourWiseHash>,
    counters: Vec<f64>,
}

impl F2Sketch {
    pub fn new(epsilon: f64, delta: f64, n: u64, seed: u64) -> Result<Self> {
        check_unit_open("epsilon", epsilon)?;
        check_unit_open("delta", delta)?;
        let per_group = (C_AMS / (epsilon * epsilon)).ceil() as usize;
        let groups = (C_MED * (1.0 / delta).ln()).ceil().max(1.0) as usize;
        let mut seeds = SeedStream::new(seed);
        let signs = (0..per_group * groups)
            .map(|_| FourWiseHash::from_stream(&mut seeds))
            .collect();
        Ok(F2Sketch {
            epsilon,
            delta,
            n,
            seed,
            per_group,
            groups,
            signs,
            counters: vec![0.0; per_group * groups],
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `(per_group, groups)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.per_group, self.groups)
    }

    pub fn counters(&self) -> &[f64] {
        &self.counters
    }

    /// Adds weight `w` to coordinate `j`.
    pub fn update(&mut self, j: u64, w: f64) -> Result<()> {
        check_domain(j, self.n)?;
        if !w.is_finite() {
            return Err(Error::InvalidParams(format!(
                "update weight {w} is not finite"
            )));
        }
        let powers = key_powers(j);
        for (acc, h) in self.counters.iter_mut().zip(&self.signs) {
            *acc += h.sign_at(&powers) * w;
        }
        Ok(())
    }

    /// Adds another sketch's state; both must share seed and shape.
    pub fn merge(&mut self, other: &F2Sketch) -> Result<()> {
        if self.seed != other.seed || self.n != other.n || self.shape() != other.shape() {
            return Err(Error::InvalidParams(
                "cannot merge F2 sketches with different seeds or shapes".into(),
            ));
        }
        for (a, b) in self.counters.iter_mut().zip(&other.counters) {
            *a += b;
        }
        Ok(())
    }

    pub fn estimate(&self) -> f64 {
        let mut means: Vec<f64> = self
            .counters
            .chunks(self.per_group)
            .map(|g| g.iter().map(|x| x * x).sum::<f64>() / g.len() as f64)
            .collect();
        super::f0::median_in_place(&mut means)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_follows_constants() {
        let sk = F2Sketch::new(0.2, 0.2, 10, 0).unwrap();
        // ⌈16/0.04⌉ = 400, ⌈8·ln 5⌉ = ⌈12.88⌉ = 13
        assert_eq!(sk.shape(), (400, 13));
    }

    #[test]
    fn split_update_equals_single_update() {
        let mut a = F2Sketch::new(0.3, 0.1, 10, 4).unwrap();
        let mut b = a.clone();
        a.update(3, 0.5).unwrap();
        a.update(3, 0.5).unwrap();
        b.update(3, 1.0).unwrap();
        assert_eq!(a.counters(), b.counters());
    }

    #[test]
    fn single_unit_update_is_exact() {
        let mut sk = F2Sketch::new(0.2, 0.1, 10, 8).unwrap();
        sk.update(7, 1.0).unwrap();
        assert_eq!(sk.estimate(), 1.0);
    }

    #[test]
    fn empty_sketch_estimates_zero() {
        let sk = F2Sketch::new(0.2, 0.1, 10, 8).unwrap();
        assert_eq!(sk.estimate(), 0.0);
    }

    #[test]
    fn rejects_bad_updates() {
        let mut sk = F2Sketch::new(0.2, 0.1, 10, 8).unwrap();
        assert!(sk.update(11, 1.0).is_err());
        assert!(sk.update(1, f64::INFINITY).is_err());
    }

    #[test]
    fn merge_is_counter_addition() {
        let mut a = F2Sketch::new(0.5, 0.3, 20, 2).unwrap();
        let mut b = a.clone();
        let mut both = a.clone();
        a.update(1, 0.25).unwrap();
        b.update(2, 0.75).unwrap();
        both.update(1, 0.25).unwrap();
        both.update(2, 0.75).unwrap();
        a.merge(&b).unwrap();
        assert_eq!(a.counters(), both.counters());
        let other_seed = F2Sketch::new(0.5, 0.3, 20, 3).unwrap();
        assert!(a.merge(&other_seed).is_err());
    }
}
