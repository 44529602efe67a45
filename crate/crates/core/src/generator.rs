//! Seeded synthetic probabilistic streams.
//!
//! Output is a pure function of the [`GenSpec`] and is meant to be
//! reproducible bit-for-bit in other languages, so the randomness is spelled
//! out here rather than delegated to a library:
//!
//! * State initialisation: `s = splitmix64(seed)`, replaced by
//!   `0x9e3779b97f4a7c15` if zero.
//! * Step (xorshift64*): `s ^= s >> 12; s ^= s << 25; s ^= s >> 27;`
//!   output `s · 0x2545f4914f6cdd1d (mod 2⁶⁴)`.
//! * Uniform double in (0, 1): `((x >> 11) + 0.5) · 2⁻⁵³`.
//! * Index in `[0, k)`: `floor(u·k)` for a fresh uniform `u`.
//!
//! Per item, in order: draw `l + 1` exponentials `d_k = −ln u_k` (a symmetric
//! Dirichlet(1) after normalisation); map the last cell to the ⊥ mass
//! `p_⊥ = b(l+1)·d̂_l` when `b ≤ 1/(l+1)` and `p_⊥ = 1 − (1 − d̂_l)(1 − b)(l+1)/l`
//! otherwise, where `d̂` is the normalised vector and `b` the target mass,
//! which keeps `E[p_⊥] = b`; split `1 − p_⊥` over the first `l` cells in
//! proportion to `d_0..d_{l−1}`; then draw `l` distinct values by the skew law
//! (up to 64 rejection draws per value, then a deterministic linear scan over
//! the remaining values).

use crate::error::{Error, Result};
use crate::hash::splitmix64;
use crate::model::{ProbItem, ProbStream};

/// xorshift64* generator; see the module docs for the exact recurrence.
#[derive(Debug, Clone)]
pub struct XorShift64Star {
    state: u64,
}

impl XorShift64Star {
    pub fn new(seed: u64) -> Self {
        let s = splitmix64(seed);
        XorShift64Star {
            state: if s == 0 { 0x9e37_79b9_7f4a_7c15 } else { s },
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut s = self.state;
        s ^= s >> 12;
        s ^= s << 25;
        s ^= s >> 27;
        self.state = s;
        s.wrapping_mul(0x2545_f491_4f6c_dd1d)
    }

    /// Uniform in the open interval (0, 1).
    pub fn next_f64(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (-53f64).exp2()
    }

    pub fn next_index(&mut self, k: usize) -> usize {
        ((self.next_f64() * k as f64) as usize).min(k - 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ValueSkew {
    Uniform,
    /// `Pr[j] ∝ j^(−s)`.
    Zipf(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenSpec {
    pub m: usize,
    pub n: u64,
    pub l: usize,
    /// Target average ⊥ mass per item, in `[0, 1)`.
    pub bot_mass: f64,
    pub skew: ValueSkew,
    pub seed: u64,
}

impl GenSpec {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 || self.l == 0 {
            return Err(Error::InfeasibleSpec(
                "m, n and l must all be at least 1".into(),
            ));
        }
        if self.l as u64 > self.n {
            return Err(Error::InfeasibleSpec(format!(
                "l = {} distinct values per item exceeds domain size n = {}",
                self.l, self.n
            )));
        }
        if !(0.0..1.0).contains(&self.bot_mass) {
            return Err(Error::InfeasibleSpec(format!(
                "bot_mass must lie in [0, 1), got {}",
                self.bot_mass
            )));
        }
        if let ValueSkew::Zipf(s) = self.skew {
            if !(s.is_finite() && s >= 0.0) {
                return Err(Error::InfeasibleSpec(format!(
                    "zipf exponent {s} is invalid"
                )));
            }
        }
        Ok(())
    }
}

struct ValueSampler {
    n: u64,
    /// Cumulative Zipf weights, absent for uniform.
    cumulative: Option<Vec<f64>>,
}

impl ValueSampler {
    fn new(n: u64, skew: ValueSkew) -> Self {
        let cumulative = match skew {
            ValueSkew::Uniform => None,
            ValueSkew::Zipf(s) => {
                let mut acc = 0.0;
                Some(
                    (1..=n)
                        .map(|j| {
                            acc += (j as f64).powf(-s);
                            acc
                        })
                        .collect(),
                )
            }
        };
        ValueSampler { n, cumulative }
    }

    fn draw(&self, rng: &mut XorShift64Star) -> u64 {
        match &self.cumulative {
            None => rng.next_index(self.n as usize) as u64 + 1,
            Some(cum) => {
                let target = rng.next_f64() * cum[cum.len() - 1];
                (cum.partition_point(|&c| c <= target).min(cum.len() - 1)) as u64 + 1
            }
        }
    }

    fn draw_distinct(&self, rng: &mut XorShift64Star, taken: &[u64]) -> u64 {
        for _ in 0..64 {
            let v = self.draw(rng);
            if !taken.contains(&v) {
                return v;
            }
        }
        // Rejection kept colliding: pick uniformly among the values still free.
        let free = self.n as usize - taken.len();
        let mut k = rng.next_index(free);
        for v in 1..=self.n {
            if !taken.contains(&v) {
                if k == 0 {
                    return v;
                }
                k -= 1;
            }
        }
        unreachable!("fewer free values than counted")
    }
}

pub fn generate(spec: &GenSpec) -> Result<ProbStream> {
    spec.validate()?;
    let mut rng = XorShift64Star::new(spec.seed);
    let sampler = ValueSampler::new(spec.n, spec.skew);
    let l = spec.l;
    let b = spec.bot_mass;
    let mut items = Vec::with_capacity(spec.m);
    let mut cells = vec![0.0; l + 1];
    let mut values = Vec::with_capacity(l);
    for _ in 0..spec.m {
        for c in cells.iter_mut() {
            *c = -rng.next_f64().ln();
        }
        let total: f64 = cells.iter().sum();
        let bot_share = cells[l] / total;
        let cells_per = (l + 1) as f64;
        let p_bot = if b <= 1.0 / cells_per {
            b * cells_per * bot_share
        } else {
            1.0 - (1.0 - bot_share) * (1.0 - b) * cells_per / l as f64
        };
        let value_total: f64 = cells[..l].iter().sum();
        values.clear();
        for _ in 0..l {
            let v = sampler.draw_distinct(&mut rng, &values);
            values.push(v);
        }
        let tuples = values
            .iter()
            .zip(&cells[..l])
            .map(|(&v, &d)| (v, (1.0 - p_bot) * d / value_total));
        items.push(ProbItem::new(tuples)?);
    }
    ProbStream::with_domain(items, spec.n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aggregates::count;

    fn spec(m: usize, n: u64, l: usize, bot_mass: f64, seed: u64) -> GenSpec {
        GenSpec {
            m,
            n,
            l,
            bot_mass,
            skew: ValueSkew::Uniform,
            seed,
        }
    }

    #[test]
    fn zero_bot_single_tuple_is_deterministic() {
        let s = generate(&spec(5, 10, 1, 0.0, 1)).unwrap();
        assert_eq!(s.len(), 5);
        for item in s.items() {
            assert_eq!(item.len(), 1);
            assert_eq!(item.tuples()[0].prob, 1.0);
        }
    }

    #[test]
    fn same_seed_same_stream() {
        let a = generate(&spec(50, 20, 3, 0.3, 9)).unwrap();
        let b = generate(&spec(50, 20, 3, 0.3, 9)).unwrap();
        assert_eq!(a, b);
        let c = generate(&spec(50, 20, 3, 0.3, 10)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn bot_mass_tracks_target() {
        let s = generate(&spec(100, 50, 3, 0.5, 4)).unwrap();
        let c = count(&s);
        assert!((35.0..=65.0).contains(&c), "count {c}");
    }

    #[test]
    fn infeasible_specs() {
        assert!(matches!(
            generate(&spec(5, 3, 5, 0.0, 1)),
            Err(Error::InfeasibleSpec(_))
        ));
        assert!(generate(&spec(0, 3, 1, 0.0, 1)).is_err());
        assert!(generate(&spec(5, 3, 1, 1.0, 1)).is_err());
    }

    #[test]
    fn full_width_items_use_every_value() {
        let s = generate(&GenSpec {
            skew: ValueSkew::Zipf(2.0),
            ..spec(20, 4, 4, 0.1, 2)
        })
        .unwrap();
        for item in s.items() {
            let mut vs: Vec<u64> = item.tuples().iter().map(|t| t.value).collect();
            vs.sort_unstable();
            assert_eq!(vs, vec![1, 2, 3, 4]);
        }
    }

    #[test]
    fn xorshift_reference_values() {
        // First outputs for seed 0, from the recurrence in the module docs.
        let mut rng = XorShift64Star::new(0);
        let mut state = splitmix64(0);
        for _ in 0..3 {
            state ^= state >> 12;
            state ^= state << 25;
            state ^= state >> 27;
            assert_eq!(rng.next_u64(), state.wrapping_mul(0x2545_f491_4f6c_dd1d));
        }
    }
}
