//! Greenwald–Khanna quantile summary over integer values.
//!
//! The summary is a sorted list of `(value, g, Δ)` triples. Writing
//! `rmin_i = Σ_{k≤i} g_k` and `rmax_i = rmin_i + Δ_i`, the element represented
//! by triple `i` has true rank in `[rmin_i, rmax_i]`. Keeping
//! `g_i + Δ_i ≤ max(1, ⌊2εN⌋)` for every triple lets a rank query be answered
//! within `εN`.

use crate::error::{Error, Result};
use crate::model::{check_domain, check_unit_open};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GkEntry {
    pub value: u64,
    pub g: u64,
    pub delta: u64,
}

#[derive(Debug, Clone)]
pub struct GkSummary {
    epsilon: f64,
    n: u64,
    entries: Vec<GkEntry>,
    count: u64,
    since_compress: u64,
    period: u64,
    peak_entries: usize,
}

impl GkSummary {
    pub fn new(epsilon: f64, n: u64) -> Result<Self> {
        check_unit_open("epsilon", epsilon)?;
        Ok(GkSummary {
            epsilon,
            n,
            entries: Vec::new(),
            count: 0,
            since_compress: 0,
            period: ((1.0 / (2.0 * epsilon)).floor() as u64).max(1),
            peak_entries: 0,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Number of values inserted so far (counting multiplicity).
    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn entries(&self) -> &[GkEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest number of triples held at any point.
    pub fn peak_entries(&self) -> usize {
        self.peak_entries
    }

    fn band(&self, count: u64) -> u64 {
        ((2.0 * self.epsilon * count as f64).floor() as u64).max(1)
    }

    pub fn insert(&mut self, v: u64) -> Result<()> {
        self.insert_many(v, 1)
    }

    /// Inserts `w` copies of `v`; equivalent in guarantees to `w` calls of
    /// [`GkSummary::insert`].
    ///
    /// A copy placed directly after a triple holding the same value has the
    /// same rank uncertainty as that triple, so copies are folded into it
    /// while the band allows and appended as fresh triples otherwise.
    pub fn insert_many(&mut self, v: u64, w: u64) -> Result<()> {
        check_domain(v, self.n)?;
        let mut remaining = w;
        while remaining > 0 {
            let pos = self.entries.partition_point(|e| e.value <= v);
            if pos > 0 && self.entries[pos - 1].value == v {
                let pred = self.entries[pos - 1];
                let take = self.absorbable(pred, remaining);
                if take > 0 {
                    self.entries[pos - 1].g += take;
                    self.advance(take);
                    remaining -= take;
                } else {
                    self.entries.insert(
                        pos,
                        GkEntry {
                            value: v,
                            g: 1,
                            delta: pred.delta,
                        },
                    );
                    self.advance(1);
                    remaining -= 1;
                }
            } else {
                let delta = if pos == 0 || pos == self.entries.len() {
                    0
                } else {
                    let succ = self.entries[pos];
                    succ.g + succ.delta - 1
                };
                self.entries.insert(
                    pos,
                    GkEntry {
                        value: v,
                        g: 1,
                        delta,
                    },
                );
                self.advance(1);
                remaining -= 1;
            }
        }
        Ok(())
    }

    /// Largest `t ≤ cap` with `g + t + Δ ≤ ⌊2ε(N + t)⌋`.
    fn absorbable(&self, e: GkEntry, cap: u64) -> u64 {
        let fits = |t: u64| e.g + t + e.delta <= self.band(self.count + t);
        let two_eps = 2.0 * self.epsilon;
        let guess = (two_eps * self.count as f64 - (e.g + e.delta) as f64) / (1.0 - two_eps);
        let mut t = if guess.is_finite() && guess > 0.0 {
            (guess.floor() as u64).min(cap)
        } else {
            0
        };
        while t > 0 && !fits(t) {
            t -= 1;
        }
        while t < cap && fits(t + 1) {
            t += 1;
        }
        t
    }

    fn advance(&mut self, inserted: u64) {
        self.count += inserted;
        self.since_compress += inserted;
        self.peak_entries = self.peak_entries.max(self.entries.len());
        if self.since_compress >= self.period {
            self.compress();
            self.since_compress = 0;
        }
    }

    /// Merges each triple into its right neighbour whenever the merged triple
    /// still fits the band. The first and last triples are never merged away.
    pub fn compress(&mut self) {
        let len = self.entries.len();
        if len < 3 {
            return;
        }
        let limit = self.band(self.count);
        let mut out = Vec::with_capacity(len);
        let mut right = self.entries[len - 1];
        for i in (1..len - 1).rev() {
            let e = self.entries[i];
            if e.g + right.g + right.delta <= limit {
                right.g += e.g;
            } else {
                out.push(right);
                right = e;
            }
        }
        out.push(right);
        out.push(self.entries[0]);
        out.reverse();
        self.entries = out;
    }

    /// Returns a stored value whose rank is within `ε·N` of `r`.
    pub fn query(&self, r: u64) -> Result<u64> {
        if self.entries.is_empty() {
            return Err(Error::EmptySummary);
        }
        if r == 0 || r > self.count {
            return Err(Error::InvalidParams(format!(
                "rank {r} outside [1, {}]",
                self.count
            )));
        }
        let slack = self.epsilon * self.count as f64;
        let mut rmin = 0u64;
        for (i, e) in self.entries.iter().enumerate() {
            rmin += e.g;
            if (rmin + e.delta) as f64 > r as f64 + slack {
                return Ok(self.entries[i.saturating_sub(1)].value);
            }
        }
        Ok(self.entries[self.entries.len() - 1].value)
    }

    /// Checks the band invariant on every stored triple.
    pub fn invariant_holds(&self) -> bool {
        let limit = self.band(self.count);
        self.entries.iter().map(|e| e.g).sum::<u64>() == self.count
            && self.entries.iter().all(|e| e.g + e.delta <= limit)
            && self.entries.windows(2).all(|w| w[0].value <= w[1].value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rank_range(sorted: &[u64], v: u64) -> (u64, u64) {
        let lo = sorted.partition_point(|&x| x < v) as u64 + 1;
        let hi = sorted.partition_point(|&x| x <= v) as u64;
        (lo, hi)
    }

    #[test]
    fn single_value() {
        let mut gk = GkSummary::new(0.1, 10).unwrap();
        gk.insert(7).unwrap();
        assert_eq!(gk.query(1), Ok(7));
    }

    #[test]
    fn empty_summary_errors() {
        let gk = GkSummary::new(0.1, 10).unwrap();
        assert_eq!(gk.query(1), Err(Error::EmptySummary));
    }

    #[test]
    fn sorted_input_median() {
        let mut gk = GkSummary::new(0.1, 100).unwrap();
        for v in 1..=100 {
            gk.insert(v).unwrap();
        }
        let m = gk.query(50).unwrap();
        assert!((40..=60).contains(&m), "median {m}");
        assert!(gk.invariant_holds());
    }

    #[test]
    fn ranks_within_epsilon_on_repetitive_input() {
        let mut gk = GkSummary::new(0.05, 10).unwrap();
        let mut seeds = crate::hash::SeedStream::new(42);
        let mut data = Vec::new();
        for _ in 0..1000 {
            let v = 1 + seeds.next_u64() % 10;
            data.push(v);
            gk.insert(v).unwrap();
            assert!(gk.invariant_holds());
        }
        data.sort_unstable();
        for r in 1..=1000u64 {
            let v = gk.query(r).unwrap();
            let (lo, hi) = rank_range(&data, v);
            assert!(
                lo <= r + 50 && hi + 50 >= r,
                "rank {r}: value {v} spans [{lo}, {hi}]"
            );
        }
    }

    #[test]
    fn weighted_insert_keeps_invariant() {
        let mut gk = GkSummary::new(0.02, 1000).unwrap();
        let mut data = Vec::new();
        let mut seeds = crate::hash::SeedStream::new(3);
        for _ in 0..300 {
            let v = 1 + seeds.next_u64() % 1000;
            let w = seeds.next_u64() % 200;
            gk.insert_many(v, w).unwrap();
            data.extend(std::iter::repeat_n(v, w as usize));
            assert!(gk.invariant_holds());
        }
        data.sort_unstable();
        let n = data.len() as u64;
        let slack = (0.02 * n as f64).floor() as u64;
        for r in (1..=n).step_by(97) {
            let v = gk.query(r).unwrap();
            let (lo, hi) = rank_range(&data, v);
            assert!(lo <= r + slack && hi + slack >= r);
        }
    }

    #[test]
    fn out_of_range_queries() {
        let mut gk = GkSummary::new(0.1, 10).unwrap();
        gk.insert(3).unwrap();
        assert!(gk.query(0).is_err());
        assert!(gk.query(2).is_err());
        assert!(gk.insert(11).is_err());
    }
}
