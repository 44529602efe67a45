//! Distinct-element counting by bucket sampling.
//!
//! Each repetition hashes coordinates to geometric levels and keeps the
//! coordinates whose level is at least the current sampling level, raising the
//! level whenever the kept set outgrows its capacity. A repetition estimates
//! `|kept|·2^level`; the sketch reports the median over repetitions.
//!
//! Until the first overflow every repetition keeps every coordinate, so the
//! repetitions are identical and are stored as one shared exact set. They are
//! split out (and their hash functions drawn) only when that set first
//! exceeds the capacity.

use std::collections::{HashMap, HashSet};

use crate::error::Result;
use crate::hash::{derive_seed, PairwiseHash, SeedStream};
use crate::model::{check_domain, check_unit_open};

/// Capacity constant: each repetition keeps at most `⌈C_CAP/ε²⌉` coordinates.
pub const C_CAP: f64 = 24.0;
/// Repetition constant: `⌈C_REP·ln(1/δ)⌉` repetitions, rounded up to odd.
pub const C_REP: f64 = 4.0;

const MAX_LEVEL: u32 = 61;

#[derive(Debug, Clone)]
struct Repetition {
    hash: PairwiseHash,
    level: u32,
    kept: HashMap<u64, u32>,
}

impl Repetition {
    fn level_of(&self, j: u64) -> u32 {
        self.hash.hash(j).trailing_zeros().min(MAX_LEVEL)
    }

    /// Inserts `j`; returns true if the sampling level moved.
    fn insert(&mut self, j: u64, capacity: usize) -> bool {
        let lv = self.level_of(j);
        if lv < self.level {
            return false;
        }
        self.kept.insert(j, lv);
        let mut moved = false;
        while self.kept.len() > capacity && self.level < MAX_LEVEL {
            self.level += 1;
            let level = self.level;
            self.kept.retain(|_, l| *l >= level);
            moved = true;
        }
        moved
    }

    fn estimate(&self) -> f64 {
        self.kept.len() as f64 * (self.level as f64).exp2()
    }
}

#[derive(Debug, Clone)]
enum State {
    Exact(HashSet<u64>),
    Sampled(Vec<Repetition>),
}

#[derive(Debug, Clone)]
pub struct F0Sketch {
    epsilon: f64,
    delta: f64,
    n: u64,
    seed: u64,
    capacity: usize,
    repetitions: usize,
    state: State,
    level_changes: u64,
}

impl F0Sketch {
    pub fn new(epsilon: f64, delta: f64, n: u64, seed: u64) -> Result<Self> {
        check_unit_open("epsilon", epsilon)?;
        check_unit_open("delta", delta)?;
        let capacity = (C_CAP / (epsilon * epsilon)).ceil() as usize;
        let mut repetitions = (C_REP * (1.0 / delta).ln()).ceil().max(1.0) as usize;
        if repetitions.is_multiple_of(2) {
            repetitions += 1;
        }
        Ok(F0Sketch {
            epsilon,
            delta,
            n,
            seed,
            capacity,
            repetitions,
            state: State::Exact(HashSet::new()),
            level_changes: 0,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Per-repetition cap on kept coordinates.
    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn repetitions(&self) -> usize {
        self.repetitions
    }

    pub fn insert(&mut self, j: u64) -> Result<()> {
        check_domain(j, self.n)?;
        match &mut self.state {
            State::Exact(set) => {
                set.insert(j);
                if set.len() > self.capacity {
                    let set = std::mem::take(set);
                    self.split(set);
                }
            }
            State::Sampled(reps) => {
                for rep in reps.iter_mut() {
                    if rep.insert(j, self.capacity) {
                        self.level_changes += 1;
                    }
                }
            }
        }
        Ok(())
    }

    fn split(&mut self, set: HashSet<u64>) {
        let mut reps = Vec::with_capacity(self.repetitions);
        for k in 0..self.repetitions {
            let mut seeds = SeedStream::new(derive_seed(self.seed, k as u64));
            let mut rep = Repetition {
                hash: PairwiseHash::from_stream(&mut seeds),
                level: 0,
                kept: HashMap::with_capacity(set.len()),
            };
            for &j in &set {
                let lv = rep.level_of(j);
                rep.kept.insert(j, lv);
            }
            while rep.kept.len() > self.capacity && rep.level < MAX_LEVEL {
                rep.level += 1;
                let level = rep.level;
                rep.kept.retain(|_, l| *l >= level);
                self.level_changes += 1;
            }
            reps.push(rep);
        }
        self.state = State::Sampled(reps);
    }

    pub fn estimate(&self) -> f64 {
        match &self.state {
            State::Exact(set) => set.len() as f64,
            State::Sampled(reps) => {
                let mut ests: Vec<f64> = reps.iter().map(Repetition::estimate).collect();
                median_in_place(&mut ests)
            }
        }
    }

    /// Whether sampling has engaged (the kept set has overflowed once).
    pub fn is_sampling(&self) -> bool {
        matches!(self.state, State::Sampled(_))
    }

    /// Number of times any repetition raised its sampling level.
    pub fn level_changes(&self) -> u64 {
        self.level_changes
    }

    /// Coordinates currently held across all repetitions.
    pub fn stored_entries(&self) -> usize {
        match &self.state {
            State::Exact(set) => set.len(),
            State::Sampled(reps) => reps.iter().map(|r| r.kept.len()).sum(),
        }
    }

    /// Largest kept set of any single repetition.
    pub fn max_repetition_entries(&self) -> usize {
        match &self.state {
            State::Exact(set) => set.len(),
            State::Sampled(reps) => reps.iter().map(|r| r.kept.len()).max().unwrap_or(0),
        }
    }
}

pub(crate) fn median_in_place(xs: &mut [f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.sort_by(f64::total_cmp);
    let mid = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[mid]
    } else {
        0.5 * (xs[mid - 1] + xs[mid])
    }
}
