//! Seed derivation and k-wise independent hashing over the Mersenne field
//! `GF(2^61 − 1)`.

/// The Mersenne prime `2^61 − 1`.
pub const MERSENNE_61: u64 = (1 << 61) - 1;

/// One step of SplitMix64: returns the mixed output for state `x`.
#[inline]
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives the seed of child `index` from `master`.
#[inline]
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master) ^ index.wrapping_mul(0xd605_bbb5_8c8a_bbdb))
}

/// Deterministic stream of 64-bit words, used to draw hash coefficients.
#[derive(Debug, Clone)]
pub struct SeedStream {
    state: u64,
}

impl SeedStream {
    pub fn new(seed: u64) -> Self {
        SeedStream { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        splitmix64(self.state)
    }

    /// Uniform element of `[0, 2^61 − 1)`.
    pub fn next_field(&mut self) -> u64 {
        loop {
            let x = self.next_u64() >> 3;
            if x < MERSENNE_61 {
                return x;
            }
        }
    }
}

#[inline]
fn mod_mersenne(x: u128) -> u64 {
    const P: u128 = MERSENNE_61 as u128;
    // Two folds bring any u128 below 2^62, then at most one subtraction.
    let x = (x & P) + (x >> 61);
    let mut r = ((x & P) + (x >> 61)) as u64;
    if r >= MERSENNE_61 {
        r -= MERSENNE_61;
    }
    r
}

#[inline]
fn mul_mod(a: u64, b: u64) -> u64 {
    mod_mersenne(a as u128 * b as u128)
}

/// Random polynomial of degree `K − 1` over `GF(2^61 − 1)`, giving a
/// `K`-wise independent family on keys below the modulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyHash<const K: usize> {
    coeffs: [u64; K],
}

pub type PairwiseHash = PolyHash<2>;
pub type FourWiseHash = PolyHash<4>;

impl<const K: usize> PolyHash<K> {
    pub fn from_stream(seeds: &mut SeedStream) -> Self {
        let mut coeffs = [0u64; K];
        for c in coeffs.iter_mut() {
            *c = seeds.next_field();
        }
        // Leading coefficient nonzero keeps the degree exact.
        if K > 1 && coeffs[K - 1] == 0 {
            coeffs[K - 1] = 1;
        }
        PolyHash { coeffs }
    }

    pub fn new(seed: u64) -> Self {
        Self::from_stream(&mut SeedStream::new(seed))
    }

    /// Evaluates the polynomial at `key` (reduced into the field first).
    #[inline]
    pub fn hash(&self, key: u64) -> u64 {
        let x = mod_mersenne(key as u128);
        let mut acc = 0u64;
        for &c in self.coeffs.iter().rev() {
            acc = mod_mersenne(mul_mod(acc, x) as u128 + c as u128);
        }
        acc
    }

    /// `±1` from the low bit of the hash.
    #[inline]
    pub fn sign(&self, key: u64) -> f64 {
        sign_of(self.hash(key))
    }

    /// Same value as [`PolyHash::hash`], evaluated from precomputed
    /// [`key_powers`] so that many polynomials can share them.
    #[inline]
    pub fn hash_at(&self, powers: &[u64; K]) -> u64 {
        // Each product is below 2^122, so up to 64 of them fit before reducing.
        let acc = self
            .coeffs
            .iter()
            .zip(powers)
            .fold(0u128, |acc, (&c, &p)| acc + c as u128 * p as u128);
        mod_mersenne(acc)
    }

    #[inline]
    pub fn sign_at(&self, powers: &[u64; K]) -> f64 {
        sign_of(self.hash_at(powers))
    }
}

#[inline]
fn sign_of(h: u64) -> f64 {
    if h & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `[1, x, x², …, x^(K−1)]` in the field, for `x` the reduced key.
pub fn key_powers<const K: usize>(key: u64) -> [u64; K] {
    let x = mod_mersenne(key as u128);
    let mut powers = [1u64; K];
    for i in 1..K {
        powers[i] = mul_mod(powers[i - 1], x);
    }
    powers
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_matches_u128_remainder() {
        let mut s = SeedStream::new(11);
        for _ in 0..10_000 {
            let a = s.next_u64() as u128;
            let b = s.next_u64() as u128;
            let x = a * b;
            assert_eq!(mod_mersenne(x) as u128, x % MERSENNE_61 as u128);
        }
        assert_eq!(mod_mersenne(MERSENNE_61 as u128), 0);
        assert_eq!(mod_mersenne(u128::from(u64::MAX)), u64::MAX % MERSENNE_61);
    }

    #[test]
    fn shared_powers_match_horner() {
        let hashes: Vec<FourWiseHash> = (0..20).map(FourWiseHash::new).collect();
        for key in [0u64, 1, 99, MERSENNE_61, u64::MAX] {
            let powers = key_powers::<4>(key);
            for h in &hashes {
                assert_eq!(h.hash_at(&powers), h.hash(key));
            }
        }
    }

    #[test]
    fn horner_matches_direct_evaluation() {
        let h = FourWiseHash::new(5);
        let p = MERSENNE_61 as u128;
        for key in [0u64, 1, 2, 17, 1 << 40, u64::MAX] {
            let x = key as u128 % p;
            let mut expect = 0u128;
            let mut pow = 1u128;
            for &c in &h.coeffs {
                expect = (expect + c as u128 * pow) % p;
                pow = pow * x % p;
            }
            assert_eq!(h.hash(key) as u128, expect);
        }
    }

    #[test]
    fn signs_are_balanced() {
        let h = FourWiseHash::new(99);
        let total: f64 = (1..=20_000u64).map(|k| h.sign(k)).sum();
        // Standard deviation is about 141.
        assert!(total.abs() < 700.0, "sign imbalance {total}");
    }

    #[test]
    fn derived_seeds_differ() {
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|k| derive_seed(7, k)).collect();
        assert_eq!(seeds.len(), 1000);
    }
}
