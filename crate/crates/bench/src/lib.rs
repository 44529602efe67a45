//! Fixtures shared by the criterion benchmarks in `benches/`.

use probstream::generator::{generate, GenSpec, ValueSkew};
use probstream::ProbStream;

/// A seeded stream with `m` items of `l` tuples over `[1, n]` and 30% ⊥ mass.
pub fn fixture(m: usize, n: u64, l: usize) -> ProbStream {
    generate(&GenSpec {
        m,
        n,
        l,
        bot_mass: 0.3,
        skew: ValueSkew::Uniform,
        seed: 42,
    })
    .expect("fixture spec is feasible")
}
