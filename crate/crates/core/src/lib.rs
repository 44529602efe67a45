//! Single-pass aggregation over probabilistic streams.
//!
//! A probabilistic stream is a sequence of independent items, each a small
//! discrete distribution over the domain `[1, n]` plus an implicit "no
//! element" outcome (written ⊥ throughout). Every realization of the stream
//! is an ordinary deterministic stream, and the aggregates here are
//! expectations over those realizations:
//!
//! | aggregate     | algorithm                                      | guarantee   |
//! |---------------|------------------------------------------------|-------------|
//! | COUNT, SUM    | closed form                                    | exact       |
//! | AVG           | SUM/COUNT for long streams, banded DP otherwise | (ε, 0)      |
//! | DISTINCT      | averaged F₀ sketches over random instantiations | (ε, δ)      |
//! | REPEAT-RATE   | F₂ sketch of expected frequencies + exact term | (ε, δ)      |
//! | MEDIAN        | quantile summary over a scaled induced stream  | ε-approx.   |
//!
//! The [`oracle`] module enumerates every realization of a small stream and is
//! used as ground truth throughout the test suites.
//!
//! ```
//! use probstream::{aggregates, ProbItem, ProbStream};
//!
//! let stream = ProbStream::new(vec![
//!     ProbItem::new(vec![(1, 1.0)]).unwrap(),
//!     ProbItem::new(vec![(3, 0.5)]).unwrap(),
//! ])
//! .unwrap();
//!
//! assert_eq!(aggregates::count(&stream), 1.5);
//! assert_eq!(aggregates::sum(&stream), 2.5);
//! let avg = aggregates::avg(&stream, 0.1).unwrap();
//! assert!((avg.value - 1.5).abs() < 1e-12);
//! ```

pub mod aggregates;
pub mod error;
pub mod format;
pub mod generator;
pub mod hash;
pub mod model;
pub mod oracle;
pub mod sketches;

pub use error::{Error, Result};
pub use model::{ApproxParams, ProbItem, ProbStream, ProbTuple, TOL_PARSE};
