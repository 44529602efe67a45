//! Deterministic-stream summaries used as subroutines by the aggregates.

mod f0;
mod f2;
mod gk;

pub use f0::F0Sketch;
pub use f2::F2Sketch;
pub use gk::{GkEntry, GkSummary};

pub mod constants {
    pub use super::f0::{C_CAP as F0_CAPACITY, C_REP as F0_REPETITIONS};
    pub use super::f2::{C_AMS, C_MED};
}
