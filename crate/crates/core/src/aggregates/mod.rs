//! Single-pass estimators for the six aggregates.
//!
//! Each aggregate is available both as a push-style estimator (feed items one
//! at a time, then `finish`) and as a convenience function over an in-memory
//! [`ProbStream`](crate::ProbStream).

mod avg;
mod basic;
mod distinct;
mod median;
mod repeat_rate;

pub use avg::{avg, avg_dp, AvgConfig, AvgDp, AvgEstimate, AvgEstimator, AvgRegime, DpScalar};
pub use basic::{count, sum, CountSum};
pub use distinct::{
    distinct_estimate, distinct_exact, DistinctConfig, DistinctEstimate, DistinctEstimator,
    DistinctVariant,
};
pub use median::{
    check_approx_median, median, median_with_m_hint, MedianEstimate, MedianEstimator, RankMasses,
};
pub use repeat_rate::{repeat_rate, repeat_rate_exact, RepeatRateEstimate, RepeatRateEstimator};
