//! Accuracy and space sweeps emitted as CSV.

use std::io::Write;

use probstream::aggregates::{
    avg, avg_dp, check_approx_median, distinct_estimate, distinct_exact, median, repeat_rate,
    repeat_rate_exact,
};
use probstream::generator::{generate, GenSpec, ValueSkew};
use probstream::{ApproxParams, Error, ProbStream, Result};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepStat {
    Avg,
    Distinct,
    RepeatRate,
    Median,
}

impl SweepStat {
    fn name(self) -> &'static str {
        match self {
            SweepStat::Avg => "avg",
            SweepStat::Distinct => "distinct",
            SweepStat::RepeatRate => "repeat_rate",
            SweepStat::Median => "median",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Sweep {
    pub m: Vec<usize>,
    pub n: Vec<u64>,
    pub l: Vec<usize>,
    pub bot_mass: f64,
    pub skew: ValueSkew,
    pub epsilon: Vec<f64>,
    pub delta: Vec<f64>,
    pub seeds: u64,
    pub stream_seed: u64,
    pub stats: Vec<SweepStat>,
}

#[derive(Debug, Serialize)]
struct Row {
    stat: &'static str,
    m: usize,
    n: u64,
    l: usize,
    bot_mass: f64,
    epsilon: f64,
    delta: f64,
    seed: u64,
    estimate: f64,
    exact: Option<f64>,
    rel_error: Option<f64>,
    failed: bool,
    variant: &'static str,
    state_entries: usize,
}

struct References {
    avg: Option<f64>,
    distinct: f64,
    repeat_rate: f64,
}

impl References {
    fn of(stream: &ProbStream) -> Result<Self> {
        let avg = match avg_dp(stream, stream.len() as f64 + 1.0) {
            Ok(dp) => Some(dp.ratio_sum()),
            Err(_) => None,
        };
        Ok(References {
            avg,
            distinct: distinct_exact(stream),
            repeat_rate: repeat_rate_exact(stream),
        })
    }
}

fn relative(estimate: f64, exact: f64) -> f64 {
    if exact == 0.0 {
        estimate.abs()
    } else {
        (estimate - exact).abs() / exact
    }
}

pub fn run<W: Write>(sweep: &Sweep, out: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    for &m in &sweep.m {
        for &n in &sweep.n {
            for &l in &sweep.l {
                let stream = generate(&GenSpec {
                    m,
                    n,
                    l,
                    bot_mass: sweep.bot_mass,
                    skew: sweep.skew,
                    seed: sweep.stream_seed,
                })?;
                let refs = References::of(&stream)?;
                for &epsilon in &sweep.epsilon {
                    for &delta in &sweep.delta {
                        for seed in 0..sweep.seeds {
                            for &stat in &sweep.stats {
                                let params = ApproxParams::new(epsilon, delta, seed)?;
                                let row = cell(&stream, &refs, stat, params)?;
                                csv.serialize(Row {
                                    m,
                                    n,
                                    l,
                                    bot_mass: sweep.bot_mass,
                                    epsilon,
                                    delta,
                                    seed,
                                    ..row
                                })
                                .map_err(io)?;
                            }
                        }
                    }
                }
            }
        }
    }
    csv.flush()?;
    Ok(())
}

fn cell(
    stream: &ProbStream,
    refs: &References,
    stat: SweepStat,
    params: ApproxParams,
) -> Result<Row> {
    let eps = params.epsilon;
    let scored = |estimate: f64, exact: f64, variant, state_entries| {
        let rel = relative(estimate, exact);
        (
            estimate,
            Some(exact),
            Some(rel),
            rel > eps,
            variant,
            state_entries,
        )
    };
    let (estimate, exact, rel_error, failed, variant, state_entries) = match stat {
        SweepStat::Avg => {
            let est = avg(stream, eps)?;
            match refs.avg {
                Some(exact) => scored(est.value, exact, est.regime.as_str(), est.peak_band),
                None => (
                    est.value,
                    None,
                    None,
                    false,
                    est.regime.as_str(),
                    est.peak_band,
                ),
            }
        }
        SweepStat::Distinct => {
            let est = distinct_estimate(stream, params)?;
            scored(
                est.value,
                refs.distinct,
                est.variant.as_str(),
                est.sketch_entries,
            )
        }
        SweepStat::RepeatRate => {
            let est = repeat_rate(stream, params)?;
            scored(est.value, refs.repeat_rate, "sketch", est.counters)
        }
        SweepStat::Median => {
            let est = median(stream, eps)?;
            let ok = check_approx_median(stream, est.value, eps);
            (est.value as f64, None, None, !ok, "gk", est.peak_entries)
        }
    };
    Ok(Row {
        stat: stat.name(),
        m: 0,
        n: 0,
        l: 0,
        bot_mass: 0.0,
        epsilon: eps,
        delta: params.delta,
        seed: params.seed,
        estimate,
        exact,
        rel_error,
        failed,
        variant,
        state_entries,
    })
}
