//! `probstream`: generate probabilistic streams, aggregate them in one pass,
//! enumerate exact answers for small inputs, and sweep accuracy.

mod report;
mod sweep;

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use probstream::aggregates::{
    distinct_exact, repeat_rate_exact, AvgDp, AvgEstimator, CountSum, DistinctEstimator,
    MedianEstimator, RepeatRateEstimator,
};
use probstream::format::{read_stream, write_stream};
use probstream::generator::{generate, GenSpec, ValueSkew};
use probstream::oracle::enumerate;
use probstream::{ApproxParams, Error, ProbStream, Result};

use report::{Params, RunReport, Timing};
use sweep::{Sweep, SweepStat};

#[derive(Parser)]
#[command(
    name = "probstream",
    version,
    about = "Aggregates over probabilistic data streams"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded synthetic stream as JSON Lines.
    Gen(GenArgs),
    /// Compute aggregates in a single pass and print a JSON report.
    Agg(AggArgs),
    /// Enumerate every realization of a small stream and print exact values.
    Oracle(OracleArgs),
    /// Sweep parameters and print accuracy and space as CSV.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Skew {
    Uniform,
    Zipf,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = 1)]
    l: usize,
    /// Target average probability of the empty outcome per item.
    #[arg(long, default_value_t = 0.2)]
    bot_mass: f64,
    #[arg(long, value_enum, default_value_t = Skew::Uniform)]
    skew: Skew,
    /// Exponent for `--skew zipf`.
    #[arg(long, default_value_t = 1.0)]
    zipf_s: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Prepend a `{"n": N}` header line.
    #[arg(long)]
    header: bool,
    /// Output path, `-` for standard output.
    #[arg(short, long, default_value = "-")]
    output: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Stat {
    Count,
    Sum,
    Avg,
    Distinct,
    RepeatRate,
    Median,
    All,
}

#[derive(Args)]
struct AggArgs {
    /// Input stream, `-` for standard input.
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Stat::All)]
    stat: Stat,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Domain size; overrides a header line.
    #[arg(long)]
    n: Option<u64>,
    /// Use the exact references for AVG, DISTINCT and REPEAT-RATE.
    #[arg(long)]
    exact: bool,
    /// Upper bound on the stream length used to size the median.
    #[arg(long)]
    m_hint: Option<u64>,
    /// Add wall-clock timings to the report.
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct OracleArgs {
    input: PathBuf,
    #[arg(long)]
    n: Option<u64>,
    /// Also report the probability that every prefix count stays within `w`
    /// of its expectation.
    #[arg(long)]
    w: Option<f64>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "200")]
    m: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "100")]
    n: Vec<u64>,
    #[arg(long, value_delimiter = ',', default_value = "2")]
    l: Vec<usize>,
    #[arg(long, default_value_t = 0.2)]
    bot_mass: f64,
    #[arg(long, value_enum, default_value_t = Skew::Uniform)]
    skew: Skew,
    #[arg(long, default_value_t = 1.0)]
    zipf_s: f64,
    #[arg(long, value_delimiter = ',', default_value = "0.2")]
    epsilon: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.2")]
    delta: Vec<f64>,
    /// Algorithm seeds `0..seeds` per configuration.
    #[arg(long, default_value_t = 5)]
    seeds: u64,
    /// Seed of the generated stream, fixed across the sweep.
    #[arg(long, default_value_t = 1)]
    stream_seed: u64,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "distinct")]
    stat: Vec<SweepStat>,
    #[arg(short, long, default_value = "-")]
    output: PathBuf,
}

fn skew(kind: Skew, s: f64) -> ValueSkew {
    match kind {
        Skew::Uniform => ValueSkew::Uniform,
        Skew::Zipf => ValueSkew::Zipf(s),
    }
}

fn is_stdio(path: &Path) -> bool {
    path.as_os_str() == "-"
}

fn open_output(path: &Path) -> Result<Box<dyn Write>> {
    Ok(if is_stdio(path) {
        Box::new(BufWriter::new(io::stdout().lock()))
    } else {
        Box::new(BufWriter::new(File::create(path)?))
    })
}

fn load(path: &Path, n: Option<u64>) -> Result<ProbStream> {
    let reader: Box<dyn BufRead> = if is_stdio(path) {
        Box::new(io::stdin().lock())
    } else {
        let file = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Box::new(BufReader::new(file))
    };
    read_stream(reader, n)
}

fn cmd_gen(args: &GenArgs) -> Result<()> {
    let stream = generate(&GenSpec {
        m: args.m,
        n: args.n,
        l: args.l,
        bot_mass: args.bot_mass,
        skew: skew(args.skew, args.zipf_s),
        seed: args.seed,
    })?;
    let mut out = open_output(&args.output)?;
    write_stream(&mut out, &stream, args.header)?;
    out.flush()?;
    Ok(())
}

fn cmd_agg(args: &AggArgs) -> Result<RunReport> {
    let started = Instant::now();
    let stream = load(&args.input, args.n)?;
    let read_ms = started.elapsed().as_secs_f64() * 1e3;

    let wants = |s: Stat| args.stat == Stat::All || args.stat == s;
    let params = ApproxParams::new(args.epsilon, args.delta, args.seed)?;
    let m = stream.len() as u64;
    if let Some(hint) = args.m_hint {
        if hint < m {
            return Err(Error::InvalidParams(format!(
                "--m-hint {hint} is below the stream length {m}"
            )));
        }
    }
    if wants(Stat::Median) && is_stdio(&args.input) && args.m_hint.is_none() {
        return Err(Error::InvalidParams(
            "median over standard input needs --m-hint".into(),
        ));
    }
    let sketch_n = if (wants(Stat::Distinct) || wants(Stat::RepeatRate)) && !args.exact {
        Some(stream.explicit_n().ok_or(Error::DomainUnknown)?)
    } else {
        None
    };
    if m == 0 {
        if wants(Stat::Avg) {
            return Err(Error::UndefinedAverage);
        }
        if wants(Stat::Median) {
            return Err(Error::EmptyInducedStream);
        }
    }

    let mut report = RunReport::new(
        "agg",
        Params {
            epsilon: Some(args.epsilon),
            delta: Some(args.delta),
            seed: Some(args.seed),
            n: stream.n(),
            n_explicit: stream.explicit_n().is_some(),
            m,
            m_hint: args.m_hint,
            exact: args.exact,
            w: None,
        },
    );

    let pass_started = Instant::now();
    let mut totals = CountSum::new();
    let mut avg_est = match wants(Stat::Avg) && !args.exact {
        true => Some(AvgEstimator::new(args.epsilon, stream.n().max(1), m)?),
        false => None,
    };
    let mut avg_full = match wants(Stat::Avg) && args.exact {
        true => Some(AvgDp::<f64>::new(m as f64 + 1.0)?),
        false => None,
    };
    let mut distinct_est = match sketch_n.filter(|_| wants(Stat::Distinct)) {
        Some(n) => Some(DistinctEstimator::new(params, n)?),
        None => None,
    };
    let mut repeat_est = match sketch_n.filter(|_| wants(Stat::RepeatRate)) {
        Some(n) => Some(RepeatRateEstimator::new(params, n)?),
        None => None,
    };
    let mut median_est = match wants(Stat::Median) {
        true => Some(MedianEstimator::new(
            args.epsilon,
            args.m_hint.unwrap_or(m),
            stream.n().max(1),
        )?),
        false => None,
    };
    for item in stream.items() {
        totals.push(item);
        if let Some(e) = &mut avg_est {
            e.push(item)?;
        }
        if let Some(dp) = &mut avg_full {
            dp.push(item);
        }
        if let Some(e) = &mut distinct_est {
            e.push(item)?;
        }
        if let Some(e) = &mut repeat_est {
            e.push(item)?;
        }
        if let Some(e) = &mut median_est {
            e.push(item)?;
        }
    }

    if wants(Stat::Count) {
        report.count = Some(totals.count());
    }
    if wants(Stat::Sum) {
        report.sum = Some(totals.sum());
    }
    if let Some(e) = avg_est {
        let est = e.finish()?;
        report.avg = Some(est.value);
        report.avg_regime = Some(est.regime.as_str());
        report.state.dp_band_entries = Some(est.peak_band);
    }
    if let Some(dp) = avg_full {
        if totals.count() <= 0.0 {
            return Err(Error::UndefinedAverage);
        }
        report.avg = Some(dp.ratio_sum());
        report.avg_regime = Some("exact");
        report.state.dp_band_entries = Some(dp.peak_band());
    }
    if wants(Stat::Distinct) {
        match &distinct_est {
            Some(e) => {
                let est = e.finish();
                report.distinct = Some(est.value);
                report.distinct_variant = Some(est.variant.as_str());
                report.state.f0_entries = Some(est.sketch_entries);
                report.state.f0_estimators = Some(e.config().c1);
            }
            None => {
                report.distinct = Some(distinct_exact(&stream));
                report.distinct_variant = Some("exact");
            }
        }
    }
    if wants(Stat::RepeatRate) {
        match &repeat_est {
            Some(e) => {
                let est = e.finish();
                report.repeat_rate = Some(est.value);
                report.repeat_rate_variant = Some("sketch");
                report.state.f2_counters = Some(est.counters);
            }
            None => {
                report.repeat_rate = Some(repeat_rate_exact(&stream));
                report.repeat_rate_variant = Some("exact");
            }
        }
    }
    if let Some(e) = median_est {
        let est = e.finish()?;
        report.median = Some(est.value);
        report.state.gk_entries = Some(est.peak_entries);
        report.state.gk_induced_len = Some(est.induced_len);
    }
    if args.timing {
        report.timing = Some(Timing {
            read_ms,
            pass_ms: pass_started.elapsed().as_secs_f64() * 1e3,
        });
    }
    Ok(report)
}

fn cmd_oracle(args: &OracleArgs) -> Result<RunReport> {
    let stream = load(&args.input, args.n)?;
    let result = enumerate(&stream, args.w)?;
    let mut report = RunReport::new(
        "oracle",
        Params {
            n: stream.n(),
            n_explicit: stream.explicit_n().is_some(),
            m: stream.len() as u64,
            exact: true,
            w: args.w,
            ..Params::default()
        },
    );
    report.count = Some(result.count);
    report.sum = Some(result.sum);
    report.avg = result.avg;
    report.distinct = Some(result.distinct);
    report.repeat_rate = Some(result.repeat_rate);
    report.pr_band = result.pr_band;
    report.outcomes = Some(result.outcomes);
    Ok(report)
}

fn cmd_bench(args: &BenchArgs) -> Result<()> {
    let sweep = Sweep {
        m: args.m.clone(),
        n: args.n.clone(),
        l: args.l.clone(),
        bot_mass: args.bot_mass,
        skew: skew(args.skew, args.zipf_s),
        epsilon: args.epsilon.clone(),
        delta: args.delta.clone(),
        seeds: args.seeds,
        stream_seed: args.stream_seed,
        stats: args.stat.clone(),
    };
    let mut out = open_output(&args.output)?;
    sweep::run(&sweep, &mut out)?;
    out.flush()?;
    Ok(())
}

/// 3 for refusals (budget exceeded, undefined answers), 2 for everything else.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::EnumerationTooLarge { .. } | Error::UndefinedAverage | Error::EmptyInducedStream => {
            3
        }
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Agg(args) => cmd_agg(args).map(|r| println!("{}", r.to_json())),
        Command::Oracle(args) => cmd_oracle(args).map(|r| println!("{}", r.to_json())),
        Command::Bench(args) => cmd_bench(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
