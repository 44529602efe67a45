use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_probstream"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_writes_requested_items_reproducibly() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    for p in [&a, &b] {
        let out = run(&[
            "gen",
            "--m",
            "100",
            "--n",
            "50",
            "--l",
            "2",
            "--seed",
            "7",
            "-o",
            s(p),
        ]);
        assert!(out.status.success());
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text.lines().count(), 100);
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    // Every generated line parses back.
    let report = json(&run(&["agg", "--stat", "count", s(&a)]));
    assert_eq!(report["params"]["m"], 100);
}

#[test]
fn gen_rejects_infeasible_spec() {
    let out = run(&["gen", "--m", "4", "--l", "5", "--n", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("infeasible"));
}

#[test]
fn agg_count_of_certain_items() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "c.jsonl", "[[1,1.0]]\n[[1,1.0]]\n[[1,1.0]]\n");
    let r = json(&run(&["agg", "--stat", "count", s(&f)]));
    assert_eq!(r["count"], 3.0);
    assert!(r.get("sum").is_none());
}

#[test]
fn agg_avg_uses_dp_on_two_item_example() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "t.jsonl", "[[1,1.0]]\n[[3,0.5]]\n");
    let r = json(&run(&["agg", "--stat", "avg", "--epsilon", "0.1", s(&f)]));
    assert_eq!(r["avg"], 1.5);
    assert_eq!(r["avg_regime"], "dp");
}

#[test]
fn agg_median_of_one_two_three() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "d.jsonl", "[[1,1.0]]\n[[2,1.0]]\n[[3,1.0]]\n");
    let r = json(&run(&[
        "agg",
        "--stat",
        "median",
        "--epsilon",
        "0.1",
        "--m-hint",
        "3",
        s(&f),
    ]));
    assert_eq!(r["median"], 2);
}

#[test]
fn sketches_need_a_domain() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "t.jsonl", "[[1,1.0]]\n[[3,0.5]]\n");
    for stat in ["distinct", "repeat-rate", "all"] {
        let out = run(&["agg", "--stat", stat, s(&f)]);
        assert_eq!(out.status.code(), Some(2), "{stat}");
    }
    let r = json(&run(&["agg", "--stat", "distinct", "--n", "3", s(&f)]));
    assert_eq!(r["distinct_variant"], "estimators");
    let r = json(&run(&["agg", "--stat", "distinct", "--exact", s(&f)]));
    assert_eq!(r["distinct"], 1.5);
}

#[test]
fn parse_errors_report_line_numbers() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "bad.jsonl", "[[1,0.5]]\n[[2,0.7],[3,0.6]]\n");
    let out = run(&["agg", "--stat", "count", s(&f)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn stdin_input_and_median_hint() {
    let input = "[[1,1.0]]\n[[2,1.0]]\n[[3,1.0]]\n";
    let r = json(&run_stdin(&["agg", "--stat", "sum", "-"], input));
    assert_eq!(r["sum"], 6.0);
    let out = run_stdin(&["agg", "--stat", "median", "-"], input);
    assert_eq!(out.status.code(), Some(2));
    let r = json(&run_stdin(
        &["agg", "--stat", "median", "--m-hint", "10", "-"],
        input,
    ));
    assert_eq!(r["median"], 2);
    let out = run_stdin(&["agg", "--stat", "median", "--m-hint", "2", "-"], input);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn refusals_exit_with_three() {
    let dir = TempDir::new().unwrap();
    let bot = write(&dir, "bot.jsonl", "[]\n[]\n");
    assert_eq!(
        run(&["agg", "--stat", "avg", s(&bot)]).status.code(),
        Some(3)
    );
    let tiny = write(&dir, "tiny.jsonl", "[[4,0.01]]\n");
    assert_eq!(
        run(&["agg", "--stat", "median", s(&tiny)]).status.code(),
        Some(3)
    );
    let line = "[[1,0.3],[2,0.3]]\n";
    let big = write(&dir, "big.jsonl", &line.repeat(30));
    assert_eq!(run(&["oracle", s(&big)]).status.code(), Some(3));
}

#[test]
fn oracle_on_two_item_example() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "t.jsonl", "[[1,1.0]]\n[[3,0.5]]\n");
    let r = json(&run(&["oracle", s(&f)]));
    assert_eq!(r["avg"], 1.5);
    assert_eq!(r["distinct"], 1.5);
    assert_eq!(r["count"], 1.5);
    let r = json(&run(&["oracle", "--w", "0.4", s(&f)]));
    assert!(r["pr_band"].as_f64().unwrap() < 1.0);
}

#[test]
fn exact_agg_matches_oracle() {
    let dir = TempDir::new().unwrap();
    for seed in 0..8 {
        let f = dir.path().join(format!("g{seed}.jsonl"));
        let seed = seed.to_string();
        let out = run(&[
            "gen",
            "--m",
            "7",
            "--n",
            "9",
            "--l",
            "2",
            "--bot-mass",
            "0.4",
            "--seed",
            &seed,
            "--header",
            "-o",
            s(&f),
        ]);
        assert!(out.status.success());
        let exact = json(&run(&["agg", "--exact", "--stat", "all", s(&f)]));
        let oracle = json(&run(&["oracle", s(&f)]));
        for key in ["count", "sum", "avg", "distinct", "repeat_rate"] {
            let (a, b) = (exact[key].as_f64().unwrap(), oracle[key].as_f64().unwrap());
            assert!((a - b).abs() <= 1e-9, "{key}: {a} vs {b}");
        }
    }
}

#[test]
fn timing_is_opt_in() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "t.jsonl", "[[1,1.0]]\n[[3,0.5]]\n");
    let plain = json(&run(&["agg", "--stat", "count", s(&f)]));
    assert!(plain.get("timing").is_none());
    let timed = json(&run(&["agg", "--stat", "count", "--timing", s(&f)]));
    assert!(timed["timing"]["pass_ms"].as_f64().is_some());
}

fn csv_rows(out: &Output) -> Vec<Vec<String>> {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

fn column(rows: &[Vec<String>], name: &str) -> usize {
    rows[0].iter().position(|c| c == name).unwrap()
}

#[test]
fn bench_rows_per_config_and_seed() {
    let rows = csv_rows(&run(&[
        "bench",
        "--m",
        "40",
        "--epsilon",
        "0.1,0.2,0.4",
        "--seeds",
        "3",
        "--stat",
        "repeat-rate",
    ]));
    assert_eq!(rows.len() - 1, 9);
}

#[test]
fn bench_repeat_rate_error_shrinks_with_epsilon() {
    let rows = csv_rows(&run(&[
        "bench",
        "--m",
        "60",
        "--n",
        "30",
        "--epsilon",
        "0.1,0.4",
        "--delta",
        "0.2",
        "--seeds",
        "15",
        "--stat",
        "repeat-rate",
    ]));
    let (eps, err) = (column(&rows, "epsilon"), column(&rows, "rel_error"));
    let median_error = |target: &str| {
        let mut e: Vec<f64> = rows[1..]
            .iter()
            .filter(|r| r[eps] == target)
            .map(|r| r[err].parse().unwrap())
            .collect();
        e.sort_by(f64::total_cmp);
        e[e.len() / 2]
    };
    assert!(median_error("0.1") < median_error("0.4"));
}

#[test]
fn bench_distinct_failures_within_delta() {
    let seeds = 20.0;
    let delta: f64 = 0.3;
    let rows = csv_rows(&run(&[
        "bench",
        "--m",
        "30",
        "--n",
        "40",
        "--epsilon",
        "0.3",
        "--delta",
        "0.3",
        "--seeds",
        "20",
        "--stat",
        "distinct",
    ]));
    let failed = column(&rows, "failed");
    let fails = rows[1..].iter().filter(|r| r[failed] == "true").count() as f64;
    assert!(fails / seeds <= delta + 2.0 * (delta * (1.0 - delta) / seeds).sqrt());
}
