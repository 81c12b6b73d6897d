use std::path::PathBuf;

use rsma_core::experiment::cli::{cli_main, EXIT_INVALID, EXIT_IO, EXIT_OK};
use rsma_core::experiment::csv::{parse_sweep_csv, read_sweep_csv};
use rsma_core::frameworks::{run_framework, FrameworkKind};
use rsma_core::model::{derive_seed, generate_realization, SystemConfig};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli_main(
        std::iter::once("rsma-sim").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn tmp(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--help"]).0, EXIT_OK);
    assert_eq!(run(&["bogus"]).0, EXIT_INVALID);
    assert_eq!(run(&["sweep", "--sweep", "nope", "--grid", "1"]).0, EXIT_INVALID);
    assert_eq!(run(&["sweep", "--sweep", "ptot", "--grid", "30,20"]).0, EXIT_INVALID);
    let (code, _, err) = run(&["--config", "/no/such/file.cfg", "validate"]);
    assert_eq!(code, EXIT_IO);
    assert!(err.contains("error"));
    let bad = tmp("bad.cfg");
    std::fs::write(&bad, "total_power_w = -3\n").unwrap();
    assert_eq!(run(&["--config", bad.to_str().unwrap(), "validate"]).0, EXIT_INVALID);
    let dir = tmp("missing_dir/out.csv");
    let _ = std::fs::remove_dir_all(dir.parent().unwrap());
    let (code, _, _) = run(&[
        "sweep",
        "--sweep",
        "ptot",
        "--grid",
        "20",
        "--trials",
        "1",
        "--frameworks",
        "benchmark1",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_IO);
}

#[test]
fn validate_passes_at_defaults() {
    let (code, out, _) = run(&["validate"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.lines().all(|l| l.starts_with("PASS")), "{out}");
}

#[test]
fn solve_report_matches_library_and_repeats() {
    let args = ["--seed", "5", "solve", "--trial", "1", "--framework", "benchmark1"];
    let (code, a, _) = run(&args);
    assert_eq!(code, EXIT_OK);
    assert_eq!(a, run(&args).1);
    let mut cfg = SystemConfig::default();
    cfg.rng_seed = 5;
    let real = generate_realization(&cfg, 1).unwrap();
    let r = run_framework(FrameworkKind::Benchmark1, &real, &cfg, derive_seed(5, 1)).unwrap();
    assert!(a.contains(&format!("sum_rate_bps: {:.6}", r.sum_rate)), "{a}");
}

#[test]
fn sweep_writes_table_and_config_overrides_apply() {
    let cfg_path = tmp("small.cfg");
    std::fs::write(&cfg_path, "num_beams = 2\nnum_resource_blocks = 2\n").unwrap();
    let out = tmp("sweep.csv");
    let (code, stdout, _) = run(&[
        "--config",
        cfg_path.to_str().unwrap(),
        "sweep",
        "--sweep",
        "ith",
        "--grid",
        "1,3",
        "--trials",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    let rows = read_sweep_csv(&out).unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r.mean_sum_rate > 0.0 && r.stderr >= 0.0));
    assert_eq!(stdout.lines().filter(|l| l.starts_with("# gain")).count(), 4);

    let (code, stdout, _) = run(&[
        "--config",
        cfg_path.to_str().unwrap(),
        "sweep",
        "--sweep",
        "ith",
        "--grid",
        "1,3",
        "--trials",
        "3",
    ]);
    assert_eq!(code, EXIT_OK);
    let table: String = stdout
        .lines()
        .filter(|l| !l.starts_with("# gain"))
        .map(|l| format!("{l}\n"))
        .collect();
    assert_eq!(parse_sweep_csv(&table).unwrap(), rows);
}

#[test]
fn proposed_dominates_on_shared_realizations() {
    let cfg = SystemConfig::default();
    for trial in 0..8 {
        let real = generate_realization(&cfg, trial).unwrap();
        let seed = derive_seed(cfg.rng_seed, trial);
        let rate = |k| run_framework(k, &real, &cfg, seed).unwrap().sum_rate;
        let p = rate(FrameworkKind::Proposed);
        for k in [FrameworkKind::Benchmark1, FrameworkKind::Benchmark2] {
            assert!(p >= rate(k) - 0.01 * p, "trial {trial} {k}");
        }
    }
}

#[test]
fn benchmark1_respects_interference_exactly() {
    let cfg = SystemConfig::default();
    let real = generate_realization(&cfg, 4).unwrap();
    let r = run_framework(FrameworkKind::Benchmark1, &real, &cfg, 0).unwrap();
    for ((m, k), &p) in r.allocation.beam_power.indexed_iter() {
        assert!(real.leo_to_geo[[m, k]] * p <= cfg.interference_threshold);
    }
}
