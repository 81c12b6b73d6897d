//! Command-line front end. Exit codes: 0 success, 1 invalid input or a
//! failed validation, 2 I/O failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::csv::write_trials_csv;
use super::sweep::{run_sweep, SweepParameter, SweepSpec, DEFAULT_TRIALS};
use super::validate::run_checks;
use crate::error::{Error, Result};
use crate::frameworks::{run_framework, FrameworkKind};
use crate::model::{derive_seed, generate_realization, SystemConfig};
use crate::solver::SolveReport;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_IO: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "rsma-sim", version, about = "RSMA LEO downlink sum-rate simulator")]
struct Cli {
    /// Key-value scenario file; defaults apply to absent keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the scenario RNG seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Monte Carlo sweep written as an aggregate CSV table.
    Sweep(SweepArgs),
    /// Solves one realization and prints the report.
    Solve(SolveArgs),
    /// Runs the small-instance oracle checks.
    Validate,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, value_parser = parse_parameter)]
    sweep: SweepParameter,
    /// Comma-separated, strictly increasing values.
    #[arg(long, value_delimiter = ',', required = true)]
    grid: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    /// Comma-separated subset of proposed, benchmark1, benchmark2.
    #[arg(long, value_delimiter = ',', value_parser = parse_framework)]
    frameworks: Vec<FrameworkKind>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write one row per (grid value, trial, framework).
    #[arg(long)]
    trials_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// Trial index of the realization.
    #[arg(long, default_value_t = 0)]
    trial: u64,
    #[arg(long, default_value = "proposed", value_parser = parse_framework)]
    framework: FrameworkKind,
    /// Per-iteration multiplier trace CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
}

fn parse_parameter(s: &str) -> std::result::Result<SweepParameter, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_framework(s: &str) -> std::result::Result<FrameworkKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn base_config(cli: &Cli) -> Result<SystemConfig> {
    let mut cfg = match &cli.config {
        Some(path) => SystemConfig::from_file(path)?,
        None => SystemConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.rng_seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Human-readable, deterministic report text.
pub fn format_report(kind: FrameworkKind, cfg: &SystemConfig, trial: u64, report: &SolveReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "framework: {kind}");
    let _ = writeln!(s, "seed: {}  trial: {trial}", cfg.rng_seed);
    let _ = writeln!(s, "sum_rate_bps: {:.6}", report.sum_rate);
    let _ = writeln!(s, "iterations: {}", report.iterations);
    let _ = writeln!(s, "converged: {}", report.converged);
    let _ = writeln!(s, "infeasible: {}", report.infeasible);
    let r = &report.residuals;
    let _ = writeln!(
        s,
        "residuals: min_rate={:e} common_rate={:e} interference={:e} coefficient_budget={:e} total_power={:e}",
        r.min_rate, r.common_rate, r.interference, r.coefficient_budget, r.total_power
    );
    let a = &report.allocation;
    let (mc, uc, kc) = a.dims();
    for m in 0..mc {
        for k in 0..kc {
            let members = a.group_members(m, k);
            if members.is_empty() {
                continue;
            }
            let _ = writeln!(
                s,
                "beam {m} block {k}: power_w={:.9} common_coeff={:.9} common_rate_bps={:.6} users={:?}",
                a.beam_power[[m, k]],
                a.common_coeff[[m, k]],
                report.rates.common_rate[[m, k]],
                members
            );
        }
    }
    for u in 0..uc {
        let _ = writeln!(s, "user {u}: rate_bps={:.6}", report.rates.total_per_user[u]);
    }
    s
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let cfg = base_config(cli)?;
    let io = |e: std::io::Error| Error::io("<stdout>", e);
    match &cli.command {
        Command::Sweep(args) => {
            let mut spec = SweepSpec::new(args.sweep, args.grid.clone(), cfg);
            spec.trials = args.trials;
            if !args.frameworks.is_empty() {
                spec.frameworks = args.frameworks.clone();
            }
            spec.output = args.out.clone();
            let result = run_sweep(&spec)?;
            if let Some(path) = &args.trials_out {
                write_trials_csv(path, &result.trials)?;
            }
            if args.out.is_none() {
                out.write_all(super::csv::sweep_csv_string(&result).as_bytes())
                    .map_err(io)?;
            }
            for g in &result.gains {
                writeln!(
                    out,
                    "# gain {}={} proposed over {}: {:.4}%",
                    spec.parameter, g.param, g.benchmark, g.gain_percent
                )
                .map_err(io)?;
            }
            Ok(EXIT_OK)
        }
        Command::Solve(args) => {
            let real = generate_realization(&cfg, args.trial)?;
            let report = run_framework(args.framework, &real, &cfg, derive_seed(cfg.rng_seed, args.trial))?;
            if let Some(path) = &args.trace {
                report.write_trace(path)?;
            }
            out.write_all(format_report(args.framework, &cfg, args.trial, &report).as_bytes())
                .map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Validate => {
            let checks = run_checks(&cfg)?;
            let mut all = true;
            for c in &checks {
                all &= c.passed;
                writeln!(
                    out,
                    "{} {}: {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                )
                .map_err(io)?;
            }
            Ok(if all { EXIT_OK } else { EXIT_INVALID })
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn cli_main<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            if code == EXIT_OK {
                let _ = write!(out, "{e}");
            } else {
                let _ = write!(err, "{e}");
            }
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_io() {
                EXIT_IO
            } else {
                EXIT_INVALID
            }
        }
    }
}
