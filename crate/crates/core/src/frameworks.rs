//! The proposed scheme and the two benchmarks, each a composition of an
//! assignment rule and the solver.

use std::fmt;
use std::str::FromStr;

use ndarray::Array2;

use crate::assignment::{greedy_assign, random_assign};
use crate::error::{Error, Result};
use crate::model::{ChannelRealization, SystemConfig};
use crate::solver::{solve, solve_with, SolveOptions, SolveReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FrameworkKind {
    /// Greedy assignment, every variable optimized.
    Proposed,
    /// Greedy assignment, equal fixed beam powers.
    Benchmark1,
    /// Random assignment, every variable optimized.
    Benchmark2,
}

impl FrameworkKind {
    pub const ALL: [FrameworkKind; 3] = [
        FrameworkKind::Proposed,
        FrameworkKind::Benchmark1,
        FrameworkKind::Benchmark2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FrameworkKind::Proposed => "proposed",
            FrameworkKind::Benchmark1 => "benchmark1",
            FrameworkKind::Benchmark2 => "benchmark2",
        }
    }
}

impl fmt::Display for FrameworkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FrameworkKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "proposed" => Ok(FrameworkKind::Proposed),
            "benchmark1" | "b1" | "equal_power" => Ok(FrameworkKind::Benchmark1),
            "benchmark2" | "b2" | "random_assign" => Ok(FrameworkKind::Benchmark2),
            other => Err(Error::config(format!("unknown framework '{other}'"))),
        }
    }
}

pub fn run_proposed(real: &ChannelRealization, cfg: &SystemConfig) -> Result<SolveReport> {
    solve(real, &greedy_assign(real, cfg).x, cfg)
}

/// `p_{m,k} = min(I_th / f_{m,k}, P_tot / (M K))` for every (beam, block).
pub fn equal_beam_powers(real: &ChannelRealization, cfg: &SystemConfig) -> Array2<f64> {
    let share = cfg.total_power / (cfg.num_beams * cfg.num_resource_blocks) as f64;
    real.leo_to_geo.mapv(|f| {
        if f > 0.0 {
            (cfg.interference_threshold / f).min(share)
        } else {
            share
        }
    })
}

pub fn run_benchmark1(real: &ChannelRealization, cfg: &SystemConfig) -> Result<SolveReport> {
    let options = SolveOptions {
        fixed_power: Some(equal_beam_powers(real, cfg)),
    };
    solve_with(real, &greedy_assign(real, cfg).x, cfg, &options)
}

pub fn run_benchmark2(real: &ChannelRealization, cfg: &SystemConfig, seed: u64) -> Result<SolveReport> {
    solve(real, &random_assign(cfg, seed).x, cfg)
}

pub fn run_framework(
    kind: FrameworkKind,
    real: &ChannelRealization,
    cfg: &SystemConfig,
    seed: u64,
) -> Result<SolveReport> {
    match kind {
        FrameworkKind::Proposed => run_proposed(real, cfg),
        FrameworkKind::Benchmark1 => run_benchmark1(real, cfg),
        FrameworkKind::Benchmark2 => run_benchmark2(real, cfg, seed),
    }
}

/// `(proposed - benchmark) * 100 / benchmark`.
pub fn percentage_gain(rate_proposed: f64, rate_benchmark: f64) -> Result<f64> {
    if !(rate_benchmark > 0.0) {
        return Err(Error::UndefinedGain(rate_benchmark));
    }
    Ok((rate_proposed - rate_benchmark) * 100.0 / rate_benchmark)
}

pub const REPORT_HEADER: &str = "framework,seed,total_power_w,interference_threshold_w,num_beams,num_blocks,sum_rate_bps,iterations,converged,max_residual";

/// One CSV row summarizing a run.
pub fn report_row(kind: FrameworkKind, seed: u64, cfg: &SystemConfig, report: &SolveReport) -> String {
    format!(
        "{},{},{},{},{},{},{:.6},{},{},{:e}",
        kind,
        seed,
        cfg.total_power,
        cfg.interference_threshold,
        cfg.num_beams,
        cfg.num_resource_blocks,
        report.sum_rate,
        report.iterations,
        report.converged,
        report.residuals.max()
    )
}
