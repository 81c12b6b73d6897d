//! Paired Monte Carlo sweeps over total power, interference threshold or
//! beam count.
//!
//! Trial `t` at every grid point draws its channel from `(rng_seed, t)`, and
//! every framework of that trial sees the same realization. During a beam
//! sweep the scenario is rescaled to `K = M` blocks and `U = 2M` users.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::frameworks::{percentage_gain, run_framework, FrameworkKind};
use crate::model::{derive_seed, generate_realization, SystemConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParameter {
    TotalPower,
    InterferenceThreshold,
    Beams,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::TotalPower => "ptot",
            SweepParameter::InterferenceThreshold => "ith",
            SweepParameter::Beams => "beams",
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ptot" => Ok(SweepParameter::TotalPower),
            "ith" => Ok(SweepParameter::InterferenceThreshold),
            "beams" => Ok(SweepParameter::Beams),
            other => Err(Error::config(format!(
                "unknown sweep parameter '{other}' (expected ptot, ith or beams)"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub grid: Vec<f64>,
    pub trials: usize,
    pub frameworks: Vec<FrameworkKind>,
    pub base: SystemConfig,
    pub output: Option<PathBuf>,
}

pub const DEFAULT_TRIALS: usize = 50;

impl SweepSpec {
    pub fn new(parameter: SweepParameter, grid: Vec<f64>, base: SystemConfig) -> Self {
        SweepSpec {
            parameter,
            grid,
            trials: DEFAULT_TRIALS,
            frameworks: FrameworkKind::ALL.to_vec(),
            base,
            output: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::config("sweep grid is empty"));
        }
        if self.grid.iter().any(|v| !v.is_finite()) || self.grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config("sweep grid must be finite and strictly increasing"));
        }
        if self.parameter == SweepParameter::Beams && self.grid.iter().any(|&v| v < 1.0 || v.fract() != 0.0) {
            return Err(Error::config("beam counts must be positive integers"));
        }
        if self.trials == 0 {
            return Err(Error::config("at least one trial is required"));
        }
        if self.frameworks.is_empty() {
            return Err(Error::config("no frameworks selected"));
        }
        for &v in &self.grid {
            self.config_at(v).validate()?;
        }
        Ok(())
    }

    /// Scenario at grid value `value`.
    pub fn config_at(&self, value: f64) -> SystemConfig {
        let mut cfg = self.base.clone();
        match self.parameter {
            SweepParameter::TotalPower => cfg.total_power = value,
            SweepParameter::InterferenceThreshold => cfg.interference_threshold = value,
            SweepParameter::Beams => cfg = cfg.scaled_to_beams(value as usize),
        }
        cfg
    }
}

/// Outcome of one framework on one trial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialRecord {
    pub param: f64,
    pub trial: usize,
    pub framework: FrameworkKind,
    pub sum_rate: f64,
    pub iterations: usize,
    pub converged: bool,
    pub max_residual: f64,
}

/// Aggregate of one (grid value, framework) cell.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub param: f64,
    pub framework: FrameworkKind,
    pub mean_sum_rate: f64,
    pub stderr: f64,
    pub mean_iterations: f64,
    pub converged_fraction: f64,
}

/// `(param, benchmark, mean gain of proposed over it in percent)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GainRow {
    pub param: f64,
    pub benchmark: FrameworkKind,
    pub gain_percent: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub parameter: SweepParameter,
    pub rows: Vec<SweepRow>,
    pub gains: Vec<GainRow>,
    pub trials: Vec<TrialRecord>,
}

impl SweepResult {
    pub fn row(&self, param: f64, framework: FrameworkKind) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.param == param && r.framework == framework)
    }
}

/// Sample mean and standard error of the mean (0 for a single sample).
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn aggregate(param: f64, framework: FrameworkKind, records: &[TrialRecord]) -> SweepRow {
    let mine: Vec<&TrialRecord> = records
        .iter()
        .filter(|r| r.param == param && r.framework == framework)
        .collect();
    let rates: Vec<f64> = mine.iter().map(|r| r.sum_rate).collect();
    let (mean, stderr) = mean_and_stderr(&rates);
    let n = mine.len() as f64;
    SweepRow {
        param,
        framework,
        mean_sum_rate: mean,
        stderr,
        mean_iterations: mine.iter().map(|r| r.iterations as f64).sum::<f64>() / n,
        converged_fraction: mine.iter().filter(|r| r.converged).count() as f64 / n,
    }
}

/// Runs every framework on one trial of one scenario.
pub fn run_trial(
    cfg: &SystemConfig,
    param: f64,
    trial: usize,
    frameworks: &[FrameworkKind],
) -> Result<Vec<TrialRecord>> {
    let real = generate_realization(cfg, trial as u64)?;
    let seed = derive_seed(cfg.rng_seed, trial as u64);
    frameworks
        .iter()
        .map(|&kind| {
            let report = run_framework(kind, &real, cfg, seed)?;
            Ok(TrialRecord {
                param,
                trial,
                framework: kind,
                sum_rate: report.sum_rate,
                iterations: report.iterations,
                converged: report.converged,
                max_residual: report.residuals.max(),
            })
        })
        .collect()
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let mut records = Vec::with_capacity(spec.grid.len() * spec.trials * spec.frameworks.len());
    for &value in &spec.grid {
        let cfg = spec.config_at(value);
        let per_trial: Vec<Vec<TrialRecord>> = (0..spec.trials)
            .into_par_iter()
            .map(|t| run_trial(&cfg, value, t, &spec.frameworks))
            .collect::<Result<_>>()?;
        records.extend(per_trial.into_iter().flatten());
    }
    let mut rows = Vec::new();
    let mut gains = Vec::new();
    for &value in &spec.grid {
        for &kind in &spec.frameworks {
            rows.push(aggregate(value, kind, &records));
        }
        let proposed = rows
            .iter()
            .find(|r| r.param == value && r.framework == FrameworkKind::Proposed);
        if let Some(p) = proposed {
            for r in rows
                .iter()
                .filter(|r| r.param == value && r.framework != FrameworkKind::Proposed)
            {
                if let Ok(g) = percentage_gain(p.mean_sum_rate, r.mean_sum_rate) {
                    gains.push(GainRow {
                        param: value,
                        benchmark: r.framework,
                        gain_percent: g,
                    });
                }
            }
        }
    }
    let result = SweepResult {
        parameter: spec.parameter,
        rows,
        gains,
        trials: records,
    };
    if let Some(path) = &spec.output {
        super::csv::write_sweep_csv(path, &result)?;
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stderr_examples() {
        assert_eq!(mean_and_stderr(&[3.0]), (3.0, 0.0));
        let (m, s) = mean_and_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn spec_validation() {
        let base = SystemConfig::default();
        let mut spec = SweepSpec::new(SweepParameter::TotalPower, vec![20.0, 40.0], base.clone());
        spec.validate().unwrap();
        spec.grid = vec![40.0, 20.0];
        assert!(spec.validate().is_err());
        spec.grid = vec![];
        assert!(spec.validate().is_err());
        let mut beams = SweepSpec::new(SweepParameter::Beams, vec![2.5], base);
        assert!(beams.validate().is_err());
        beams.grid = vec![3.0];
        beams.trials = 0;
        assert!(beams.validate().is_err());
    }

    #[test]
    fn beam_sweep_rescales_scenario() {
        let spec = SweepSpec::new(SweepParameter::Beams, vec![3.0], SystemConfig::default());
        let cfg = spec.config_at(3.0);
        assert_eq!((cfg.num_beams, cfg.num_resource_blocks, cfg.num_users), (3, 3, 6));
    }

    #[test]
    fn aggregation_is_order_invariant() {
        let rec = |t: usize, r: f64| TrialRecord {
            param: 1.0,
            trial: t,
            framework: FrameworkKind::Proposed,
            sum_rate: r,
            iterations: t,
            converged: t % 2 == 0,
            max_residual: 0.0,
        };
        let a = vec![rec(0, 1.0), rec(1, 2.0), rec(2, 4.0)];
        let mut b = a.clone();
        b.reverse();
        let (ra, rb) = (
            aggregate(1.0, FrameworkKind::Proposed, &a),
            aggregate(1.0, FrameworkKind::Proposed, &b),
        );
        assert!((ra.mean_sum_rate - rb.mean_sum_rate).abs() < 1e-15);
        assert!((ra.stderr - rb.stderr).abs() < 1e-15);
        assert_eq!(ra.converged_fraction, rb.converged_fraction);
    }
}
