//! Versioned CSV tables for sweep aggregates and per-trial records.

use std::path::Path;

use super::sweep::{SweepResult, SweepRow, TrialRecord};
use crate::error::{Error, Result};
use crate::frameworks::FrameworkKind;

pub const SCHEMA_LINE: &str = "# schema=1";
pub const SWEEP_HEADER: [&str; 6] = [
    "param",
    "framework",
    "mean_sum_rate_bps",
    "stderr_bps",
    "mean_iters",
    "converged_frac",
];
pub const TRIAL_HEADER: [&str; 7] = [
    "param",
    "trial",
    "framework",
    "sum_rate_bps",
    "iterations",
    "converged",
    "max_residual",
];

fn finish(writer: csv::Writer<Vec<u8>>) -> String {
    let bytes = writer.into_inner().expect("in-memory writer");
    String::from_utf8(bytes).expect("csv output is UTF-8")
}

/// Aggregate table, prefixed by the schema comment. Floats use the shortest
/// representation that parses back to the same value.
pub fn sweep_csv_string(result: &SweepResult) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SWEEP_HEADER).expect("in-memory write");
    for r in &result.rows {
        w.write_record([
            r.param.to_string(),
            r.framework.to_string(),
            r.mean_sum_rate.to_string(),
            r.stderr.to_string(),
            r.mean_iterations.to_string(),
            r.converged_fraction.to_string(),
        ])
        .expect("in-memory write");
    }
    format!("{SCHEMA_LINE}\n{}", finish(w))
}

pub fn trials_csv_string(records: &[TrialRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(TRIAL_HEADER).expect("in-memory write");
    for r in records {
        w.write_record([
            r.param.to_string(),
            r.trial.to_string(),
            r.framework.to_string(),
            r.sum_rate.to_string(),
            r.iterations.to_string(),
            r.converged.to_string(),
            r.max_residual.to_string(),
        ])
        .expect("in-memory write");
    }
    format!("{SCHEMA_LINE}\n{}", finish(w))
}

pub fn write_sweep_csv(path: &Path, result: &SweepResult) -> Result<()> {
    std::fs::write(path, sweep_csv_string(result)).map_err(|e| Error::io(path, e))
}

pub fn write_trials_csv(path: &Path, records: &[TrialRecord]) -> Result<()> {
    std::fs::write(path, trials_csv_string(records)).map_err(|e| Error::io(path, e))
}

fn parse_field<T: std::str::FromStr>(record: &csv::StringRecord, i: usize, line: usize) -> Result<T> {
    let raw = record.get(i).unwrap_or("");
    raw.parse().map_err(|_| Error::Parse {
        location: format!("line {line}, column {}", i + 1),
        message: format!("cannot parse '{raw}'"),
    })
}

/// Reads an aggregate table written by [`sweep_csv_string`].
pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepRow>> {
    let body = text
        .strip_prefix(SCHEMA_LINE)
        .ok_or_else(|| Error::Parse {
            location: "line 1".into(),
            message: format!("expected '{SCHEMA_LINE}'"),
        })?
        .trim_start_matches(['\r', '\n']);
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    let header = reader.headers().map_err(|e| Error::Parse {
        location: "line 2".into(),
        message: e.to_string(),
    })?;
    if header.iter().ne(SWEEP_HEADER) {
        return Err(Error::Parse {
            location: "line 2".into(),
            message: "unexpected header".into(),
        });
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let line = i + 3;
        let rec = rec.map_err(|e| Error::Parse {
            location: format!("line {line}"),
            message: e.to_string(),
        })?;
        let framework: FrameworkKind = rec.get(1).unwrap_or("").parse().map_err(|e: Error| Error::Parse {
            location: format!("line {line}, column 2"),
            message: e.to_string(),
        })?;
        rows.push(SweepRow {
            param: parse_field(&rec, 0, line)?,
            framework,
            mean_sum_rate: parse_field(&rec, 2, line)?,
            stderr: parse_field(&rec, 3, line)?,
            mean_iterations: parse_field(&rec, 4, line)?,
            converged_fraction: parse_field(&rec, 5, line)?,
        });
    }
    Ok(rows)
}

/// Reads the aggregate table at `path`.
pub fn read_sweep_csv(path: &Path) -> Result<Vec<SweepRow>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_sweep_csv(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::sweep::SweepParameter;

    fn sample() -> SweepResult {
        SweepResult {
            parameter: SweepParameter::TotalPower,
            rows: vec![
                SweepRow {
                    param: 20.0,
                    framework: FrameworkKind::Proposed,
                    mean_sum_rate: 123_456_789.123_456_78,
                    stderr: 0.1 + 0.2,
                    mean_iterations: 1234.5,
                    converged_fraction: 0.98,
                },
                SweepRow {
                    param: 40.0,
                    framework: FrameworkKind::Benchmark2,
                    mean_sum_rate: 1e-300,
                    stderr: 0.0,
                    mean_iterations: 1.0,
                    converged_fraction: 1.0,
                },
            ],
            gains: vec![],
            trials: vec![],
        }
    }

    #[test]
    fn round_trip_is_lossless() {
        let r = sample();
        let text = sweep_csv_string(&r);
        assert!(
            text.starts_with("# schema=1\nparam,framework,mean_sum_rate_bps,stderr_bps,mean_iters,converged_frac\n")
        );
        assert_eq!(parse_sweep_csv(&text).unwrap(), r.rows);
    }

    #[test]
    fn rejects_missing_schema_and_bad_values() {
        assert!(parse_sweep_csv("param\n").is_err());
        let bad =
            "# schema=1\nparam,framework,mean_sum_rate_bps,stderr_bps,mean_iters,converged_frac\nx,proposed,1,1,1,1\n";
        assert!(matches!(parse_sweep_csv(bad), Err(Error::Parse { .. })));
    }
}
