//! C interface to `rsma-core`.
//!
//! Scenarios and solve results cross the boundary as opaque handles. Every
//! fallible call returns an [`RsmaStatus`]; the message of the most recent
//! failure on the calling thread is available from
//! [`rsma_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rsma_core::frameworks::{run_framework, FrameworkKind};
use rsma_core::model::{derive_seed, generate_realization, SystemConfig};
use rsma_core::solver::SolveReport;
use rsma_core::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RsmaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidConfig = 3,
    Domain = 4,
    Parse = 5,
    Io = 6,
    Panic = 7,
}

pub const RSMA_FRAMEWORK_PROPOSED: u32 = 0;
pub const RSMA_FRAMEWORK_BENCHMARK1: u32 = 1;
pub const RSMA_FRAMEWORK_BENCHMARK2: u32 = 2;

/// Scenario configuration.
pub struct RsmaConfig {
    inner: SystemConfig,
}

/// Result of one solve.
pub struct RsmaReport {
    inner: SolveReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: RsmaStatus, msg: impl Into<String>) -> RsmaStatus {
    set_error(msg);
    status
}

fn from_error(e: &Error) -> RsmaStatus {
    let status = match e {
        Error::Config(_) => RsmaStatus::InvalidConfig,
        Error::Domain(_) | Error::UndefinedGroup { .. } | Error::UndefinedGain(_) => RsmaStatus::Domain,
        Error::Parse { .. } => RsmaStatus::Parse,
        Error::Io { .. } | Error::Csv { .. } => RsmaStatus::Io,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> RsmaStatus) -> RsmaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(RsmaStatus::Panic, "internal panic"),
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, RsmaStatus> {
    if p.is_null() {
        return Err(fail(RsmaStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(RsmaStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

fn framework(code: u32) -> Option<FrameworkKind> {
    match code {
        RSMA_FRAMEWORK_PROPOSED => Some(FrameworkKind::Proposed),
        RSMA_FRAMEWORK_BENCHMARK1 => Some(FrameworkKind::Benchmark1),
        RSMA_FRAMEWORK_BENCHMARK2 => Some(FrameworkKind::Benchmark2),
        _ => None,
    }
}

/// Message of the last failure on this thread, or null. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn rsma_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub extern "C" fn rsma_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Default scenario. Free with [`rsma_config_free`].
#[no_mangle]
pub extern "C" fn rsma_config_new() -> *mut RsmaConfig {
    Box::into_raw(Box::new(RsmaConfig {
        inner: SystemConfig::default(),
    }))
}

/// Parses `key = value` lines over the defaults.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn rsma_config_from_kv(text_ptr: *const c_char, out: *mut *mut RsmaConfig) -> RsmaStatus {
    guard(|| {
        if out.is_null() {
            return fail(RsmaStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        let s = match text(text_ptr, "text") {
            Ok(s) => s,
            Err(st) => return st,
        };
        match SystemConfig::from_kv_str(s) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(RsmaConfig { inner }));
                RsmaStatus::Ok
            }
            Err(e) => from_error(&e),
        }
    })
}

/// Sets one key. The scenario is left unchanged on failure.
///
/// # Safety
/// `cfg` must come from this library; `key` and `value` must be
/// NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn rsma_config_set(cfg: *mut RsmaConfig, key: *const c_char, value: *const c_char) -> RsmaStatus {
    guard(|| {
        let Some(cfg) = cfg.as_mut() else {
            return fail(RsmaStatus::NullPointer, "config is null");
        };
        let (k, v) = match (text(key, "key"), text(value, "value")) {
            (Ok(k), Ok(v)) => (k, v),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let mut next = cfg.inner.clone();
        if let Err(msg) = next.set(k, v) {
            return fail(RsmaStatus::InvalidConfig, msg);
        }
        if let Err(e) = next.validate() {
            return from_error(&e);
        }
        cfg.inner = next;
        RsmaStatus::Ok
    })
}

/// # Safety
/// `cfg` must be null or come from this library and not be freed already.
#[no_mangle]
pub unsafe extern "C" fn rsma_config_free(cfg: *mut RsmaConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Draws trial `trial` of the scenario and solves it with `framework`.
///
/// # Safety
/// `cfg` must come from this library and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsma_solve(
    cfg: *const RsmaConfig,
    framework_code: u32,
    trial: u64,
    out: *mut *mut RsmaReport,
) -> RsmaStatus {
    guard(|| {
        if out.is_null() {
            return fail(RsmaStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        let Some(cfg) = cfg.as_ref() else {
            return fail(RsmaStatus::NullPointer, "config is null");
        };
        let Some(kind) = framework(framework_code) else {
            return fail(
                RsmaStatus::InvalidArgument,
                format!("unknown framework code {framework_code}"),
            );
        };
        let cfg = &cfg.inner;
        let result = cfg
            .validate()
            .and_then(|_| generate_realization(cfg, trial))
            .and_then(|real| run_framework(kind, &real, cfg, derive_seed(cfg.rng_seed, trial)));
        match result {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(RsmaReport { inner }));
                RsmaStatus::Ok
            }
            Err(e) => from_error(&e),
        }
    })
}

/// # Safety
/// `report` must be null or come from [`rsma_solve`] and not be freed already.
#[no_mangle]
pub unsafe extern "C" fn rsma_report_free(report: *mut RsmaReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Sum rate in bits/s, or NaN for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rsma_report_sum_rate(report: *const RsmaReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.inner.sum_rate)
}

/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rsma_report_iterations(report: *const RsmaReport) -> usize {
    report.as_ref().map_or(0, |r| r.inner.iterations)
}

/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rsma_report_converged(report: *const RsmaReport) -> bool {
    report.as_ref().is_some_and(|r| r.inner.converged)
}

/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rsma_report_infeasible(report: *const RsmaReport) -> bool {
    report.as_ref().is_some_and(|r| r.inner.infeasible)
}

/// Largest relative constraint residual, or NaN for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rsma_report_max_residual(report: *const RsmaReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.inner.residuals.max())
}

/// Writes the beam count and block count.
///
/// # Safety
/// `report` must be a live handle; `beams` and `blocks` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsma_report_dims(
    report: *const RsmaReport,
    beams: *mut usize,
    blocks: *mut usize,
) -> RsmaStatus {
    let Some(r) = report.as_ref() else {
        return fail(RsmaStatus::NullPointer, "report is null");
    };
    if beams.is_null() || blocks.is_null() {
        return fail(RsmaStatus::NullPointer, "output is null");
    }
    let (m, _, k) = r.inner.allocation.dims();
    *beams = m;
    *blocks = k;
    RsmaStatus::Ok
}

/// Power in watts of `beam` on `block`.
///
/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rsma_report_beam_power(
    report: *const RsmaReport,
    beam: usize,
    block: usize,
    out: *mut f64,
) -> RsmaStatus {
    let Some(r) = report.as_ref() else {
        return fail(RsmaStatus::NullPointer, "report is null");
    };
    if out.is_null() {
        return fail(RsmaStatus::NullPointer, "out is null");
    }
    match r.inner.allocation.beam_power.get([beam, block]) {
        Some(&p) => {
            *out = p;
            RsmaStatus::Ok
        }
        None => fail(
            RsmaStatus::InvalidArgument,
            format!("beam {beam}, block {block} out of range"),
        ),
    }
}

/// Number of recorded multiplier trace rows.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rsma_report_trace_len(report: *const RsmaReport) -> usize {
    report.as_ref().map_or(0, |r| r.inner.trajectory.len())
}

/// Multiplier norms of trace row `row`: `lambda` receives the five values
/// `|l1|, |l2|, |l3|, |l4|, l5`.
///
/// # Safety
/// `report` must be a live handle and `lambda` must point to 5 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn rsma_report_trace_row(report: *const RsmaReport, row: usize, lambda: *mut f64) -> RsmaStatus {
    let Some(r) = report.as_ref() else {
        return fail(RsmaStatus::NullPointer, "report is null");
    };
    if lambda.is_null() {
        return fail(RsmaStatus::NullPointer, "lambda is null");
    }
    let Some(t) = r.inner.trajectory.get(row) else {
        return fail(RsmaStatus::InvalidArgument, format!("trace row {row} out of range"));
    };
    let vals = [
        t.lambda1_norm,
        t.lambda2_norm,
        t.lambda3_norm,
        t.lambda4_norm,
        t.lambda5,
    ];
    ptr::copy_nonoverlapping(vals.as_ptr(), lambda, vals.len());
    RsmaStatus::Ok
}
