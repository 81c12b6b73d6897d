use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use rsma_ffi::*;

fn last_error() -> String {
    let p = rsma_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn small_config() -> *mut RsmaConfig {
    let text = CString::new("num_beams = 2\nnum_resource_blocks = 2\nnum_users = 4\n").unwrap();
    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { rsma_config_from_kv(text.as_ptr(), &mut cfg) }, RsmaStatus::Ok);
    assert!(!cfg.is_null());
    cfg
}

#[test]
fn solve_and_read_back() {
    let cfg = small_config();
    let mut report = ptr::null_mut();
    let st = unsafe { rsma_solve(cfg, RSMA_FRAMEWORK_PROPOSED, 3, &mut report) };
    assert_eq!(st, RsmaStatus::Ok);
    unsafe {
        assert!(rsma_report_sum_rate(report) > 0.0);
        assert!(rsma_report_iterations(report) > 0);
        assert!(rsma_report_max_residual(report).is_finite());
        let (mut m, mut k) = (0usize, 0usize);
        assert_eq!(rsma_report_dims(report, &mut m, &mut k), RsmaStatus::Ok);
        assert_eq!((m, k), (2, 2));
        let mut p = -1.0;
        assert_eq!(rsma_report_beam_power(report, 1, 1, &mut p), RsmaStatus::Ok);
        assert!(p >= 0.0);
        assert_eq!(
            rsma_report_beam_power(report, 2, 0, &mut p),
            RsmaStatus::InvalidArgument
        );
        let n = rsma_report_trace_len(report);
        assert_eq!(n, rsma_report_iterations(report));
        let mut lam = [f64::NAN; 5];
        assert_eq!(rsma_report_trace_row(report, n - 1, lam.as_mut_ptr()), RsmaStatus::Ok);
        assert!(lam.iter().all(|&l| l >= 0.0));
        assert_eq!(
            rsma_report_trace_row(report, n, lam.as_mut_ptr()),
            RsmaStatus::InvalidArgument
        );
        rsma_report_free(report);
        rsma_config_free(cfg);
    }
}

#[test]
fn solves_are_deterministic() {
    let cfg = small_config();
    let run = || {
        let mut r = ptr::null_mut();
        assert_eq!(
            unsafe { rsma_solve(cfg, RSMA_FRAMEWORK_BENCHMARK2, 1, &mut r) },
            RsmaStatus::Ok
        );
        let v = unsafe { rsma_report_sum_rate(r) };
        unsafe { rsma_report_free(r) };
        v
    };
    assert_eq!(run().to_bits(), run().to_bits());
    unsafe { rsma_config_free(cfg) };
}

#[test]
fn error_codes() {
    let cfg = rsma_config_new();
    let key = CString::new("total_power_w").unwrap();
    let bad = CString::new("-5").unwrap();
    let junk = CString::new("watts").unwrap();
    let nokey = CString::new("no_such_key").unwrap();
    unsafe {
        assert_eq!(
            rsma_config_set(cfg, key.as_ptr(), bad.as_ptr()),
            RsmaStatus::InvalidConfig
        );
        assert!(!last_error().is_empty());
        assert_eq!(
            rsma_config_set(cfg, key.as_ptr(), junk.as_ptr()),
            RsmaStatus::InvalidConfig
        );
        assert_eq!(
            rsma_config_set(cfg, nokey.as_ptr(), bad.as_ptr()),
            RsmaStatus::InvalidConfig
        );
        assert_eq!(
            rsma_config_set(ptr::null_mut(), key.as_ptr(), bad.as_ptr()),
            RsmaStatus::NullPointer
        );
        assert_eq!(rsma_config_set(cfg, ptr::null(), bad.as_ptr()), RsmaStatus::NullPointer);

        let mut r = ptr::null_mut();
        assert_eq!(rsma_solve(cfg, 9, 0, &mut r), RsmaStatus::InvalidArgument);
        assert!(r.is_null());
        assert!(last_error().contains('9'));
        assert_eq!(rsma_solve(ptr::null(), 0, 0, &mut r), RsmaStatus::NullPointer);
        assert_eq!(rsma_solve(cfg, 0, 0, ptr::null_mut()), RsmaStatus::NullPointer);

        let text = CString::new("total_power_w = 1 2 3\n").unwrap();
        let mut c2 = ptr::null_mut();
        assert_ne!(rsma_config_from_kv(text.as_ptr(), &mut c2), RsmaStatus::Ok);
        assert!(c2.is_null());

        assert!(rsma_report_sum_rate(ptr::null()).is_nan());
        assert!(!rsma_report_converged(ptr::null()));
        assert_eq!(rsma_report_trace_len(ptr::null()), 0);
        rsma_config_free(ptr::null_mut());
        rsma_report_free(ptr::null_mut());
        rsma_config_free(cfg);
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(rsma_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = dir.join("include/rsma.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for sym in ["rsma_solve", "rsma_config_new", "RsmaConfig", "RSMA_STATUS_OK"] {
        assert!(text.contains(sym), "{sym} missing from header");
    }
    let Ok(_) = Command::new("cc").arg("--version").output() else {
        return;
    };
    let src = std::env::temp_dir().join("rsma_header_check.c");
    std::fs::write(
        &src,
        "#include \"rsma.h\"\nint main(void) { RsmaConfig *c = rsma_config_new(); rsma_config_free(c); return RSMA_STATUS_OK; }\n",
    )
    .unwrap();
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(dir.join("include"))
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success());
}
