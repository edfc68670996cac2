//! Exercises the C ABI surface the way a foreign caller would: through the
//! exported functions, raw pointers and status codes.

use std::ffi::{CStr, CString};
use std::ptr;

use usage_synth_ffi::*;

const SAMPLE: &str = "id,created-at,app-id,time-seconds\n\
                      1,2025-04-18T00:10:00,WhatsApp,1003\n\
                      2,2025-04-18T08:00:00,Google Chrome,3600\n\
                      3,2025-04-18T09:00:30,Instagram,600\n\
                      4,2025-04-18T10:00:00,Google Maps,300\n";

fn parse(csv: &str) -> *mut UsDataset {
    let text = CString::new(csv).unwrap();
    let mut handle: *mut UsDataset = ptr::null_mut();
    let status = unsafe { us_dataset_parse(text.as_ptr(), &mut handle) };
    assert_eq!(status, UsStatus::Ok);
    assert!(!handle.is_null());
    handle
}

unsafe fn take_string(ptr: *mut std::ffi::c_char) -> String {
    assert!(!ptr.is_null());
    let out = CStr::from_ptr(ptr).to_str().unwrap().to_string();
    us_string_free(ptr);
    out
}

#[test]
fn version_is_a_static_string() {
    let version = unsafe { CStr::from_ptr(us_version()) };
    assert_eq!(version.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn parse_inspect_and_free() {
    let handle = parse(SAMPLE);
    unsafe {
        assert_eq!(us_dataset_log_count(handle), 4);
        assert_eq!(us_dataset_finding_count(handle), 0);
        let hours = us_dataset_total_usage_hours(handle);
        assert!((hours - 5503.0 / 3600.0).abs() < 1e-12);
        us_dataset_free(handle);
    }
}

#[test]
fn session_count_respects_threshold() {
    let handle = parse(SAMPLE);
    let mut count = 0u64;
    unsafe {
        assert_eq!(us_dataset_session_count(handle, 60, &mut count), UsStatus::Ok);
        assert_eq!(count, 3);
        assert_eq!(
            us_dataset_session_count(handle, i64::MAX, &mut count),
            UsStatus::Ok
        );
        assert_eq!(count, 1);
        us_dataset_free(handle);
    }
}

#[test]
fn write_csv_round_trips() {
    let handle = parse(SAMPLE);
    unsafe {
        let mut out: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(us_dataset_write_csv(handle, &mut out), UsStatus::Ok);
        let csv = take_string(out);
        assert_eq!(csv, SAMPLE);
        us_dataset_free(handle);
    }
}

#[test]
fn evaluate_json_reports_self_comparison() {
    let handle = parse(SAMPLE);
    unsafe {
        let mut out: *mut std::ffi::c_char = ptr::null_mut();
        let status = us_evaluate_json(handle, handle, 60, 3, -1.0, &mut out);
        assert_eq!(status, UsStatus::Ok);
        let json = take_string(out);
        let report: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(report["realism"]["b4"]["log_level"]["ks_stat"], 0.0);
        assert_eq!(report["realism"]["b3"]["top_k_overlap_pct"], 100.0);
        assert_eq!(report["config_echo"]["top_k"], 3);
        assert_eq!(report["config_echo"]["ks_fail_threshold"], serde_json::Value::Null);
        us_dataset_free(handle);
    }
}

#[test]
fn evaluate_json_without_seed_omits_distances() {
    let handle = parse(SAMPLE);
    unsafe {
        let mut out: *mut std::ffi::c_char = ptr::null_mut();
        let status = us_evaluate_json(handle, ptr::null(), 60, 3, -1.0, &mut out);
        assert_eq!(status, UsStatus::Ok);
        let json = take_string(out);
        let report: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(report["realism"]["b4"]["log_level"]["ks_stat"], serde_json::Value::Null);
        assert_eq!(report["seed_ref"], serde_json::Value::Null);
        us_dataset_free(handle);
    }
}

#[test]
fn fatal_parse_sets_status_and_message() {
    let text = CString::new("not a dataset\nat all\n").unwrap();
    let mut handle: *mut UsDataset = ptr::null_mut();
    let status = unsafe { us_dataset_parse(text.as_ptr(), &mut handle) };
    assert_eq!(status, UsStatus::ParseFatal);
    assert!(handle.is_null());
    let message = unsafe { CStr::from_ptr(us_last_error_message()) };
    assert!(message.to_str().unwrap().contains("column"));
}

#[test]
fn null_arguments_are_invalid() {
    unsafe {
        let mut handle: *mut UsDataset = ptr::null_mut();
        assert_eq!(
            us_dataset_parse(ptr::null(), &mut handle),
            UsStatus::InvalidArgument
        );
        let text = CString::new(SAMPLE).unwrap();
        assert_eq!(
            us_dataset_parse(text.as_ptr(), ptr::null_mut()),
            UsStatus::InvalidArgument
        );
        assert_eq!(us_dataset_log_count(ptr::null()), 0);
        assert!(us_dataset_total_usage_hours(ptr::null()).is_nan());
        us_dataset_free(ptr::null_mut());
        us_string_free(ptr::null_mut());
    }
}

#[test]
fn date_only_session_count_is_not_assessable() {
    let handle = parse("id,created-at,app-id,time-seconds\n1,2025-04-18,A,60\n2,2025-04-18,B,60\n");
    let mut count = 0u64;
    let status = unsafe { us_dataset_session_count(handle, 60, &mut count) };
    assert_eq!(status, UsStatus::NotAssessable);
    unsafe { us_dataset_free(handle) };
}

#[test]
fn parse_file_round_trip_and_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("data.csv");
    std::fs::write(&path, SAMPLE).unwrap();
    let c_path = CString::new(path.to_str().unwrap()).unwrap();
    let mut handle: *mut UsDataset = ptr::null_mut();
    unsafe {
        assert_eq!(us_dataset_parse_file(c_path.as_ptr(), &mut handle), UsStatus::Ok);
        assert_eq!(us_dataset_log_count(handle), 4);
        us_dataset_free(handle);
    }

    let missing = CString::new("/no/such/file.csv").unwrap();
    let mut handle: *mut UsDataset = ptr::null_mut();
    assert_eq!(
        unsafe { us_dataset_parse_file(missing.as_ptr(), &mut handle) },
        UsStatus::Io
    );
}

#[test]
fn baseline_generation_is_deterministic_through_ffi() {
    let seed_csv = CString::new(usage_synth::assets::SEED_FIXTURE_CSV).unwrap();
    let mut seed: *mut UsDataset = ptr::null_mut();
    unsafe {
        assert_eq!(us_dataset_parse(seed_csv.as_ptr(), &mut seed), UsStatus::Ok);
        let date = CString::new("2025-06-01").unwrap();
        let mut out_a: *mut std::ffi::c_char = ptr::null_mut();
        let mut out_b: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(
            us_generate_baseline_csv(seed, date.as_ptr(), 42, &mut out_a),
            UsStatus::Ok
        );
        assert_eq!(
            us_generate_baseline_csv(seed, date.as_ptr(), 42, &mut out_b),
            UsStatus::Ok
        );
        let a = take_string(out_a);
        let b = take_string(out_b);
        assert_eq!(a, b);
        assert!(a.starts_with("id,created-at,app-id,time-seconds\n"));
        us_dataset_free(seed);
    }
}

#[test]
fn generated_header_declares_the_surface() {
    let header = include_str!("../include/usage_synth.h");
    for symbol in [
        "us_version",
        "us_last_error_message",
        "us_dataset_parse",
        "us_dataset_parse_file",
        "us_dataset_free",
        "us_dataset_log_count",
        "us_dataset_session_count",
        "us_dataset_write_csv",
        "us_evaluate_json",
        "us_generate_baseline_csv",
        "us_string_free",
        "typedef struct UsDataset UsDataset;",
        "US_STATUS_NOT_ASSESSABLE",
    ] {
        assert!(header.contains(symbol), "header is missing {symbol}");
    }
}
