//! C ABI for the usage-synth toolkit.
//!
//! Datasets are opaque handles created by `us_dataset_parse` and released
//! with `us_dataset_free`. Functions that can fail return a `UsStatus`; a
//! human-readable description of the most recent failure on the calling
//! thread is available via `us_last_error_message`. Strings returned through
//! out-parameters are owned by the caller and must be released with
//! `us_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use usage_synth::model::{parse_dataset, write_dataset, Provenance, UsageDataset};
use usage_synth::realism::{self, RealismConfig};
use usage_synth::{baseline, report, session};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UsStatus {
    Ok = 0,
    /// A pointer argument was null or a value argument was out of range.
    InvalidArgument = 1,
    /// The CSV could not be parsed into a dataset at all.
    ParseFatal = 2,
    /// Filesystem problem.
    Io = 3,
    /// The requested quantity is not assessable for this dataset
    /// (for example session grouping over date-only timestamps).
    NotAssessable = 4,
    /// Any other failure; see `us_last_error_message`.
    Internal = 5,
}

/// Opaque dataset handle.
pub struct UsDataset {
    inner: UsageDataset,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(text).ok();
    });
}

fn status_for(error: &usage_synth::Error) -> UsStatus {
    use usage_synth::Error;
    match error {
        Error::FatalParse { .. } => UsStatus::ParseFatal,
        Error::Io(_) => UsStatus::Io,
        Error::MissingTimeOfDay | Error::EmptySample(_) | Error::KTooLarge { .. } => {
            UsStatus::NotAssessable
        }
        Error::InvalidConfig(_) | Error::SeedMismatch { .. } | Error::SeedRejected(_) => {
            UsStatus::InvalidArgument
        }
        _ => UsStatus::Internal,
    }
}

fn fail(error: &usage_synth::Error) -> UsStatus {
    set_last_error(error.to_string());
    status_for(error)
}

fn invalid(message: &str) -> UsStatus {
    set_last_error(message);
    UsStatus::InvalidArgument
}

/// # Safety
/// `ptr` must be null or a valid NUL-terminated UTF-8 string.
unsafe fn str_arg<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, UsStatus> {
    if ptr.is_null() {
        return Err(invalid(&format!("{name} is null")));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| invalid(&format!("{name} is not valid UTF-8")))
}

fn string_out(value: String, out: *mut *mut c_char) -> UsStatus {
    let Ok(cstring) = CString::new(value.replace('\0', " ")) else {
        return invalid("output string contained interior NUL");
    };
    unsafe { *out = cstring.into_raw() };
    UsStatus::Ok
}

fn guard<F: FnOnce() -> UsStatus>(f: F) -> UsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_last_error("internal panic");
            UsStatus::Internal
        }
    }
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn us_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Description of the last error on this thread, or null. Do not free; the
/// buffer is invalidated by the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn us_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map(|s| s.as_ptr())
            .unwrap_or(std::ptr::null())
    })
}

/// Parse a CSV dataset from a NUL-terminated UTF-8 buffer.
///
/// # Safety
/// `csv_text` must be a valid NUL-terminated string and `out_dataset` a valid
/// pointer. On success `*out_dataset` owns a dataset that must be released
/// with `us_dataset_free`.
#[no_mangle]
pub unsafe extern "C" fn us_dataset_parse(
    csv_text: *const c_char,
    out_dataset: *mut *mut UsDataset,
) -> UsStatus {
    guard(|| {
        if out_dataset.is_null() {
            return invalid("out_dataset is null");
        }
        let text = match str_arg(csv_text, "csv_text") {
            Ok(t) => t,
            Err(status) => return status,
        };
        match parse_dataset(text, Provenance::unknown_file()) {
            Ok(inner) => {
                *out_dataset = Box::into_raw(Box::new(UsDataset { inner }));
                UsStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Parse a CSV dataset from a file path.
///
/// # Safety
/// Same contract as [`us_dataset_parse`].
#[no_mangle]
pub unsafe extern "C" fn us_dataset_parse_file(
    path: *const c_char,
    out_dataset: *mut *mut UsDataset,
) -> UsStatus {
    guard(|| {
        if out_dataset.is_null() {
            return invalid("out_dataset is null");
        }
        let path = match str_arg(path, "path") {
            Ok(p) => p,
            Err(status) => return status,
        };
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                set_last_error(format!("{path}: {e}"));
                return UsStatus::Io;
            }
        };
        match parse_dataset(&text, Provenance::unknown_file()) {
            Ok(inner) => {
                *out_dataset = Box::into_raw(Box::new(UsDataset { inner }));
                UsStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Release a dataset handle. Null is a no-op.
///
/// # Safety
/// `dataset` must be null or a pointer obtained from a parse function that
/// has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn us_dataset_free(dataset: *mut UsDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// Number of usage logs in the dataset; 0 for null.
///
/// # Safety
/// `dataset` must be null or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn us_dataset_log_count(dataset: *const UsDataset) -> u64 {
    dataset.as_ref().map_or(0, |d| d.inner.logs.len() as u64)
}

/// Number of structural findings recorded while parsing; 0 for null.
///
/// # Safety
/// `dataset` must be null or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn us_dataset_finding_count(dataset: *const UsDataset) -> u64 {
    dataset
        .as_ref()
        .map_or(0, |d| d.inner.violations.len() as u64)
}

/// Total usage in hours; NaN for null.
///
/// # Safety
/// `dataset` must be null or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn us_dataset_total_usage_hours(dataset: *const UsDataset) -> f64 {
    dataset
        .as_ref()
        .map_or(f64::NAN, |d| realism::total_usage_hours(&d.inner))
}

/// Number of sessions under the given gap threshold.
///
/// # Safety
/// `dataset` must be a live dataset handle, `out_count` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn us_dataset_session_count(
    dataset: *const UsDataset,
    gap_threshold_s: i64,
    out_count: *mut u64,
) -> UsStatus {
    guard(|| {
        let (Some(d), false) = (dataset.as_ref(), out_count.is_null()) else {
            return invalid("dataset or out_count is null");
        };
        match session::sessionize(&d.inner, gap_threshold_s) {
            Ok(sessions) => {
                *out_count = sessions.len() as u64;
                UsStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Serialize a dataset to canonical CSV. The returned string must be freed
/// with `us_string_free`.
///
/// # Safety
/// `dataset` must be a live dataset handle, `out_csv` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn us_dataset_write_csv(
    dataset: *const UsDataset,
    out_csv: *mut *mut c_char,
) -> UsStatus {
    guard(|| {
        let (Some(d), false) = (dataset.as_ref(), out_csv.is_null()) else {
            return invalid("dataset or out_csv is null");
        };
        string_out(write_dataset(&d.inner), out_csv)
    })
}

/// Evaluate a dataset (optionally against a seed) and return the full report
/// as a JSON string. `ks_fail_threshold` below 0 leaves B4/B5 report-only.
/// The returned string must be freed with `us_string_free`.
///
/// # Safety
/// `dataset` must be a live dataset handle; `seed` may be null; `out_json`
/// must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn us_evaluate_json(
    dataset: *const UsDataset,
    seed: *const UsDataset,
    gap_threshold_s: i64,
    top_k: u64,
    ks_fail_threshold: f64,
    out_json: *mut *mut c_char,
) -> UsStatus {
    guard(|| {
        let (Some(d), false) = (dataset.as_ref(), out_json.is_null()) else {
            return invalid("dataset or out_json is null");
        };
        if top_k == 0 {
            return invalid("top_k must be at least 1");
        }
        let config = RealismConfig {
            gap_threshold_s,
            top_k: top_k as usize,
            ks_fail_threshold: (ks_fail_threshold >= 0.0).then_some(ks_fail_threshold),
            ..RealismConfig::default()
        };
        let full = report::build_full_report(
            "<memory>",
            seed.as_ref().map(|_| "<memory>".to_string()),
            &d.inner,
            seed.as_ref().map(|s| &s.inner),
            &config,
        );
        match serde_json::to_string_pretty(&full) {
            Ok(json) => string_out(json, out_json),
            Err(e) => {
                set_last_error(e.to_string());
                UsStatus::Internal
            }
        }
    })
}

/// Generate one synthetic day by resampling the seed dataset and return the
/// canonical CSV. `date_iso` is YYYY-MM-DD. The returned string must be
/// freed with `us_string_free`.
///
/// # Safety
/// `seed` must be a live dataset handle; `date_iso` a valid NUL-terminated
/// string; `out_csv` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn us_generate_baseline_csv(
    seed: *const UsDataset,
    date_iso: *const c_char,
    seed_value: u64,
    out_csv: *mut *mut c_char,
) -> UsStatus {
    guard(|| {
        let (Some(s), false) = (seed.as_ref(), out_csv.is_null()) else {
            return invalid("seed or out_csv is null");
        };
        let date_text = match str_arg(date_iso, "date_iso") {
            Ok(t) => t,
            Err(status) => return status,
        };
        let Ok(date) = date_text.parse::<chrono::NaiveDate>() else {
            return invalid("date_iso must be YYYY-MM-DD");
        };
        let config = baseline::GenConfig {
            seed_value,
            ..baseline::GenConfig::default()
        };
        let result = baseline::profile_seed(&s.inner)
            .and_then(|profile| baseline::generate_day(&profile, date, &config));
        match result {
            Ok(generated) => string_out(write_dataset(&generated), out_csv),
            Err(e) => fail(&e),
        }
    })
}

/// Release a string returned by this library. Null is a no-op.
///
/// # Safety
/// `text` must be null or a string pointer returned by this library that has
/// not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn us_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}
