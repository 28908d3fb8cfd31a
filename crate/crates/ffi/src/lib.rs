//! C ABI for the adcorpus toolkit.
//!
//! Conventions: functions return an [`AdcStatus`] and write results through
//! out-pointers as malloc'd, NUL-terminated UTF-8 JSON; free them with
//! [`adc_string_free`]. The most recent error message per thread is available
//! via [`adc_last_error`]. The configuration is an opaque handle created by
//! [`adc_config_default`]/[`adc_config_load`] and released by
//! [`adc_config_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use adcorpus::config::{Config, SegmentationMode};
use adcorpus::corpus::corpus_from_jsonl;
use adcorpus::error::Error;
use adcorpus::metrics::{evaluate_submission, parse_submission};
use adcorpus::segment::{run_pipeline, segments_to_json};
use adcorpus::textalign::parse_srt;

/// Result of an FFI call; mirrors the CLI exit-code contract.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum AdcStatus {
    Ok = 0,
    UsageError = 1,
    InputError = 2,
    ProcessingError = 3,
    /// A panic was caught at the boundary.
    InternalError = 4,
}

/// Opaque pipeline configuration handle.
pub struct AdcConfig {
    inner: Config,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: &str) {
    let message = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
}

fn clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn status_of(err: &Error) -> AdcStatus {
    match err.exit_code() {
        1 => AdcStatus::UsageError,
        3 => AdcStatus::ProcessingError,
        _ => AdcStatus::InputError,
    }
}

/// # Safety
/// `ptr` must be NULL or a NUL-terminated string valid for the duration of
/// the call.
unsafe fn arg_str<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, AdcStatus> {
    if ptr.is_null() {
        set_error(&format!("{name} must not be NULL"));
        return Err(AdcStatus::UsageError);
    }
    match unsafe { CStr::from_ptr(ptr) }.to_str() {
        Ok(s) => Ok(s),
        Err(_) => {
            set_error(&format!("{name} is not valid UTF-8"));
            Err(AdcStatus::UsageError)
        }
    }
}

fn emit(out: *mut *mut c_char, text: String) -> AdcStatus {
    if out.is_null() {
        set_error("out pointer must not be NULL");
        return AdcStatus::UsageError;
    }
    let text = CString::new(text.replace('\0', " ")).unwrap_or_default();
    unsafe { *out = text.into_raw() };
    clear_error();
    AdcStatus::Ok
}

fn guarded(f: impl FnOnce() -> AdcStatus) -> AdcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            AdcStatus::InternalError
        }
    }
}

fn read_file(path: &str) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::io(Path::new(path), e))
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn adc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// A configuration with all documented defaults.
#[no_mangle]
pub extern "C" fn adc_config_default() -> *mut AdcConfig {
    clear_error();
    Box::into_raw(Box::new(AdcConfig {
        inner: Config::default(),
    }))
}

/// Load a TOML configuration file; returns NULL on error (see
/// [`adc_last_error`]).
///
/// # Safety
/// `path` must be NULL or a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn adc_config_load(path: *const c_char) -> *mut AdcConfig {
    let result = catch_unwind(AssertUnwindSafe(|| {
        let path = match unsafe { arg_str(path, "path") } {
            Ok(p) => p,
            Err(_) => return std::ptr::null_mut(),
        };
        match Config::load(path) {
            Ok(cfg) => {
                clear_error();
                Box::into_raw(Box::new(AdcConfig { inner: cfg }))
            }
            Err(e) => {
                set_error(&e.to_string());
                std::ptr::null_mut()
            }
        }
    }));
    result.unwrap_or(std::ptr::null_mut())
}

/// Release a configuration handle. NULL is ignored.
///
/// # Safety
/// `cfg` must be NULL or a pointer returned by `adc_config_default` or
/// `adc_config_load` that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn adc_config_free(cfg: *mut AdcConfig) {
    if !cfg.is_null() {
        drop(unsafe { Box::from_raw(cfg) });
    }
}

unsafe fn segment_impl(
    cfg: *const AdcConfig,
    movie_wav: *const c_char,
    ad_wav: *const c_char,
    out_json: *mut *mut c_char,
    mode: SegmentationMode,
) -> AdcStatus {
    guarded(|| {
        let default_cfg;
        let cfg = if cfg.is_null() {
            default_cfg = Config::default();
            &default_cfg
        } else {
            unsafe { &(*cfg).inner }
        };
        let movie_path = match unsafe { arg_str(movie_wav, "movie_wav") } {
            Ok(p) => p,
            Err(s) => return s,
        };
        let ad_path = match unsafe { arg_str(ad_wav, "ad_wav") } {
            Ok(p) => p,
            Err(s) => return s,
        };
        let run = || -> Result<String, Error> {
            let movie = adcorpus::audio::load_wav(movie_path)?;
            let ad = adcorpus::audio::load_wav(ad_path)?;
            let result = run_pipeline(&movie, &ad, mode, cfg)?;
            Ok(segments_to_json(&result.segments))
        };
        match run() {
            Ok(json) => emit(out_json, json),
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Detect AD narration segments with the fully automatic (NLMS residual)
/// path; `out_json` receives the segment list JSON.
///
/// # Safety
/// `cfg` must be NULL or a live configuration handle; the path arguments
/// must be NULL or valid NUL-terminated strings; `out_json` must be a valid
/// pointer to a `char *`.
#[no_mangle]
pub unsafe extern "C" fn adc_segment_auto(
    cfg: *const AdcConfig,
    movie_wav: *const c_char,
    ad_wav: *const c_char,
    out_json: *mut *mut c_char,
) -> AdcStatus {
    unsafe { segment_impl(cfg, movie_wav, ad_wav, out_json, SegmentationMode::Auto) }
}

/// Detect AD narration segments with the semi-automatic (spectrogram
/// difference) path.
///
/// # Safety
/// As for [`adc_segment_auto`].
#[no_mangle]
pub unsafe extern "C" fn adc_segment_semi(
    cfg: *const AdcConfig,
    movie_wav: *const c_char,
    ad_wav: *const c_char,
    out_json: *mut *mut c_char,
) -> AdcStatus {
    unsafe { segment_impl(cfg, movie_wav, ad_wav, out_json, SegmentationMode::Semi) }
}

/// Parse an SRT file; `out_json` receives `{"subtitles": [...],
/// "warnings": [...]}`.
///
/// # Safety
/// `path` must be NULL or a valid NUL-terminated string; `out_json` must be
/// a valid pointer to a `char *`.
#[no_mangle]
pub unsafe extern "C" fn adc_parse_srt_file(
    path: *const c_char,
    out_json: *mut *mut c_char,
) -> AdcStatus {
    guarded(|| {
        let path = match unsafe { arg_str(path, "path") } {
            Ok(p) => p,
            Err(s) => return s,
        };
        let run = || -> Result<String, Error> {
            let (subs, warnings) = parse_srt(&read_file(path)?)?;
            let payload = serde_json::json!({
                "subtitles": subs,
                "warnings": warnings,
            });
            Ok(serde_json::to_string_pretty(&payload).expect("payload serializes"))
        };
        match run() {
            Ok(json) => emit(out_json, json),
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Evaluate a COCO-style submission file against a reference corpus split
/// (JSON Lines); `out_json` receives the metric report.
///
/// # Safety
/// The path arguments must be NULL or valid NUL-terminated strings;
/// `out_json` must be a valid pointer to a `char *`.
#[no_mangle]
pub unsafe extern "C" fn adc_eval_files(
    submission_path: *const c_char,
    refs_path: *const c_char,
    per_sentence: bool,
    out_json: *mut *mut c_char,
) -> AdcStatus {
    guarded(|| {
        let submission_path = match unsafe { arg_str(submission_path, "submission_path") } {
            Ok(p) => p,
            Err(s) => return s,
        };
        let refs_path = match unsafe { arg_str(refs_path, "refs_path") } {
            Ok(p) => p,
            Err(s) => return s,
        };
        let run = || -> Result<String, Error> {
            let submission = parse_submission(&read_file(submission_path)?)?;
            let references = corpus_from_jsonl(&read_file(refs_path)?)?;
            let report = evaluate_submission(&submission, &references, per_sentence)?;
            Ok(report.to_json())
        };
        match run() {
            Ok(json) => emit(out_json, json),
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// The most recent error message on this thread as a malloc'd string, or
/// NULL when the last call succeeded. Free with [`adc_string_free`].
#[no_mangle]
pub extern "C" fn adc_last_error() -> *mut c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(message) => message.clone().into_raw(),
        None => std::ptr::null_mut(),
    })
}

/// Free a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must be NULL or a pointer obtained from this library that has not
/// been freed yet.
#[no_mangle]
pub unsafe extern "C" fn adc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}
