//! Exercises the C ABI exactly as a foreign caller would: through the
//! exported extern "C" functions with C strings and out-pointers.

use std::ffi::{c_char, CStr, CString};
use std::path::Path;

use adcorpus::audio::{write_wav, AudioTrack, BitDepth};
use adcorpus_ffi::*;

fn cstring(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn take_string(ptr: *mut c_char) -> String {
    assert!(!ptr.is_null());
    let s = unsafe { CStr::from_ptr(ptr) }.to_str().unwrap().to_string();
    unsafe { adc_string_free(ptr) };
    s
}

fn last_error() -> Option<String> {
    let ptr = adc_last_error();
    if ptr.is_null() {
        None
    } else {
        Some(take_string(ptr))
    }
}

fn write_noise_wav(path: &Path, seed: u64, n: usize, rate: u32) {
    // small deterministic LCG; no RNG dependency needed here
    let mut state = seed.wrapping_mul(2862933555777941757).wrapping_add(3037000493);
    let samples: Vec<f64> = (0..n)
        .map(|_| {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 33) as f64 / u32::MAX as f64) - 0.5
        })
        .collect();
    write_wav(&AudioTrack::mono(samples, rate), path, BitDepth::Float32).unwrap();
}

#[test]
fn version_is_a_static_string() {
    let v = unsafe { CStr::from_ptr(adc_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn config_lifecycle_and_load_errors() {
    let cfg = adc_config_default();
    assert!(!cfg.is_null());
    unsafe { adc_config_free(cfg) };

    let missing = cstring("/not/a/real/config.toml");
    let cfg = unsafe { adc_config_load(missing.as_ptr()) };
    assert!(cfg.is_null());
    assert!(last_error().is_some());

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.toml");
    std::fs::write(&path, "[segment]\nmin_seg_sec = 0.25\n").unwrap();
    let cpath = cstring(path.to_str().unwrap());
    let cfg = unsafe { adc_config_load(cpath.as_ptr()) };
    assert!(!cfg.is_null());
    unsafe { adc_config_free(cfg) };

    std::fs::write(&path, "bogus_key = true\n").unwrap();
    let cfg = unsafe { adc_config_load(cpath.as_ptr()) };
    assert!(cfg.is_null());
    assert!(last_error().unwrap().contains("bogus_key"));
}

#[test]
fn segment_auto_over_the_boundary() {
    let dir = tempfile::tempdir().unwrap();
    let movie = dir.path().join("movie.wav");
    let admix = dir.path().join("admix.wav");
    write_noise_wav(&movie, 7, 16000 * 6, 16000);
    // ad mix == movie plus one loud burst in the middle
    let base = adcorpus::audio::load_wav(&movie).unwrap();
    let mut samples = base.samples().unwrap().to_vec();
    for (i, s) in samples.iter_mut().enumerate().skip(16000 * 2).take(16000 * 2) {
        *s += ((i as f64) * 0.21).sin() * 0.8;
    }
    write_wav(
        &AudioTrack::mono(samples, 16000),
        &admix,
        BitDepth::Float32,
    )
    .unwrap();

    let cfg = adc_config_default();
    let movie_c = cstring(movie.to_str().unwrap());
    let admix_c = cstring(admix.to_str().unwrap());
    let mut out: *mut c_char = std::ptr::null_mut();
    let status = unsafe { adc_segment_auto(cfg, movie_c.as_ptr(), admix_c.as_ptr(), &mut out) };
    assert!(matches!(status, AdcStatus::Ok));
    let json = take_string(out);
    assert!(json.contains("start_sec"), "{json}");
    let segments = adcorpus::segment::segments_from_json(&json).unwrap();
    assert_eq!(segments.len(), 1);
    unsafe { adc_config_free(cfg) };
}

#[test]
fn segment_rejects_null_and_missing_inputs() {
    let mut out: *mut c_char = std::ptr::null_mut();
    let status =
        unsafe { adc_segment_auto(std::ptr::null(), std::ptr::null(), std::ptr::null(), &mut out) };
    assert!(matches!(status, AdcStatus::UsageError));
    assert!(last_error().unwrap().contains("movie_wav"));

    let missing = cstring("/no/such/movie.wav");
    let status = unsafe {
        adc_segment_auto(
            std::ptr::null(),
            missing.as_ptr(),
            missing.as_ptr(),
            &mut out,
        )
    };
    assert!(matches!(status, AdcStatus::InputError));
}

#[test]
fn parse_srt_over_the_boundary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("subs.srt");
    std::fs::write(
        &path,
        "1\n00:00:01,000 --> 00:00:02,000\nHello\n\n2\nbad timecode\nX\n",
    )
    .unwrap();
    let cpath = cstring(path.to_str().unwrap());
    let mut out: *mut c_char = std::ptr::null_mut();
    let status = unsafe { adc_parse_srt_file(cpath.as_ptr(), &mut out) };
    assert!(matches!(status, AdcStatus::Ok));
    let json = take_string(out);
    let value: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(value["subtitles"].as_array().unwrap().len(), 1);
    assert_eq!(value["warnings"].as_array().unwrap().len(), 1);
}

#[test]
fn eval_over_the_boundary() {
    let dir = tempfile::tempdir().unwrap();
    let refs_path = dir.path().join("refs.jsonl");
    let sub_path = dir.path().join("sub.json");
    std::fs::write(
        &refs_path,
        concat!(
            "{\"clip_id\":\"c1\",\"movie_id\":\"m\",\"start_sec\":0.0,\"end_sec\":2.0,\"sentence\":\"a man walks home\",\"source\":\"ad\"}\n",
            "{\"clip_id\":\"c2\",\"movie_id\":\"m\",\"start_sec\":5.0,\"end_sec\":7.0,\"sentence\":\"two dogs chase a ball\",\"source\":\"ad\"}\n",
        ),
    )
    .unwrap();
    std::fs::write(
        &sub_path,
        r#"[{"video_id":"c1","caption":"a man walks home"},{"video_id":"c2","caption":"two dogs chase a ball"}]"#,
    )
    .unwrap();
    let refs_c = cstring(refs_path.to_str().unwrap());
    let sub_c = cstring(sub_path.to_str().unwrap());
    let mut out: *mut c_char = std::ptr::null_mut();
    let status = unsafe { adc_eval_files(sub_c.as_ptr(), refs_c.as_ptr(), false, &mut out) };
    assert!(matches!(status, AdcStatus::Ok));
    let json = take_string(out);
    let value: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(value["bleu_1"].as_f64().unwrap(), 1.0);
    assert_eq!(value["rouge_l"].as_f64().unwrap(), 1.0);

    // missing id surfaces as an input error with a message
    std::fs::write(&sub_path, r#"[{"video_id":"c1","caption":"a man walks home"}]"#).unwrap();
    let status = unsafe { adc_eval_files(sub_c.as_ptr(), refs_c.as_ptr(), false, &mut out) };
    assert!(matches!(status, AdcStatus::InputError));
    assert!(last_error().unwrap().contains("c2"));
}

#[test]
fn generated_header_exists_and_declares_the_api() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("include")
        .join("adcorpus.h");
    let text = std::fs::read_to_string(&header).expect("cbindgen header generated at build time");
    for symbol in [
        "adc_version",
        "adc_config_default",
        "adc_config_load",
        "adc_config_free",
        "adc_segment_auto",
        "adc_segment_semi",
        "adc_parse_srt_file",
        "adc_eval_files",
        "adc_last_error",
        "adc_string_free",
        "AdcStatus",
        "AdcConfig",
    ] {
        assert!(text.contains(symbol), "header missing {symbol}");
    }
}
