use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use pathguess_ffi::*;

const MARKOV: &str = r#"{"family": "markov", "transitions": [[0.9, 0.1], [0.2, 0.8]]}"#;

fn model(json: &str) -> *mut PgModel {
    let text = CString::new(json).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { pg_model_from_json(text.as_ptr(), &mut m) }, PgStatus::Ok);
    m
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(pg_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn simulate_fit_guess_and_risk() {
    unsafe {
        let m = model(MARKOV);
        let mut s = ptr::null_mut();
        assert_eq!(pg_simulate(m, 3000, 11, &mut s), PgStatus::Ok);
        assert_eq!(pg_sample_len(s), 3000);

        let mut ids = vec![0u32; 3000];
        let mut written = 0;
        assert_eq!(pg_sample_ids(s, ids.as_mut_ptr(), ids.len(), &mut written), PgStatus::Ok);
        assert_eq!(written, 3000);
        assert!(ids.iter().all(|&x| x < 2));

        let mut r = ptr::null_mut();
        assert_eq!(pg_fit(s, [1i64].as_ptr(), 1, [2i64].as_ptr(), 1, &mut r), PgStatus::Ok);
        assert_eq!((pg_rule_data_len(r), pg_rule_guess_len(r)), (1, 1));
        for b in [0u32, 1] {
            let mut out = 9u32;
            assert_eq!(pg_rule_guess(r, &b, 1, &mut out, 1), PgStatus::Ok);
            assert_eq!(out, b);
        }
        let mut risk = -1.0;
        assert_eq!(pg_excess_risk(m, r, &mut risk), PgStatus::Ok);
        assert_eq!(risk, 0.0);

        let mut json = ptr::null_mut();
        assert_eq!(pg_rule_to_json(r, &mut json), PgStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        pg_string_free(json);
        let back: pathguess::GuessRule = serde_json::from_str(&text).unwrap();
        assert_eq!(back.pair().guess(), &[2]);

        pg_rule_free(r);
        pg_sample_free(s);
        pg_model_free(m);
    }
}

#[test]
fn same_seed_same_sample() {
    unsafe {
        let m = model(r#"{"family": "iid", "probs": [0.2, 0.3, 0.5]}"#);
        let draw = || {
            let mut s = ptr::null_mut();
            assert_eq!(pg_simulate(m, 100, 5, &mut s), PgStatus::Ok);
            let mut ids = vec![0u32; 100];
            let mut w = 0;
            assert_eq!(pg_sample_ids(s, ids.as_mut_ptr(), 100, &mut w), PgStatus::Ok);
            pg_sample_free(s);
            ids
        };
        assert_eq!(draw(), draw());
        pg_model_free(m);
    }
}

#[test]
fn error_codes_and_messages() {
    unsafe {
        let mut m = ptr::null_mut();
        let bad = CString::new(r#"{"family": "iid", "probs": [0.5, 0.6]}"#).unwrap();
        assert_eq!(pg_model_from_json(bad.as_ptr(), &mut m), PgStatus::InvalidArgument);
        assert!(m.is_null());
        assert!(last_error().contains("invalid model"), "{}", last_error());

        let garbage = CString::new("{").unwrap();
        assert_eq!(pg_model_from_json(garbage.as_ptr(), &mut m), PgStatus::Parse);
        assert_eq!(pg_model_from_json(ptr::null(), &mut m), PgStatus::NullPointer);

        let mut s = ptr::null_mut();
        assert_eq!(pg_sample_from_ids([0u32, 1].as_ptr(), 2, &mut s), PgStatus::Ok);
        let mut r = ptr::null_mut();
        let (d, g) = ([1i64, 2], [3i64]);
        assert_eq!(pg_fit(s, d.as_ptr(), 2, g.as_ptr(), 1, &mut r), PgStatus::NoTrainingWindows);
        assert_eq!(pg_fit(s, d.as_ptr(), 1, d.as_ptr(), 1, &mut r), PgStatus::InvalidArgument);
        assert!(r.is_null());

        let mut w = 0;
        let mut small = [0u32; 1];
        assert_eq!(pg_sample_ids(s, small.as_mut_ptr(), 1, &mut w), PgStatus::BufferTooSmall);
        assert_eq!(w, 2);
        assert_eq!(pg_sample_len(ptr::null()), 0);
        pg_sample_free(s);
        pg_sample_free(ptr::null_mut());
    }
}

/// Directory holding the static library built for this test run.
fn artifact_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn header_compiles_and_links_from_c() {
    let crate_dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = artifact_dir().join("libpathguess_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg(crate_dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("a C compiler is available");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout.contains("guess=1 risk=0 len=2000"), "{stdout}");
}
