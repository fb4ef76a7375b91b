use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use mustar_alba_ffi::*;

fn take(s: *mut std::ffi::c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { ma_string_free(s) };
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(ma_last_error()) }.to_str().unwrap().to_string()
}

fn parse(text: &str) -> *mut MaInequality {
    let c = CString::new(text).unwrap();
    let mut i = ptr::null_mut();
    assert_eq!(unsafe { ma_inequality_parse(c.as_ptr(), &mut i) }, MaStatus::Ok);
    i
}

#[test]
fn tame_golden_through_the_c_api() {
    let i = parse("<>p & []q <= mu Y. (<>(p & q) & []Y)");
    assert_eq!(take(unsafe { ma_inequality_print(i) }), "<>p & []q <= mu Y.(<>(p & q) & []Y)");
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { ma_run(i, MaMode::Tame as i32, &mut r) }, MaStatus::Ok);
    assert!(unsafe { ma_run_succeeded(r) });
    let doc: serde_json::Value = serde_json::from_str(&take(unsafe { ma_run_json(r) })).unwrap();
    assert_eq!(doc["run_kind"], "TameRun");
    assert_eq!(doc["pure_system"][0]["antecedent"][1], "mu* Y.(<>($j1 & <b>$i0) & []Y) <= #m0");
    for k in 0..ma_battery_len() {
        let mut a = ptr::null_mut();
        assert_eq!(unsafe { ma_battery_get(k, &mut a) }, MaStatus::Ok);
        let (mut vi, mut vo) = (false, true);
        assert_eq!(unsafe { ma_check_inequality(a, i, &mut vi) }, MaStatus::Ok);
        assert_eq!(unsafe { ma_check_run(a, r, &mut vo) }, MaStatus::Ok);
        assert_eq!(vi, vo);
        unsafe { ma_algebra_free(a) };
    }
    unsafe {
        ma_run_free(r);
        ma_inequality_free(i);
    }
}

#[test]
fn errors_are_reported() {
    let bad = CString::new("p <=").unwrap();
    let mut i = ptr::null_mut();
    assert_eq!(unsafe { ma_inequality_parse(bad.as_ptr(), &mut i) }, MaStatus::InvalidInput);
    assert!(i.is_null());
    assert!(last_error().contains("syntax error"));
    assert_eq!(unsafe { ma_inequality_parse(ptr::null(), &mut i) }, MaStatus::NullPointer);
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { ma_run(ptr::null(), 0, &mut r) }, MaStatus::NullPointer);
    let i = parse("p <= p");
    assert_eq!(unsafe { ma_run(i, 7, &mut r) }, MaStatus::InvalidInput);
    assert!(last_error().contains("unknown mode"));
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { ma_classify(i, &mut out) }, MaStatus::Ok);
    assert!(take(out).contains("TameInductive"));
    let json = CString::new(r#"{"elements":["0","a","b","1"],"leq":[["0","a"],["0","b"],["a","1"]],"box":{},"dia":{}}"#).unwrap();
    let mut a = ptr::null_mut();
    assert_eq!(unsafe { ma_algebra_load_json(json.as_ptr(), &mut a) }, MaStatus::InvalidInput);
    assert!(!last_error().is_empty());
    unsafe { ma_inequality_free(i) };
}

#[test]
fn stuck_run_is_negative() {
    let i = parse("(mu X. (p | <>X)) & (mu X. (q | <>X)) <= mu X. ((p & mu Y. (q | <>Y)) | <>X)");
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { ma_run(i, MaMode::Tame as i32, &mut r) }, MaStatus::Negative);
    assert!(!r.is_null());
    let mut v = false;
    let mut a = ptr::null_mut();
    assert_eq!(unsafe { ma_battery_get(0, &mut a) }, MaStatus::Ok);
    assert_eq!(unsafe { ma_check_run(a, r, &mut v) }, MaStatus::Negative);
    assert!(take(unsafe { ma_run_text(r, false) }).contains("stuck"));
    unsafe {
        ma_algebra_free(a);
        ma_run_free(r);
        ma_inequality_free(i);
    }
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/mustar_alba.h")).unwrap();
    for name in [
        "ma_last_error",
        "ma_string_free",
        "ma_inequality_parse",
        "ma_inequality_free",
        "ma_classify",
        "ma_run(",
        "ma_run_json",
        "ma_run_free",
        "ma_algebra_load_json",
        "ma_battery_get",
        "ma_check_inequality",
        "ma_check_run",
        "typedef struct MaRun MaRun",
        "MA_STATUS_NULL_POINTER = 3",
    ] {
        assert!(h.contains(name), "{name}");
    }
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include "mustar_alba.h"
int main(void) {
    MaInequality *i = NULL;
    MaRun *r = NULL;
    if (ma_inequality_parse("<>p & []q <= mu Y. (<>(p & q) & []Y)", &i) != MA_STATUS_OK) return 10;
    if (ma_run(i, MA_MODE_TAME, &r) != MA_STATUS_OK) return 11;
    char *text = ma_run_text(r, false);
    printf("%s", text);
    ma_string_free(text);
    if (ma_inequality_parse("p <=", &i) != MA_STATUS_INVALID_INPUT) return 12;
    ma_run_free(r);
    ma_inequality_free(i);
    return 0;
}
"#;

#[test]
fn header_compiles_and_links_from_c() {
    let tmp = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let lib_dir = tmp.parent().unwrap().join(if cfg!(debug_assertions) { "debug" } else { "release" });
    let archive = lib_dir.join("libmustar_alba_ffi.a");
    let src = tmp.join("c_api_smoke.c");
    let exe = tmp.join("c_api_smoke");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let include = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    let syntax = Command::new("cc").args(["-fsyntax-only", "-Wall", "-Werror", "-I", include]).arg(&src).status();
    let Ok(syntax) = syntax else {
        eprintln!("no C compiler available");
        return;
    };
    assert!(syntax.success());
    if !archive.exists() {
        eprintln!("{} not built; header checked only", archive.display());
        return;
    }
    let st = Command::new("cc")
        .args(["-I", include])
        .arg(&src)
        .arg(&archive)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(st.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{:?}", out);
    assert!(String::from_utf8_lossy(&out.stdout).contains("status: success"));
}
