use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use signrank_ffi::*;

fn parse(spec: &str) -> *mut SrPredicate {
    let s = CString::new(spec).unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { sr_predicate_parse(s.as_ptr(), &mut p) }, SrStatus::Ok);
    p
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(sr_last_error()) }.to_str().unwrap().to_string()
}

fn take_string(s: *mut c_char) -> String {
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { sr_string_free(s) };
    out
}

#[test]
fn predicate_round_trip() {
    let p = parse("threshold:n=16,t=5");
    let (mut n, mut deg, mut deg2) = (0, 0, 0);
    unsafe {
        assert_eq!(sr_predicate_n(p, &mut n), SrStatus::Ok);
        assert_eq!(sr_predicate_degrees(p, &mut deg, &mut deg2), SrStatus::Ok);
        sr_predicate_free(p);
    }
    assert_eq!((n, deg, deg2), (16, 1, 2));
}

#[test]
fn errors_are_reported() {
    let bad = CString::new("+0-").unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { sr_predicate_parse(bad.as_ptr(), &mut p) }, SrStatus::ParseError);
    assert!(p.is_null());
    assert!(last_error().contains("position 1"));

    assert_eq!(unsafe { sr_predicate_parse(ptr::null(), &mut p) }, SrStatus::NullPointer);
    let mut n = 0;
    assert_eq!(unsafe { sr_predicate_n(ptr::null(), &mut n) }, SrStatus::NullPointer);

    let p = parse("parity:n=48");
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { sr_reduce_json(p, &mut s) }, SrStatus::InvalidArgument);
    assert!(last_error().contains("power of two"));
    unsafe {
        sr_predicate_free(p);
        sr_predicate_free(ptr::null_mut());
        sr_certificate_free(ptr::null_mut());
        sr_string_free(ptr::null_mut());
    }
}

#[test]
fn certificate_lifecycle() {
    let p = parse("threshold:n=8,t=3");
    let mut c = ptr::null_mut();
    let (mut support, mut bound) = (0u64, 0u64);
    let mut report = SrVerifyReport::default();
    unsafe {
        assert_eq!(sr_certificate_lift(p, &mut c), SrStatus::Ok);
        assert_eq!(sr_certificate_support(c, &mut support), SrStatus::Ok);
        assert_eq!(sr_certificate_bound(c, &mut bound), SrStatus::Ok);
        assert_eq!(sr_certificate_verify(c, true, &mut report), SrStatus::Ok);
    }
    assert_eq!((support, bound), (10, 64));
    assert!(report.all_ok && report.rank_checked && report.rank_ok);
    assert_eq!(report.rank, 10);

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { sr_certificate_to_json(c, &mut json) }, SrStatus::Ok);
    let text = take_string(json);
    assert!(text.contains("\"support\":10"));

    // tamper with one level and reload
    let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
    let level = value["levels"][0].as_str().unwrap().to_string();
    value["levels"][0] = serde_json::Value::String(level.strip_prefix('-').map_or(format!("-{level}"), str::to_string));
    let tampered = CString::new(value.to_string()).unwrap();
    let mut t = ptr::null_mut();
    unsafe {
        assert_eq!(sr_certificate_from_json(tampered.as_ptr(), &mut t), SrStatus::Ok);
        assert_eq!(sr_certificate_verify(t, false, &mut report), SrStatus::Ok);
    }
    assert!(!report.sign_ok && !report.all_ok && !report.rank_checked);
    assert_eq!(report.rank, -1);

    let garbage = CString::new("{").unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { sr_certificate_from_json(garbage.as_ptr(), &mut g) }, SrStatus::ParseError);
    unsafe {
        sr_certificate_free(t);
        sr_certificate_free(c);
        sr_predicate_free(p);
    }
}

#[test]
fn support_overflow() {
    // support of this predicate at n = 120 is about 1e28
    let mut state = 0x2545_f491_4f6c_dd1du64;
    let spec: String = (0..=120)
        .map(|_| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            if state >> 63 == 1 { '+' } else { '-' }
        })
        .collect();
    let p = parse(&spec);
    let mut c = ptr::null_mut();
    let mut support = 0u64;
    unsafe {
        assert_eq!(sr_certificate_lift(p, &mut c), SrStatus::Ok);
        assert_eq!(sr_certificate_support(c, &mut support), SrStatus::Overflow);
        sr_certificate_free(c);
        sr_predicate_free(p);
    }
}

#[test]
fn simulate_and_json_reports() {
    let p = parse("parity:n=4");
    let mut c = ptr::null_mut();
    let mut sim = SrSimulation::default();
    unsafe {
        assert_eq!(sr_certificate_lift(p, &mut c), SrStatus::Ok);
        assert_eq!(sr_simulate(c, 0b0001, 0, 1000, 7, &mut sim), SrStatus::Ok);
    }
    assert_eq!((sim.d, sim.cost_bits), (1, 2));
    assert_eq!(sim.empirical_freq, 1.0);
    assert_eq!(sim.exact_bias, -1.0);
    assert_eq!(unsafe { sr_simulate(c, 1 << 4, 0, 10, 1, &mut sim) }, SrStatus::InvalidArgument);

    let mut s = ptr::null_mut();
    assert_eq!(unsafe { sr_bounds_json(p, &mut s) }, SrStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take_string(s)).unwrap();
    assert_eq!(v["xor"]["support_upper"], 1);
    assert_eq!(v["and"]["K"], 4);

    let q = parse("threshold:n=64,t=10");
    assert_eq!(unsafe { sr_reduce_json(q, &mut s) }, SrStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take_string(s)).unwrap();
    assert_eq!(v["verified"], true);
    unsafe {
        sr_certificate_free(c);
        sr_predicate_free(p);
        sr_predicate_free(q);
    }
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/signrank.h")).unwrap();
    for name in [
        "sr_predicate_parse",
        "sr_predicate_free",
        "sr_certificate_lift",
        "sr_certificate_verify",
        "sr_certificate_to_json",
        "sr_simulate",
        "sr_last_error",
        "SR_STATUS_OVERFLOW",
        "typedef struct SrPredicate SrPredicate",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "signrank.h"

int main(void) {
    SrPredicate *p = NULL;
    SrCertificate *c = NULL;
    SrVerifyReport r;
    uint64_t support = 0;
    if (sr_predicate_parse("--+++", &p) != SR_STATUS_OK) return 10;
    if (sr_certificate_lift(p, &c) != SR_STATUS_OK) return 11;
    if (sr_certificate_support(c, &support) != SR_STATUS_OK) return 12;
    if (sr_certificate_verify(c, true, &r) != SR_STATUS_OK || !r.all_ok) return 13;
    if (sr_predicate_parse("+0-", &p) != SR_STATUS_PARSE_ERROR) return 14;
    if (strlen(sr_last_error()) == 0) return 15;
    printf("support=%llu rank=%lld\n", (unsigned long long)support, (long long)r.rank);
    sr_certificate_free(c);
    sr_predicate_free(p);
    return 0;
}
"#;

/// Compiles a small C program against the generated header and the static
/// library, then runs it.
#[test]
fn c_program_links_and_runs() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir: PathBuf = exe.parent().and_then(|d| d.parent()).unwrap().to_path_buf();
    let lib = profile_dir.join("libsignrank_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());

    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let bin = dir.path().join("main");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let status = Command::new(std::env::var("CC").unwrap_or_else(|_| "cc".into()))
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-I")
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include"))
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("C compiler available");
    assert!(status.success(), "C compile failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "C program exited with {:?}", out.status.code());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "support=6 rank=6");
}
