use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use betafreq_ffi::*;

fn golden() -> *mut BfParams {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { bf_params_new(2, &mut p) }, BfStatus::Ok);
    assert!(!p.is_null());
    p
}

fn last_error() -> String {
    let e = bf_last_error();
    assert!(!e.is_null());
    unsafe { CStr::from_ptr(e) }.to_string_lossy().into_owned()
}

#[test]
fn params_lifecycle() {
    let p = golden();
    let (mut order, mut beta) = (0u32, 0f64);
    assert_eq!(unsafe { bf_params_info(p, &mut order, &mut beta) }, BfStatus::Ok);
    assert_eq!(order, 2);
    assert!((beta - 1.618033988749895).abs() < 1e-15);
    unsafe { bf_params_free(p) };
    unsafe { bf_params_free(ptr::null_mut()) };

    let mut q = ptr::null_mut();
    assert_eq!(unsafe { bf_params_new(1, &mut q) }, BfStatus::InvalidArgument);
    assert!(q.is_null());
    assert!(!last_error().is_empty());
}

#[test]
fn normalize_into_buffer() {
    let p = golden();
    let word = CString::new("0101011").unwrap();
    let mut written = 0usize;
    assert_eq!(
        unsafe { bf_normalize(p, word.as_ptr(), ptr::null_mut(), 0, &mut written) },
        BfStatus::BufferTooSmall
    );
    assert_eq!(written, 8);
    let mut buf = vec![0 as std::ffi::c_char; written];
    assert_eq!(
        unsafe { bf_normalize(p, word.as_ptr(), buf.as_mut_ptr(), buf.len(), &mut written) },
        BfStatus::Ok
    );
    assert_eq!(unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap(), "1000000");
    assert!(bf_last_error().is_null());

    let bad = CString::new("01a").unwrap();
    assert_eq!(
        unsafe { bf_normalize(p, bad.as_ptr(), buf.as_mut_ptr(), buf.len(), &mut written) },
        BfStatus::Parse
    );
    assert_eq!(
        unsafe { bf_normalize(ptr::null(), word.as_ptr(), buf.as_mut_ptr(), buf.len(), &mut written) },
        BfStatus::NullPointer
    );
    unsafe { bf_params_free(p) };
}

#[test]
fn predicates_and_values() {
    let p = golden();
    let mut normal = false;
    let w = CString::new("1101000").unwrap();
    assert_eq!(unsafe { bf_is_normal_form(p, w.as_ptr(), &mut normal) }, BfStatus::Ok);
    assert!(normal);
    let w = CString::new("0011").unwrap();
    assert_eq!(unsafe { bf_is_normal_form(p, w.as_ptr(), &mut normal) }, BfStatus::Ok);
    assert!(!normal);

    let mut a = 0.0;
    assert_eq!(unsafe { bf_parry_alpha1(p, &mut a) }, BfStatus::Ok);
    assert!((a - 0.276393202250021).abs() < 1e-14);

    let mut d = 0.0;
    assert_eq!(unsafe { bf_dimension(p, 5, 18, &mut d) }, BfStatus::Ok);
    assert!((d - 0.999978).abs() < 5e-7);
    assert_eq!(unsafe { bf_dimension(p, 3, 4, &mut d) }, BfStatus::Infeasible);
    assert!(last_error().contains("frequency outside subshift spectrum"));
    assert_eq!(unsafe { bf_dimension(p, 1, 0, &mut d) }, BfStatus::InvalidArgument);
    unsafe { bf_params_free(p) };
}

#[test]
fn monte_carlo() {
    let p = golden();
    let (mut est, mut err) = (0.0, 0.0);
    assert_eq!(unsafe { bf_mc_frequency(p, false, 20_000, 4, 3, &mut est, &mut err) }, BfStatus::Ok);
    assert!(err > 0.0 && (est - 5.0 / 18.0).abs() < 0.02);
    assert_eq!(unsafe { bf_mc_frequency(p, true, 20_000, 4, 3, &mut est, &mut err) }, BfStatus::Ok);
    assert!((est - 0.27639).abs() < 0.02);
    assert_eq!(unsafe { bf_mc_frequency(p, true, 10, 4, 3, &mut est, &mut err) }, BfStatus::InvalidArgument);
    unsafe { bf_params_free(p) };
}

#[test]
fn json_outputs() {
    let p = golden();
    let event = CString::new("y1=1").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { bf_exact_prob_json(p, event.as_ptr(), 12, &mut out) }, BfStatus::Ok);
    let s = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_owned();
    unsafe { bf_string_free(out) };
    assert!(s.starts_with("{\"event\":\"y1=1\""), "{s}");
    assert!(s.contains("\"depth\":12"));

    let bad = CString::new("q=1").unwrap();
    assert_eq!(unsafe { bf_exact_prob_json(p, bad.as_ptr(), 12, &mut out) }, BfStatus::Parse);

    assert_eq!(unsafe { bf_certificate_json(p, &mut out) }, BfStatus::Ok);
    let s = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_owned();
    unsafe { bf_string_free(out) };
    assert!(s.contains("\"separation\": \"above\""), "{s}");
    unsafe { bf_params_free(p) };
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(bf_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

/// Builds a C program against the generated header and the static library.
#[test]
fn c_program_links_against_header() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header_dir = manifest.join("include");
    assert!(header_dir.join("betafreq.h").exists());
    // the test binary lives in target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().unwrap().parent().unwrap();
    let lib = lib_dir.join("libbetafreq_ffi.a");
    assert!(lib.exists(), "missing {}", lib.display());
    let out_dir = tempfile::tempdir().unwrap();
    let bin = out_dir.path().join("smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(&header_dir)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
