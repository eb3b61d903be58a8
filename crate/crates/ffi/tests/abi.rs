use std::ffi::CStr;
use std::path::Path;
use std::process::Command;
use std::ptr;

use stackpmf_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    let n = unsafe { spmf_last_error_message(buf.as_mut_ptr(), buf.len()) };
    if n == 0 {
        return String::new();
    }
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn stacked_fit_round_trip() {
    let counts = [1u64, 2];
    let mut fit = ptr::null_mut();
    let st = unsafe { spmf_stacked_fit(counts.as_ptr(), 2, SpmfShape::Grenander as i32, &mut fit) };
    assert_eq!(st, SpmfStatus::Ok);
    unsafe {
        assert_eq!(spmf_fit_beta_hat(fit), 1.0);
        assert!((spmf_fit_a_n(fit) - 1.0 / 18.0).abs() < 1e-15);
        assert!((spmf_fit_b_n(fit) - 2.0 / 9.0).abs() < 1e-15);
        assert_eq!(spmf_fit_single_observation(fit), 0);
        assert_eq!(spmf_fit_len(fit), 2);
        let mut est = [0.0; 2];
        assert_eq!(spmf_fit_estimate(fit, est.as_mut_ptr(), 2), SpmfStatus::Ok);
        assert_eq!(est, [0.5, 0.5]);
        let mut small = [0.0; 1];
        assert_eq!(spmf_fit_estimate(fit, small.as_mut_ptr(), 1), SpmfStatus::BufferTooSmall);
        assert!(last_error().contains("buffer"));
        spmf_fit_free(fit);
        spmf_fit_free(ptr::null_mut());
    }
}

#[test]
fn estimate_and_cv_beta() {
    let counts = [3u64, 2, 1];
    let mut out = [0.0; 3];
    let st = unsafe {
        spmf_estimate(counts.as_ptr(), 3, SpmfEstimator::StackedGrenander as i32, out.as_mut_ptr(), 3)
    };
    assert_eq!(st, SpmfStatus::Ok);
    assert_eq!(out, [0.5, 2.0 / 6.0, 1.0 / 6.0]);

    let (mut b, mut a, mut bn) = (f64::NAN, f64::NAN, f64::NAN);
    let st = unsafe { spmf_cv_beta(counts.as_ptr(), 3, SpmfShape::Rearrangement as i32, &mut b, &mut a, &mut bn) };
    assert_eq!(st, SpmfStatus::Ok);
    assert_eq!((b, a), (0.0, 0.0));

    let one = [0u64, 1];
    let st = unsafe { spmf_cv_beta(one.as_ptr(), 2, 1, &mut b, &mut a, &mut bn) };
    assert_eq!(st, SpmfStatus::InsufficientSample);
    assert!(last_error().contains("n >= 2"), "{}", last_error());
}

#[test]
fn error_codes() {
    let mut out = [0.0; 4];
    unsafe {
        assert_eq!(spmf_estimate(ptr::null(), 3, 0, out.as_mut_ptr(), 4), SpmfStatus::NullPointer);
        assert_eq!(spmf_estimate(ptr::null(), 0, 0, out.as_mut_ptr(), 4), SpmfStatus::EmptyInput);
        let c = [1u64, 0];
        assert_eq!(spmf_estimate(c.as_ptr(), 2, 0, out.as_mut_ptr(), 4), SpmfStatus::InvalidData);
        let c = [1u64, 2];
        assert_eq!(spmf_estimate(c.as_ptr(), 2, 17, out.as_mut_ptr(), 4), SpmfStatus::UnknownKind);
        assert_eq!(spmf_estimate(c.as_ptr(), 2, -1, out.as_mut_ptr(), 4), SpmfStatus::UnknownKind);
        assert_eq!(spmf_estimate(c.as_ptr(), 2, 0, out.as_mut_ptr(), 4), SpmfStatus::Ok);
        assert_eq!(last_error(), "");
        assert_eq!(spmf_stacked_fit(c.as_ptr(), 2, 1, ptr::null_mut()), SpmfStatus::NullPointer);
    }
}

#[test]
fn shape_operations() {
    let v = [1.0, 3.0, 2.0];
    let mut out = [0.0; 3];
    unsafe {
        assert_eq!(spmf_isotonic_decreasing(v.as_ptr(), 3, out.as_mut_ptr()), SpmfStatus::Ok);
        assert_eq!(out, [2.0, 2.0, 2.0]);
        assert_eq!(spmf_rearrange_decreasing(v.as_ptr(), 3, out.as_mut_ptr()), SpmfStatus::Ok);
        assert_eq!(out, [3.0, 2.0, 1.0]);
        assert_eq!(spmf_isotonic_decreasing(v.as_ptr(), 0, out.as_mut_ptr()), SpmfStatus::EmptyInput);
    }
}

#[test]
fn band_handle() {
    let center = [0.5, 0.5];
    let mut band = ptr::null_mut();
    unsafe {
        let st = spmf_global_band(center.as_ptr(), 2, 100, 0.05, 10_000, 3, &mut band);
        assert_eq!(st, SpmfStatus::Ok);
        let q = spmf_band_q_hat(band);
        let want = stackpmf::band::quantile_q_alpha(&center, 0.05, 10_000, 3).unwrap();
        assert_eq!(q, want);
        assert_eq!(spmf_band_len(band), 2);
        let (mut lo, mut hi) = ([0.0; 2], [0.0; 2]);
        assert_eq!(spmf_band_bounds(band, lo.as_mut_ptr(), hi.as_mut_ptr(), 2), SpmfStatus::Ok);
        assert!((hi[0] - (0.5 + q / 10.0)).abs() < 1e-15);
        assert!((lo[1] - (0.5 - q / 10.0).max(0.0)).abs() < 1e-15);
        spmf_band_free(band);

        let bad = [0.5, 0.4];
        let st = spmf_global_band(bad.as_ptr(), 2, 100, 0.05, 1000, 3, &mut band);
        assert_eq!(st, SpmfStatus::InvalidPmf);
        assert!(band.is_null());
        let st = spmf_global_band(center.as_ptr(), 2, 100, 1.5, 1000, 3, &mut band);
        assert_eq!(st, SpmfStatus::ParameterDomain);
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(spmf_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_is_current_and_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/stackpmf.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for f in [
        "spmf_stacked_fit",
        "spmf_fit_free",
        "spmf_global_band",
        "spmf_band_free",
        "spmf_isotonic_decreasing",
        "spmf_last_error_message",
        "typedef struct SpmfFit SpmfFit;",
    ] {
        assert!(text.contains(f), "header lacks {f}");
    }
    // syntax check only when a C compiler is around
    if let Ok(status) = Command::new("cc").args(["-fsyntax-only", "-x", "c"]).arg(&header).status() {
        assert!(status.success());
    }
}
