//! C ABI over the `stackpmf` estimators.
//!
//! Every function returns an [`SpmfStatus`]; on failure a message is kept per
//! thread and can be copied out with [`spmf_last_error_message`]. Fits and
//! bands are returned as opaque handles that the caller releases with the
//! matching `*_free` function. Output arrays are caller-allocated; their
//! required length is available from the `*_len` accessors.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use stackpmf::band::{global_band, ConfidenceBand};
use stackpmf::estimators::{cv_beta, estimate, stacked, EstimatorKind, FrequencyData, ShapeKind, StackedFit};
use stackpmf::shape::{isotonic_decreasing, rearrange_decreasing};
use stackpmf::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpmfStatus {
    Ok = 0,
    NullPointer = 1,
    EmptyInput = 2,
    InsufficientSample = 3,
    ParameterDomain = 4,
    InvalidData = 5,
    InvalidPmf = 6,
    Numeric = 7,
    BufferTooSmall = 8,
    UnknownKind = 9,
    Panic = 10,
    Other = 11,
}

/// Estimator selector for [`spmf_estimate`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpmfEstimator {
    Empirical = 0,
    Minimax = 1,
    Rearrangement = 2,
    Grenander = 3,
    StackedRearrangement = 4,
    StackedGrenander = 5,
}

/// Shape fit stacked with the empirical estimator.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpmfShape {
    Rearrangement = 0,
    Grenander = 1,
}

/// Opaque stacked fit.
pub struct SpmfFit(StackedFit);

/// Opaque confidence band.
pub struct SpmfBand(ConfidenceBand);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> SpmfStatus {
    match e {
        Error::EmptyInput => SpmfStatus::EmptyInput,
        Error::InsufficientSample { .. } => SpmfStatus::InsufficientSample,
        Error::ParameterDomain(_) | Error::Config(_) => SpmfStatus::ParameterDomain,
        Error::InvalidData(_) | Error::Parse { .. } => SpmfStatus::InvalidData,
        Error::InvalidPmf(_) => SpmfStatus::InvalidPmf,
        Error::Numeric(_) => SpmfStatus::Numeric,
        Error::UnknownModel(_) => SpmfStatus::Other,
    }
}

struct Fail(SpmfStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SpmfStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SpmfStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside stackpmf".into());
            SpmfStatus::Panic
        }
    }
}

fn null() -> Fail {
    Fail(SpmfStatus::NullPointer, "null pointer argument".into())
}

/// # Safety
/// `p` must be null only when `len == 0`, otherwise valid for `len` reads.
unsafe fn slice<'a, T>(p: *const T, len: usize) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null());
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// # Safety
/// `out` must be valid for `cap` writes.
unsafe fn copy_out(src: &[f64], out: *mut f64, cap: usize) -> Result<(), Fail> {
    if src.len() > cap {
        return Err(Fail(
            SpmfStatus::BufferTooSmall,
            format!("output buffer holds {cap} values, {} needed", src.len()),
        ));
    }
    if src.is_empty() {
        return Ok(());
    }
    if out.is_null() {
        return Err(null());
    }
    ptr::copy_nonoverlapping(src.as_ptr(), out, src.len());
    Ok(())
}

unsafe fn counts(p: *const u64, len: usize) -> Result<FrequencyData, Fail> {
    Ok(FrequencyData::new(slice(p, len)?.to_vec())?)
}

fn estimator_kind(kind: i32) -> Result<EstimatorKind, Fail> {
    usize::try_from(kind)
        .ok()
        .and_then(|k| EstimatorKind::ALL.get(k).copied())
        .ok_or_else(|| Fail(SpmfStatus::UnknownKind, format!("unknown estimator code {kind}")))
}

fn shape_kind(shape: i32) -> Result<ShapeKind, Fail> {
    match shape {
        0 => Ok(ShapeKind::Rearrangement),
        1 => Ok(ShapeKind::Grenander),
        _ => Err(Fail(SpmfStatus::UnknownKind, format!("unknown shape code {shape}"))),
    }
}

/// Copies the last error message of this thread into `buf` (nul-terminated,
/// truncated to `cap`). Returns the full message length without the nul, or
/// 0 when there is no error.
///
/// # Safety
/// `buf` must be null or valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn spmf_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| match &*e.borrow() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes();
            if !buf.is_null() && cap > 0 {
                let n = bytes.len().min(cap - 1);
                ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n) = 0;
            }
            bytes.len()
        }
    })
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn spmf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Fits estimator `kind` (an [`SpmfEstimator`] value) to `counts[0..len]`.
/// The estimate has length `len`; `out` must hold at least that many values.
///
/// # Safety
/// `counts` must be valid for `len` reads and `out` for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn spmf_estimate(
    counts_ptr: *const u64,
    len: usize,
    kind: i32,
    out: *mut f64,
    cap: usize,
) -> SpmfStatus {
    guard(|| {
        let x = counts(counts_ptr, len)?;
        let kind = estimator_kind(kind)?;
        let p = estimate(&x, kind)?;
        copy_out(&p.probs, out, cap)
    })
}

/// Leave-one-out mixture weight and its quadratic coefficients.
///
/// # Safety
/// `counts` must be valid for `len` reads; the output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn spmf_cv_beta(
    counts_ptr: *const u64,
    len: usize,
    shape: i32,
    beta_hat: *mut f64,
    a_n: *mut f64,
    b_n: *mut f64,
) -> SpmfStatus {
    guard(|| {
        if beta_hat.is_null() || a_n.is_null() || b_n.is_null() {
            return Err(null());
        }
        let x = counts(counts_ptr, len)?;
        let cv = cv_beta(&x, shape_kind(shape)?)?;
        *beta_hat = cv.beta_hat;
        *a_n = cv.a_n;
        *b_n = cv.b_n;
        Ok(())
    })
}

/// Stacked fit handle; release with [`spmf_fit_free`].
///
/// # Safety
/// `counts` must be valid for `len` reads and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spmf_stacked_fit(
    counts_ptr: *const u64,
    len: usize,
    shape: i32,
    out: *mut *mut SpmfFit,
) -> SpmfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        *out = ptr::null_mut();
        let x = counts(counts_ptr, len)?;
        let fit = stacked(&x, shape_kind(shape)?)?;
        *out = Box::into_raw(Box::new(SpmfFit(fit)));
        Ok(())
    })
}

/// # Safety
/// `fit` must be null or a handle from [`spmf_stacked_fit`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn spmf_fit_free(fit: *mut SpmfFit) {
    if !fit.is_null() {
        drop(Box::from_raw(fit));
    }
}

/// Mixture weight of a fit; NaN for a null handle.
///
/// # Safety
/// `fit` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn spmf_fit_beta_hat(fit: *const SpmfFit) -> f64 {
    fit.as_ref().map_or(f64::NAN, |f| f.0.beta_hat)
}

/// # Safety
/// `fit` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn spmf_fit_a_n(fit: *const SpmfFit) -> f64 {
    fit.as_ref().map_or(f64::NAN, |f| f.0.a_n)
}

/// # Safety
/// `fit` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn spmf_fit_b_n(fit: *const SpmfFit) -> f64 {
    fit.as_ref().map_or(f64::NAN, |f| f.0.b_n)
}

/// Nonzero when n = 1 and the empirical estimator was returned.
///
/// # Safety
/// `fit` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn spmf_fit_single_observation(fit: *const SpmfFit) -> i32 {
    fit.as_ref().map_or(0, |f| i32::from(f.0.diagnostics.single_observation))
}

/// Length of the estimate vector; 0 for a null handle.
///
/// # Safety
/// `fit` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn spmf_fit_len(fit: *const SpmfFit) -> usize {
    fit.as_ref().map_or(0, |f| f.0.estimate.len())
}

/// Copies the stacked estimate into `out`.
///
/// # Safety
/// `fit` must be a live handle and `out` valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn spmf_fit_estimate(fit: *const SpmfFit, out: *mut f64, cap: usize) -> SpmfStatus {
    guard(|| {
        let fit = fit.as_ref().ok_or_else(null)?;
        copy_out(&fit.0.estimate.probs, out, cap)
    })
}

/// Copies the shape-constrained component into `out`.
///
/// # Safety
/// `fit` must be a live handle and `out` valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn spmf_fit_shape(fit: *const SpmfFit, out: *mut f64, cap: usize) -> SpmfStatus {
    guard(|| {
        let fit = fit.as_ref().ok_or_else(null)?;
        copy_out(&fit.0.shape.probs, out, cap)
    })
}

/// Nonincreasing least-squares fit of `values[0..len]` into `out[0..len]`.
///
/// # Safety
/// `values` must be valid for `len` reads and `out` for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn spmf_isotonic_decreasing(values: *const f64, len: usize, out: *mut f64) -> SpmfStatus {
    guard(|| {
        let (fit, _) = isotonic_decreasing(slice(values, len)?)?;
        copy_out(&fit, out, len)
    })
}

/// Values sorted in decreasing order into `out[0..len]`.
///
/// # Safety
/// `values` must be valid for `len` reads and `out` for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn spmf_rearrange_decreasing(values: *const f64, len: usize, out: *mut f64) -> SpmfStatus {
    guard(|| {
        let sorted = rearrange_decreasing(slice(values, len)?)?;
        copy_out(&sorted, out, len)
    })
}

/// Plug-in global band around `center[0..len]` for sample size `n`;
/// release with [`spmf_band_free`].
///
/// # Safety
/// `center` must be valid for `len` reads and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spmf_global_band(
    center: *const f64,
    len: usize,
    n: u64,
    alpha: f64,
    mc_reps: usize,
    seed: u64,
    out: *mut *mut SpmfBand,
) -> SpmfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        *out = ptr::null_mut();
        let b = global_band(slice(center, len)?, n, alpha, mc_reps, seed)?;
        *out = Box::into_raw(Box::new(SpmfBand(b)));
        Ok(())
    })
}

/// # Safety
/// `band` must be null or a handle from [`spmf_global_band`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn spmf_band_free(band: *mut SpmfBand) {
    if !band.is_null() {
        drop(Box::from_raw(band));
    }
}

/// Monte-Carlo quantile; NaN for a null handle.
///
/// # Safety
/// `band` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn spmf_band_q_hat(band: *const SpmfBand) -> f64 {
    band.as_ref().map_or(f64::NAN, |b| b.0.q_hat)
}

/// # Safety
/// `band` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn spmf_band_len(band: *const SpmfBand) -> usize {
    band.as_ref().map_or(0, |b| b.0.lower.len())
}

/// Copies the lower and upper envelopes; either output may be null to skip it.
///
/// # Safety
/// `band` must be a live handle; non-null outputs must be valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn spmf_band_bounds(
    band: *const SpmfBand,
    lower: *mut f64,
    upper: *mut f64,
    cap: usize,
) -> SpmfStatus {
    guard(|| {
        let b = band.as_ref().ok_or_else(null)?;
        if !lower.is_null() {
            copy_out(&b.0.lower, lower, cap)?;
        }
        if !upper.is_null() {
            copy_out(&b.0.upper, upper, cap)?;
        }
        Ok(())
    })
}
