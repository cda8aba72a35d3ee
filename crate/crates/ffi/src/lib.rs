//! C interface to `zeckgap`.
//!
//! Objects are opaque handles released with their `*_free` function. Every
//! fallible call returns a [`ZgStatus`]; on failure [`zg_last_error`] holds a
//! message for the calling thread. Strings returned through `char **` are owned
//! by the caller and released with [`zg_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_bigint::BigUint;
use zeckgap::bulkgaps::BulkGapTheory;
use zeckgap::longestgap::{self, GapGrammarPolynomials, MeanVarMode};
use zeckgap::{Error, Recurrence, SequenceTable, SpectralData};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// A precondition of the computation does not hold.
    Domain = 3,
    Numerical = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZgMeanVarMode {
    ExactSum = 0,
    AsymptoticSum = 1,
    ClosedForm = 2,
}

pub struct ZgRecurrence(Recurrence);

pub struct ZgTable(SequenceTable);

pub struct ZgPolynomials(GapGrammarPolynomials);

pub struct ZgBulkTheory(BulkGapTheory);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> ZgStatus {
    match e {
        Error::EmptyRecurrence
        | Error::LeadingCoefficientZero
        | Error::LastCoefficientZero
        | Error::DegenerateRecurrence
        | Error::Parse { .. }
        | Error::Malformed(_)
        | Error::InvalidArgument(_)
        | Error::ZeroValue
        | Error::EmptySamples => ZgStatus::InvalidArgument,
        Error::RootFinding(_)
        | Error::RootValidation { .. }
        | Error::NonContraction(_)
        | Error::Overflow(_)
        | Error::InsufficientDepth(_) => ZgStatus::Numerical,
        _ => ZgStatus::Domain,
    }
}

/// Runs `f`, converting errors and panics into a status and the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), (ZgStatus, String)>) -> ZgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ZgStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            ZgStatus::Panic
        }
    }
}

fn lift<T>(r: zeckgap::Result<T>) -> Result<T, (ZgStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null() -> (ZgStatus, String) {
    (ZgStatus::NullPointer, "null pointer argument".into())
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, (ZgStatus, String)> {
    p.as_ref().ok_or_else(null)
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, (ZgStatus, String)> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (ZgStatus::InvalidArgument, "string is not UTF-8".into()))
}

unsafe fn read_big(p: *const c_char) -> Result<BigUint, (ZgStatus, String)> {
    let s = read_str(p)?;
    s.parse()
        .map_err(|_| (ZgStatus::InvalidArgument, format!("`{s}` is not a non-negative integer")))
}

unsafe fn write_out<T>(out: *mut T, v: T) -> Result<(), (ZgStatus, String)> {
    if out.is_null() {
        return Err(null());
    }
    out.write(v);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), (ZgStatus, String)> {
    let c = CString::new(s).map_err(|_| (ZgStatus::Panic, "interior nul".into()))?;
    write_out(out, c.into_raw())
}

unsafe fn write_handle<T>(out: *mut *mut T, v: T) -> Result<(), (ZgStatus, String)> {
    write_out(out, Box::into_raw(Box::new(v)))
}

/// Message for the most recent failure on this thread. Valid until the next
/// failing call on the same thread; never null.
#[no_mangle]
pub extern "C" fn zg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn zg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Recurrence from `len` coefficients `c_1..c_L`.
///
/// # Safety
/// `coeffs` must point to `len` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zg_recurrence_new(
    coeffs: *const u32,
    len: usize,
    out: *mut *mut ZgRecurrence,
) -> ZgStatus {
    guard(|| {
        if coeffs.is_null() && len > 0 {
            return Err(null());
        }
        let c = if len == 0 {
            Vec::new()
        } else {
            std::slice::from_raw_parts(coeffs, len).to_vec()
        };
        write_handle(out, ZgRecurrence(lift(Recurrence::new(c))?))
    })
}

/// Recurrence from text such as `"1,1"`.
///
/// # Safety
/// `text` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zg_recurrence_parse(text: *const c_char, out: *mut *mut ZgRecurrence) -> ZgStatus {
    guard(|| {
        let r = lift(read_str(text)?.parse::<Recurrence>())?;
        write_handle(out, ZgRecurrence(r))
    })
}

/// # Safety
/// `r` must be null or a handle from `zg_recurrence_new`/`zg_recurrence_parse`.
#[no_mangle]
pub unsafe extern "C" fn zg_recurrence_free(r: *mut ZgRecurrence) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Table of `G_1..G_len`.
///
/// # Safety
/// `rec` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zg_table_new(rec: *const ZgRecurrence, len: usize, out: *mut *mut ZgTable) -> ZgStatus {
    guard(|| {
        let r = deref(rec)?;
        write_handle(out, ZgTable(SequenceTable::new(r.0.clone(), len)))
    })
}

/// # Safety
/// `t` must be null or a handle from `zg_table_new`.
#[no_mangle]
pub unsafe extern "C" fn zg_table_free(t: *mut ZgTable) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Number of terms held by the table.
///
/// # Safety
/// `t` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zg_table_len(t: *const ZgTable, out: *mut usize) -> ZgStatus {
    guard(|| write_out(out, deref(t)?.0.len()))
}

/// `G_n` in decimal.
///
/// # Safety
/// `t` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zg_table_get(t: *const ZgTable, n: usize, out: *mut *mut c_char) -> ZgStatus {
    guard(|| {
        let v = lift(deref(t)?.0.get(n))?;
        write_string(out, v.to_string())
    })
}

/// Decomposition of the decimal integer `m` as JSON `[[index, multiplicity], ...]`.
///
/// # Safety
/// `t` must be a live handle, `m` a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zg_decompose(t: *const ZgTable, m: *const c_char, out: *mut *mut c_char) -> ZgStatus {
    guard(|| {
        let d = lift(zeckgap::decompose(&deref(t)?.0, &read_big(m)?))?;
        let json = serde_json::to_string(&d).expect("serializable");
        write_string(out, json)
    })
}

/// Longest gap of `m`'s decomposition (trailing gap excluded).
///
/// # Safety
/// As for [`zg_decompose`].
#[no_mangle]
pub unsafe extern "C" fn zg_longest_gap(t: *const ZgTable, m: *const c_char, out: *mut usize) -> ZgStatus {
    guard(|| {
        let d = lift(zeckgap::decompose(&deref(t)?.0, &read_big(m)?))?;
        write_out(out, zeckgap::longest_gap(&d))
    })
}

/// Spectral data as JSON.
///
/// # Safety
/// `rec` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zg_spectral_json(rec: *const ZgRecurrence, out: *mut *mut c_char) -> ZgStatus {
    guard(|| {
        let s = lift(SpectralData::compute(&deref(rec)?.0))?;
        write_string(out, serde_json::to_string(&s).expect("serializable"))
    })
}

/// Limiting gap distribution; fails unless every coefficient is positive.
///
/// # Safety
/// `rec` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zg_bulk_theory_new(rec: *const ZgRecurrence, out: *mut *mut ZgBulkTheory) -> ZgStatus {
    guard(|| {
        let r = &deref(rec)?.0;
        let spec = lift(SpectralData::compute(r))?;
        write_handle(out, ZgBulkTheory(lift(BulkGapTheory::new(r, &spec))?))
    })
}

/// # Safety
/// `t` must be null or a handle from `zg_bulk_theory_new`.
#[no_mangle]
pub unsafe extern "C" fn zg_bulk_theory_free(t: *mut ZgBulkTheory) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// `P(k)`.
///
/// # Safety
/// `t` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zg_bulk_p_limit(t: *const ZgBulkTheory, k: usize, out: *mut f64) -> ZgStatus {
    guard(|| write_out(out, deref(t)?.0.p(k)))
}

/// Longest-gap polynomials. With `relaxed` non-zero, assumption violations
/// are tolerated.
///
/// # Safety
/// `rec` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zg_polynomials_new(
    rec: *const ZgRecurrence,
    relaxed: i32,
    out: *mut *mut ZgPolynomials,
) -> ZgStatus {
    guard(|| {
        let r = &deref(rec)?.0;
        let p = if relaxed != 0 {
            longestgap::build_polynomials_relaxed(r)
        } else {
            longestgap::build_polynomials(r)
        };
        write_handle(out, ZgPolynomials(lift(p)?))
    })
}

/// # Safety
/// `p` must be null or a handle from `zg_polynomials_new`.
#[no_mangle]
pub unsafe extern "C" fn zg_polynomials_free(p: *mut ZgPolynomials) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// `K = lambda_1 R(1/lambda_1) / G(1/lambda_1)`.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zg_k_const(p: *const ZgPolynomials, out: *mut f64) -> ZgStatus {
    guard(|| write_out(out, deref(p)?.0.k_const()))
}

/// Count of `m` in `[G_n, G_{n+1})` with longest gap below `f`, in decimal.
///
/// # Safety
/// `t` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zg_count_less_than(
    t: *const ZgTable,
    n: usize,
    f: usize,
    out: *mut *mut c_char,
) -> ZgStatus {
    guard(|| {
        let c = lift(longestgap::count_less_than(&deref(t)?.0, n, f))?;
        write_string(out, c.to_string())
    })
}

/// Exact `P(n, f)` from the roots of `T_f`; the table must reach `n + 1`.
///
/// # Safety
/// `t` and `p` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zg_cdf_exact(
    t: *const ZgTable,
    p: *const ZgPolynomials,
    n: usize,
    f: usize,
    out: *mut f64,
) -> ZgStatus {
    guard(|| {
        let v = lift(longestgap::cdf_exact(&deref(t)?.0, &deref(p)?.0, n, f))?;
        write_out(out, v)
    })
}

/// `exp(-n K lambda_1^{-f})`.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zg_cdf_asymptotic(p: *const ZgPolynomials, n: f64, f: usize, out: *mut f64) -> ZgStatus {
    guard(|| write_out(out, longestgap::cdf_asymptotic(&deref(p)?.0, n, f)))
}

/// Mean and variance of the longest gap. `t` may be null except for the exact sum.
///
/// # Safety
/// `p` must be a live handle, `t` null or live; `mean` and `variance` writable.
#[no_mangle]
pub unsafe extern "C" fn zg_mean_var(
    p: *const ZgPolynomials,
    t: *const ZgTable,
    n: usize,
    mode: ZgMeanVarMode,
    mean: *mut f64,
    variance: *mut f64,
) -> ZgStatus {
    guard(|| {
        let mode = match mode {
            ZgMeanVarMode::ExactSum => MeanVarMode::ExactSum,
            ZgMeanVarMode::AsymptoticSum => MeanVarMode::AsymptoticSum,
            ZgMeanVarMode::ClosedForm => MeanVarMode::ClosedForm,
        };
        let table = t.as_ref().map(|t| &t.0);
        let mv = lift(longestgap::mean_var(&deref(p)?.0, n, mode, table))?;
        write_out(mean, mv.mean)?;
        write_out(variance, mv.variance)
    })
}

/// Coin-toss longest run of heads.
///
/// # Safety
/// `mean` and `variance` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zg_coin_run_baseline(n: f64, p: f64, mean: *mut f64, variance: *mut f64) -> ZgStatus {
    guard(|| {
        let mv = lift(longestgap::coin_run_baseline(n, p))?;
        write_out(mean, mv.mean)?;
        write_out(variance, mv.variance)
    })
}
