//! C ABI for the signrank library.
//!
//! Every function returns an [`SrStatus`]. On failure a message is kept for
//! the calling thread and can be read with [`sr_last_error`]. Handles are
//! opaque and must be released with the matching `*_free` function;
//! strings returned through `char **` are released with [`sr_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use signrank::predicate::{self, Predicate};
use signrank::protocol;
use signrank::signrep::{self, CertificateRecord, LiftCertificate};
use signrank::{bounds, reduction, Error};

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidArgument = 4,
    /// The value does not fit the output type.
    Overflow = 5,
    Internal = 6,
    Panic = 7,
}

/// Opaque predicate handle.
pub struct SrPredicate {
    inner: Predicate,
}

/// Opaque certificate handle; keeps the predicate it was built for.
pub struct SrCertificate {
    cert: LiftCertificate,
    predicate: Predicate,
}

/// Verdicts of a certificate check. `rank` is −1 when the explicit matrix
/// was not built.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct SrVerifyReport {
    pub sign_ok: bool,
    pub support_ok: bool,
    pub structural_ok: bool,
    pub power_bound_ok: bool,
    pub levels_consistent: bool,
    pub spectrum_consistent: bool,
    pub support_consistent: bool,
    pub bound_consistent: bool,
    pub rank_checked: bool,
    pub rank_ok: bool,
    pub rank: i64,
    pub all_ok: bool,
}

/// Summary of a protocol run. Exact values are rounded to double.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct SrSimulation {
    pub exact_bias: f64,
    pub correct_prob: f64,
    pub empirical_freq: f64,
    pub std_error: f64,
    pub trials: u64,
    pub d: u64,
    pub cost_bits: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(SrStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::TooShort(_) | Error::NotASign { .. } | Error::Parse(_) | Error::Json(_) => SrStatus::ParseError,
            Error::Internal(_) => SrStatus::Internal,
            _ => SrStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(msg: &str) {
    let text = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            SrStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("panic inside signrank");
            SrStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(SrStatus::NullPointer, format!("{what} is null"))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|e| Failure(SrStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|e| Failure(SrStatus::Internal, e.to_string()))?;
    write_out(out, c.into_raw(), "out")
}

fn to_u64(v: &num_bigint::BigUint) -> Result<u64, Failure> {
    u64::try_from(v).map_err(|_| Failure(SrStatus::Overflow, format!("{v} does not fit in 64 bits")))
}

/// Parses a sign string (`"--+++"`) or family expression
/// (`"threshold:n=16,t=5"`).
///
/// # Safety
/// `spec` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sr_predicate_parse(spec: *const c_char, out: *mut *mut SrPredicate) -> SrStatus {
    guard(|| {
        let spec = text(spec, "spec")?;
        let p = predicate::parse_expr(spec)?;
        write_out(out, Box::into_raw(Box::new(SrPredicate { inner: p })), "out")
    })
}

/// # Safety
/// `p` must come from [`sr_predicate_parse`] or be null.
#[no_mangle]
pub unsafe extern "C" fn sr_predicate_free(p: *mut SrPredicate) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sr_predicate_n(p: *const SrPredicate, out: *mut usize) -> SrStatus {
    guard(|| write_out(out, borrow(p, "predicate")?.inner.n(), "out"))
}

/// Sign changes at distance one (`deg`) and two (`deg2`).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sr_predicate_degrees(p: *const SrPredicate, deg: *mut usize, deg2: *mut usize) -> SrStatus {
    guard(|| {
        let p = &borrow(p, "predicate")?.inner;
        write_out(deg, p.deg(), "deg")?;
        write_out(deg2, p.deg2(), "deg2")
    })
}

/// Builds the sparse sign representation of `D(|x ⊕ y|)`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sr_certificate_lift(p: *const SrPredicate, out: *mut *mut SrCertificate) -> SrStatus {
    guard(|| {
        let p = &borrow(p, "predicate")?.inner;
        let handle = SrCertificate { cert: signrep::lift(p), predicate: p.clone() };
        write_out(out, Box::into_raw(Box::new(handle)), "out")
    })
}

/// Loads a certificate as written by [`sr_certificate_to_json`] or the
/// `certify` command. Nothing is recomputed.
///
/// # Safety
/// `json` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sr_certificate_from_json(json: *const c_char, out: *mut *mut SrCertificate) -> SrStatus {
    guard(|| {
        let value: serde_json::Value = serde_json::from_str(text(json, "json")?).map_err(Error::from)?;
        let record_value = value.get("certificate").cloned().unwrap_or(value);
        let record: CertificateRecord = serde_json::from_value(record_value).map_err(Error::from)?;
        let (cert, predicate) = record.into_parts()?;
        write_out(out, Box::into_raw(Box::new(SrCertificate { cert, predicate })), "out")
    })
}

/// # Safety
/// `c` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn sr_certificate_free(c: *mut SrCertificate) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Number of nonzero Fourier coefficients; `SR_STATUS_OVERFLOW` above 2^64 − 1.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sr_certificate_support(c: *const SrCertificate, out: *mut u64) -> SrStatus {
    guard(|| write_out(out, to_u64(&borrow(c, "certificate")?.cert.support)?, "out"))
}

/// The stated combinatorial bound `4 Σ_{k ≤ M} C(⌊n/2⌋ + 1, k)`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sr_certificate_bound(c: *const SrCertificate, out: *mut u64) -> SrStatus {
    guard(|| write_out(out, to_u64(&borrow(c, "certificate")?.cert.bound)?, "out"))
}

/// Re-checks the certificate against its predicate. The explicit rank is
/// computed only when `check_rank` is set and `n ≤ 10`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sr_certificate_verify(
    c: *const SrCertificate,
    check_rank: bool,
    out: *mut SrVerifyReport,
) -> SrStatus {
    guard(|| {
        let c = borrow(c, "certificate")?;
        let r = signrep::verify_lift(&c.cert, &c.predicate, check_rank);
        let report = SrVerifyReport {
            sign_ok: r.sign_ok,
            support_ok: r.support_ok,
            structural_ok: r.structural_ok,
            power_bound_ok: r.power_bound_ok,
            levels_consistent: r.levels_consistent,
            spectrum_consistent: r.spectrum_consistent,
            support_consistent: r.support_consistent,
            bound_consistent: r.bound_consistent,
            rank_checked: r.rank_check.is_some(),
            rank_ok: r.rank_check.unwrap_or(false),
            rank: r.rank.map_or(-1, |v| v as i64),
            all_ok: r.all_ok(),
        };
        write_out(out, report, "out")
    })
}

/// JSON certificate record.
///
/// # Safety
/// Pointers must be valid; free the string with [`sr_string_free`].
#[no_mangle]
pub unsafe extern "C" fn sr_certificate_to_json(c: *const SrCertificate, out: *mut *mut c_char) -> SrStatus {
    guard(|| {
        let c = borrow(c, "certificate")?;
        let json = serde_json::to_string(&c.cert.to_record(&c.predicate)).map_err(Error::from)?;
        write_string(out, json)
    })
}

/// JSON reduction record; `n` must be a power of two, at least 64.
///
/// # Safety
/// Pointers must be valid; free the string with [`sr_string_free`].
#[no_mangle]
pub unsafe extern "C" fn sr_reduce_json(p: *const SrPredicate, out: *mut *mut c_char) -> SrStatus {
    guard(|| {
        let record = reduction::reduce(&borrow(p, "predicate")?.inner)?;
        write_string(out, serde_json::to_string(&record).map_err(Error::from)?)
    })
}

/// JSON object `{"xor": ..., "and": ...}` with both bound reports.
///
/// # Safety
/// Pointers must be valid; free the string with [`sr_string_free`].
#[no_mangle]
pub unsafe extern "C" fn sr_bounds_json(p: *const SrPredicate, out: *mut *mut c_char) -> SrStatus {
    guard(|| {
        let p = &borrow(p, "predicate")?.inner;
        let value = serde_json::json!({ "xor": bounds::xor_bounds(p), "and": bounds::and_bounds(p) });
        write_string(out, value.to_string())
    })
}

/// Runs the sampling protocol on `(x, y)`, with bit `i` of the masks as
/// coordinate `i`. Single worker; `n ≤ 12`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sr_simulate(
    c: *const SrCertificate,
    x: u64,
    y: u64,
    trials: u64,
    seed: u64,
    out: *mut SrSimulation,
) -> SrStatus {
    guard(|| {
        let c = borrow(c, "certificate")?;
        let f = protocol::factorize(&c.cert, protocol::FACTORIZE_N_MAX)?;
        let r = f.simulate(x, y, trials, seed, 1)?;
        let sim = SrSimulation {
            exact_bias: signrank::rational::to_f64(&r.exact_bias),
            correct_prob: signrank::rational::to_f64(&r.correct_prob),
            empirical_freq: r.empirical_freq,
            std_error: r.std_error,
            trials: r.trials,
            d: f.d() as u64,
            cost_bits: f.cost(),
        };
        write_out(out, sim, "out")
    })
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn sr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn sr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static C string.
#[no_mangle]
pub extern "C" fn sr_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}
