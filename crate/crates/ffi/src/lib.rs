//! C ABI for betafreq.
//!
//! Every function returns a [`BfStatus`]; results go through out-pointers.
//! On failure a message is kept per thread and can be read with
//! [`bf_last_error`]. Strings returned through `char **` belong to the caller
//! and are released with [`bf_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use betafreq::dimension::{dim_a_gamma, singularity_certificate, DEFAULT_TOL};
use betafreq::ergodic::{mc_frequency_bernoulli, mc_frequency_lebesgue, parry_alpha1};
use betafreq::normalize::normalize;
use betafreq::probability::{parse_event, prob_event};
use betafreq::word::is_normal_form;
use betafreq::{BetaParams, BitWord, Error};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    InvalidUtf8 = 4,
    BufferTooSmall = 5,
    OutOfDomain = 6,
    Infeasible = 7,
    NotSupported = 8,
    DivisionByZero = 9,
    LengthMismatch = 10,
    ClosedFormUnavailable = 11,
    Panic = 12,
}

/// Opaque handle to a multinacci base.
pub struct BfParams {
    inner: BetaParams,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> BfStatus {
    match e {
        Error::DivisionByZero => BfStatus::DivisionByZero,
        Error::NotSupported(_) => BfStatus::NotSupported,
        Error::InvalidArgument(_) => BfStatus::InvalidArgument,
        Error::LengthMismatch(..) => BfStatus::LengthMismatch,
        Error::OutOfDomain => BfStatus::OutOfDomain,
        Error::Infeasible(_) => BfStatus::Infeasible,
        Error::ClosedFormUnavailable(_) => BfStatus::ClosedFormUnavailable,
        Error::Parse(_) => BfStatus::Parse,
    }
}

struct Fail(BfStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(BfStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, recording errors and converting panics.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> BfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            BfStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(format!("internal error: {msg}"));
            BfStatus::Panic
        }
    }
}

unsafe fn params_ref<'a>(p: *const BfParams) -> Result<&'a BetaParams, Fail> {
    p.as_ref().map(|p| &p.inner).ok_or_else(|| null("params"))
}

unsafe fn str_arg<'a>(s: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Fail(BfStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn write_out<T>(out: *mut T, v: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).expect("no interior NUL").into_raw()
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bf_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn bf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Creates the multinacci base of the given order (2 = golden mean).
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn bf_params_new(order: u32, out: *mut *mut BfParams) -> BfStatus {
    guard(|| {
        let inner = BetaParams::multinacci(order as usize)?;
        write_out(out, Box::into_raw(Box::new(BfParams { inner })), "out")
    })
}

/// Releases a handle from [`bf_params_new`]. NULL is ignored.
///
/// # Safety
/// `params` must come from [`bf_params_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bf_params_free(params: *mut BfParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// # Safety
/// `params` must be a live handle; `order` and `beta` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bf_params_info(params: *const BfParams, order: *mut u32, beta: *mut f64) -> BfStatus {
    guard(|| {
        let p = params_ref(params)?;
        write_out(order, p.order() as u32, "order")?;
        write_out(beta, p.beta_f64(), "beta")
    })
}

/// Normalizes a '0'/'1' string into `buf`, NUL-terminated. `written`
/// receives the number of bytes needed, including the terminator, also when
/// the buffer is too small.
///
/// # Safety
/// `word` must be a NUL-terminated string, `buf` valid for `buf_len` bytes
/// (or NULL with `buf_len` 0), `written` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn bf_normalize(
    params: *const BfParams,
    word: *const c_char,
    buf: *mut c_char,
    buf_len: usize,
    written: *mut usize,
) -> BfStatus {
    guard(|| {
        let p = params_ref(params)?;
        let w = BitWord::parse(str_arg(word, "word")?)?;
        let s = normalize(&w, p).to_string();
        let needed = s.len() + 1;
        write_out(written, needed, "written")?;
        if buf.is_null() || buf_len < needed {
            return Err(Fail(
                BfStatus::BufferTooSmall,
                format!("buffer of {buf_len} bytes, {needed} needed"),
            ));
        }
        ptr::copy_nonoverlapping(s.as_ptr(), buf as *mut u8, s.len());
        *buf.add(s.len()) = 0;
        Ok(())
    })
}

/// # Safety
/// `word` must be a NUL-terminated string and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn bf_is_normal_form(params: *const BfParams, word: *const c_char, out: *mut bool) -> BfStatus {
    guard(|| {
        let p = params_ref(params)?;
        let w = BitWord::parse(str_arg(word, "word")?)?;
        write_out(out, is_normal_form(&w, p), "out")
    })
}

/// Lebesgue-typical frequency of digit 1.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn bf_parry_alpha1(params: *const BfParams, out: *mut f64) -> BfStatus {
    guard(|| {
        let p = params_ref(params)?;
        let a = parry_alpha1(p)?;
        write_out(out, p.to_f64(&a), "out")
    })
}

/// Dimension of the set with digit-1 frequency `num / den`.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn bf_dimension(params: *const BfParams, num: i64, den: i64, out: *mut f64) -> BfStatus {
    guard(|| {
        let p = params_ref(params)?;
        if den == 0 {
            return Err(Fail(BfStatus::InvalidArgument, "zero denominator".into()));
        }
        let g = betafreq::rational::rat(num, den);
        write_out(out, dim_a_gamma(&g, p, DEFAULT_TOL)?.dimension, "out")
    })
}

/// Monte Carlo digit-1 frequency; `lebesgue` selects uniform points instead
/// of fair-coin words.
///
/// # Safety
/// `estimate` and `stderr` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bf_mc_frequency(
    params: *const BfParams,
    lebesgue: bool,
    length: usize,
    trials: usize,
    seed: u64,
    estimate: *mut f64,
    stderr: *mut f64,
) -> BfStatus {
    guard(|| {
        let p = params_ref(params)?;
        let r = if lebesgue {
            mc_frequency_lebesgue(length, trials, seed, p)?
        } else {
            mc_frequency_bernoulli(length, trials, seed, p)?
        };
        write_out(estimate, r.estimate, "estimate")?;
        write_out(stderr, r.stderr, "stderr")
    })
}

/// Certified probability bracket of an event such as "x0=1", as JSON.
///
/// # Safety
/// `event` must be a NUL-terminated string; `out` valid for a write. The
/// returned string is freed with [`bf_string_free`].
#[no_mangle]
pub unsafe extern "C" fn bf_exact_prob_json(
    params: *const BfParams,
    event: *const c_char,
    depth: u32,
    out: *mut *mut c_char,
) -> BfStatus {
    guard(|| {
        let p = params_ref(params)?;
        let e = str_arg(event, "event")?;
        let b = prob_event(p, &parse_event(e)?, depth as usize)?;
        let json = b.to_json(e).render();
        write_out(out, into_c_string(json), "out")
    })
}

/// Singularity certificate as JSON.
///
/// # Safety
/// `out` must be valid for a write. The returned string is freed with
/// [`bf_string_free`].
#[no_mangle]
pub unsafe extern "C" fn bf_certificate_json(params: *const BfParams, out: *mut *mut c_char) -> BfStatus {
    guard(|| {
        let p = params_ref(params)?;
        let c = singularity_certificate(p)?;
        write_out(out, into_c_string(c.to_json()), "out")
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn bf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
