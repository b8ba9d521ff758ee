//! C ABI over the `pathguess` library.
//!
//! Objects cross the boundary as opaque handles (`PgModel`, `PgSample`,
//! `PgGuessRule`) that the caller releases with the matching `*_free`
//! function. Every fallible call returns a [`PgStatus`]; on failure the
//! message is available from [`pg_last_error`] on the same thread until the
//! next failing call. Panics are caught and reported as `PG_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use pathguess::analysis::risk::excess_risk_exact;
use pathguess::{
    count_patterns, exact_finite_law, fit_guess_rule, simulate, Error, GuessRule, IndexPair, Pattern, ProcessModel,
    Sample, SimulationPlan,
};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgStatus {
    Ok = 0,
    /// A required pointer was null.
    NullPointer = 1,
    /// An argument or model failed validation.
    InvalidArgument = 2,
    /// Text input (JSON, UTF-8) could not be parsed.
    Parse = 3,
    /// The sample is shorter than the span of the index sets.
    NoTrainingWindows = 4,
    /// The caller's buffer is too small.
    BufferTooSmall = 5,
    /// A computation failed at run time (budget, ergodicity, I/O).
    Runtime = 6,
    /// A panic was caught at the boundary.
    Panic = 7,
}

/// A process model.
pub struct PgModel(ProcessModel);

/// A categorical sample.
pub struct PgSample(Sample);

/// A fitted guess rule.
pub struct PgGuessRule(GuessRule);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> PgStatus {
    match e {
        Error::NoTrainingWindows => PgStatus::NoTrainingWindows,
        // well-formed JSON that fails model validation is an argument error
        Error::Json(j) if j.is_data() => PgStatus::InvalidArgument,
        Error::Parse(_) | Error::Json(_) => PgStatus::Parse,
        Error::Io(_) | Error::NonErgodic(_) | Error::BudgetExceeded { .. } | Error::Incomplete(_) => PgStatus::Runtime,
        _ => PgStatus::InvalidArgument,
    }
}

struct Failure(PgStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(PgStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PgStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            PgStatus::Panic
        }
    }
}

unsafe fn slice<'a, T>(data: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

unsafe fn reference<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pg_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Parses a model from its JSON description, e.g.
/// `{"family": "markov", "transitions": [[0.9, 0.1], [0.2, 0.8]]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pg_model_from_json(json: *const c_char, out: *mut *mut PgModel) -> PgStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|e| Failure(PgStatus::Parse, e.to_string()))?;
        let model: ProcessModel = serde_json::from_str(text).map_err(Error::from)?;
        write_out(out, PgModel(model))
    })
}

/// # Safety
/// `model` must come from [`pg_model_from_json`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pg_model_free(model: *mut PgModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Simulates `n` symbols of `model` from `seed` with the default burn-in.
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pg_simulate(model: *const PgModel, n: usize, seed: u64, out: *mut *mut PgSample) -> PgStatus {
    guard(|| {
        let model = reference(model, "model")?;
        let sample = simulate(&SimulationPlan::new(model.0.clone(), n, seed)?)?;
        write_out(out, PgSample(sample))
    })
}

/// Builds a sample from `len` symbol ids.
///
/// # Safety
/// `ids` must point to `len` readable values and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pg_sample_from_ids(ids: *const u32, len: usize, out: *mut *mut PgSample) -> PgStatus {
    guard(|| {
        let ids = slice(ids, len, "ids")?;
        write_out(out, PgSample(Sample::from_ids(ids)?))
    })
}

/// Number of symbols in `sample`, or 0 for a null handle.
///
/// # Safety
/// `sample` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pg_sample_len(sample: *const PgSample) -> usize {
    sample.as_ref().map_or(0, |s| s.0.len())
}

/// Copies the symbol ids of `sample` into `buf`. `*written` receives the
/// sample length; if it exceeds `cap` nothing is copied and
/// `PG_STATUS_BUFFER_TOO_SMALL` is returned.
///
/// # Safety
/// `buf` must have room for `cap` values; `written` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pg_sample_ids(
    sample: *const PgSample,
    buf: *mut u32,
    cap: usize,
    written: *mut usize,
) -> PgStatus {
    guard(|| {
        let sample = reference(sample, "sample")?;
        if written.is_null() {
            return Err(null("written"));
        }
        let n = sample.0.len();
        *written = n;
        if n > cap {
            return Err(Failure(PgStatus::BufferTooSmall, format!("need {n} slots, have {cap}")));
        }
        if n > 0 {
            if buf.is_null() {
                return Err(null("buf"));
            }
            for (i, s) in sample.0.symbols().iter().enumerate() {
                *buf.add(i) = s.0;
            }
        }
        Ok(())
    })
}

/// # Safety
/// `sample` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pg_sample_free(sample: *mut PgSample) {
    if !sample.is_null() {
        drop(Box::from_raw(sample));
    }
}

/// Counts the pattern pairs of `sample` for the data offsets `data` and
/// guess offsets `guess`, and fits the argmax guess rule.
///
/// # Safety
/// The offset arrays must hold the given number of values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pg_fit(
    sample: *const PgSample,
    data: *const i64,
    data_len: usize,
    guess: *const i64,
    guess_len: usize,
    out: *mut *mut PgGuessRule,
) -> PgStatus {
    guard(|| {
        let sample = reference(sample, "sample")?;
        let pair = IndexPair::new(slice(data, data_len, "data")?, slice(guess, guess_len, "guess")?)?;
        let rule = fit_guess_rule(&count_patterns(&sample.0, &pair))?;
        write_out(out, PgGuessRule(rule))
    })
}

/// Number of symbols the rule expects in a data pattern.
///
/// # Safety
/// `rule` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pg_rule_data_len(rule: *const PgGuessRule) -> usize {
    rule.as_ref().map_or(0, |r| r.0.pair().data().len())
}

/// Number of symbols in a guessed pattern.
///
/// # Safety
/// `rule` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pg_rule_guess_len(rule: *const PgGuessRule) -> usize {
    rule.as_ref().map_or(0, |r| r.0.pair().guess().len())
}

/// Writes the guess for data pattern `b` into `out` (which must hold
/// [`pg_rule_guess_len`] values). Unseen patterns receive the fallback guess.
///
/// # Safety
/// `b` must hold `b_len` values and `out` have room for `out_cap` values.
#[no_mangle]
pub unsafe extern "C" fn pg_rule_guess(
    rule: *const PgGuessRule,
    b: *const u32,
    b_len: usize,
    out: *mut u32,
    out_cap: usize,
) -> PgStatus {
    guard(|| {
        let rule = reference(rule, "rule")?;
        let guess = rule.0.guess(&Pattern::from_ids(slice(b, b_len, "b")?))?;
        let ids = guess.ids();
        if ids.len() > out_cap {
            return Err(Failure(PgStatus::BufferTooSmall, format!("need {} slots, have {out_cap}", ids.len())));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        ptr::copy_nonoverlapping(ids.as_ptr(), out, ids.len());
        Ok(())
    })
}

/// Serializes the rule as JSON. Release the string with [`pg_string_free`].
///
/// # Safety
/// `rule` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pg_rule_to_json(rule: *const PgGuessRule, out: *mut *mut c_char) -> PgStatus {
    guard(|| {
        let rule = reference(rule, "rule")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let text = serde_json::to_string(&rule.0).map_err(Error::from)?;
        *out = CString::new(text).map_err(|e| Failure(PgStatus::Parse, e.to_string()))?.into_raw();
        Ok(())
    })
}

/// Exact excess risk of `rule` under `model`.
///
/// # Safety
/// Both handles must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn pg_excess_risk(model: *const PgModel, rule: *const PgGuessRule, out: *mut f64) -> PgStatus {
    guard(|| {
        let model = reference(model, "model")?;
        let rule = reference(rule, "rule")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let law = exact_finite_law(&model.0, &rule.0.pair().union())?;
        *out = excess_risk_exact(&rule.0, &law)?.value;
        Ok(())
    })
}

/// # Safety
/// `rule` must come from [`pg_fit`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pg_rule_free(rule: *mut PgGuessRule) {
    if !rule.is_null() {
        drop(Box::from_raw(rule));
    }
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
