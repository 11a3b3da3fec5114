//! C interface to the `tncb` generator.
//!
//! Objects are opaque handles created by `*_parse` / `tncb_generate` and
//! released with the matching `*_free`. Every fallible call returns a
//! [`TncbStatus`]; on failure `tncb_last_error()` describes the problem.
//! Strings returned by result accessors are borrowed from the result and
//! live until it is freed. Strings returned through `char **` out
//! parameters are owned by the caller and released with
//! `tncb_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tncb::generator::{GenResult, Outcome};
use tncb::{Bag, Bracketing, Error, GenConfig, Grammar, RewriteBound, ViolationPolicy};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TncbStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InputError = 4,
    AssumptionViolation = 5,
    Panic = 6,
}

/// Initial tree: worst-case comb in bag order.
pub const TNCB_INIT_RIGHT: u32 = 0;
/// Initial tree: random shape from the seed.
pub const TNCB_INIT_RANDOM: u32 = 1;
/// Initial tree: mirror the given bracketing.
pub const TNCB_INIT_MIRROR: u32 = 2;

/// Keep rewriting past n-1 steps.
pub const TNCB_FLAG_UNBOUNDED: u32 = 1;
/// First matching rule wins on ambiguous combinations.
pub const TNCB_FLAG_LENIENT: u32 = 2;

pub struct TncbGrammar(Grammar);

pub struct TncbBag(Bag);

pub struct TncbResult {
    result: GenResult,
    orth: Option<CString>,
    fragments: Vec<CString>,
    trace: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn cstring(s: &str) -> CString {
    CString::new(s.replace('\0', " ")).unwrap_or_default()
}

fn fail(status: TncbStatus, msg: impl Into<String>) -> TncbStatus {
    set_error(msg);
    status
}

fn status_of(e: &Error) -> TncbStatus {
    if e.is_assumption_violation() {
        TncbStatus::AssumptionViolation
    } else {
        TncbStatus::InputError
    }
}

/// Run `f`, turning panics into `TncbStatus::Panic`.
fn guarded(f: impl FnOnce() -> TncbStatus) -> TncbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(ToString::to_string)
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(TncbStatus::Panic, format!("internal error: {msg}"))
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, TncbStatus> {
    if p.is_null() {
        return Err(fail(TncbStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(TncbStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

/// Message for the last failed call on this thread; empty if none. Valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tncb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn tncb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parse grammar source text.
///
/// # Safety
/// `source` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tncb_grammar_parse(source: *const c_char, out: *mut *mut TncbGrammar) -> TncbStatus {
    guarded(|| {
        if out.is_null() {
            return fail(TncbStatus::NullArgument, "out is null");
        }
        *out = ptr::null_mut();
        let src = match text(source, "source") {
            Ok(s) => s,
            Err(s) => return s,
        };
        match tncb::parse_grammar(src) {
            Ok(g) => {
                *out = Box::into_raw(Box::new(TncbGrammar(g)));
                TncbStatus::Ok
            }
            Err(e) => fail(TncbStatus::ParseError, e.to_string()),
        }
    })
}

/// # Safety
/// `grammar` must come from `tncb_grammar_parse` and not be used again;
/// null is ignored.
#[no_mangle]
pub unsafe extern "C" fn tncb_grammar_free(grammar: *mut TncbGrammar) {
    if !grammar.is_null() {
        drop(Box::from_raw(grammar));
    }
}

/// Parse a bag from its JSON form.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tncb_bag_parse_json(json: *const c_char, out: *mut *mut TncbBag) -> TncbStatus {
    guarded(|| {
        if out.is_null() {
            return fail(TncbStatus::NullArgument, "out is null");
        }
        *out = ptr::null_mut();
        let src = match text(json, "json") {
            Ok(s) => s,
            Err(s) => return s,
        };
        match Bag::from_json(src) {
            Ok(b) => {
                *out = Box::into_raw(Box::new(TncbBag(b)));
                TncbStatus::Ok
            }
            Err(e) => fail(TncbStatus::ParseError, e.to_string()),
        }
    })
}

/// Number of signs in the bag; 0 for null.
///
/// # Safety
/// `bag` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tncb_bag_len(bag: *const TncbBag) -> usize {
    bag.as_ref().map_or(0, |b| b.0.len())
}

/// # Safety
/// `bag` must come from `tncb_bag_parse_json` and not be used again; null
/// is ignored.
#[no_mangle]
pub unsafe extern "C" fn tncb_bag_free(bag: *mut TncbBag) {
    if !bag.is_null() {
        drop(Box::from_raw(bag));
    }
}

/// Run the generator. `bracketing` is only read for `TNCB_INIT_MIRROR`
/// and may otherwise be null. `flags` is a combination of `TNCB_FLAG_*`.
/// A failed generation with leftover fragments is still `Ok`; inspect the
/// result.
///
/// # Safety
/// `grammar` and `bag` must be live handles, `bracketing` null or a
/// NUL-terminated string, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tncb_generate(
    grammar: *const TncbGrammar,
    bag: *const TncbBag,
    init: u32,
    seed: u64,
    bracketing: *const c_char,
    flags: u32,
    out: *mut *mut TncbResult,
) -> TncbStatus {
    guarded(|| {
        if out.is_null() {
            return fail(TncbStatus::NullArgument, "out is null");
        }
        *out = ptr::null_mut();
        let (Some(g), Some(b)) = (grammar.as_ref(), bag.as_ref()) else {
            return fail(TncbStatus::NullArgument, "grammar or bag is null");
        };
        let initial = match init {
            TNCB_INIT_RIGHT => tncb::right_branching(&b.0),
            TNCB_INIT_RANDOM => tncb::random_tncb(&b.0, seed),
            TNCB_INIT_MIRROR => {
                let src = match text(bracketing, "bracketing") {
                    Ok(s) => s,
                    Err(s) => return s,
                };
                match Bracketing::parse(src) {
                    Ok(br) => tncb::from_bracketing(&br, &b.0),
                    Err(e) => return fail(TncbStatus::ParseError, e.to_string()),
                }
            }
            other => return fail(TncbStatus::InputError, format!("unknown init mode {other}")),
        };
        let initial = match initial {
            Ok(t) => t,
            Err(e) => return fail(status_of(&e), e.to_string()),
        };
        let config = GenConfig {
            max_rewrites: if flags & TNCB_FLAG_UNBOUNDED != 0 {
                RewriteBound::Unbounded
            } else {
                RewriteBound::NMinus1
            },
            violation_policy: if flags & TNCB_FLAG_LENIENT != 0 {
                ViolationPolicy::FirstRuleWins
            } else {
                ViolationPolicy::Strict
            },
        };
        match tncb::generate(&b.0, initial, &g.0, config) {
            Ok(result) => {
                let (orth, fragments) = match &result.outcome {
                    Outcome::Success(o) => (Some(cstring(o)), Vec::new()),
                    Outcome::Failure(f) => (None, f.iter().map(|s| cstring(s)).collect()),
                };
                let trace = cstring(&result.trace_json());
                *out = Box::into_raw(Box::new(TncbResult {
                    result,
                    orth,
                    fragments,
                    trace,
                }));
                TncbStatus::Ok
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// # Safety
/// `r` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn tncb_result_succeeded(r: *const TncbResult) -> bool {
    r.as_ref().is_some_and(|r| r.orth.is_some())
}

/// Realized sentence, or null when generation failed.
///
/// # Safety
/// `r` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn tncb_result_orth(r: *const TncbResult) -> *const c_char {
    r.as_ref()
        .and_then(|r| r.orth.as_ref())
        .map_or(ptr::null(), |s| s.as_ptr())
}

/// # Safety
/// `r` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn tncb_result_rewrites(r: *const TncbResult) -> usize {
    r.as_ref().map_or(0, |r| r.result.rewrites)
}

/// # Safety
/// `r` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn tncb_result_combine_calls(r: *const TncbResult) -> u64 {
    r.as_ref().map_or(0, |r| r.result.evaluations)
}

/// Number of leftover fragments; 0 on success.
///
/// # Safety
/// `r` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn tncb_result_fragment_count(r: *const TncbResult) -> usize {
    r.as_ref().map_or(0, |r| r.fragments.len())
}

/// Fragment `i` in scan order, or null when out of range.
///
/// # Safety
/// `r` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn tncb_result_fragment(r: *const TncbResult, i: usize) -> *const c_char {
    r.as_ref()
        .and_then(|r| r.fragments.get(i))
        .map_or(ptr::null(), |s| s.as_ptr())
}

/// Move trace as a JSON array.
///
/// # Safety
/// `r` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn tncb_result_trace_json(r: *const TncbResult) -> *const c_char {
    r.as_ref().map_or(ptr::null(), |r| r.trace.as_ptr())
}

/// # Safety
/// `r` must come from `tncb_generate` and not be used again; null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn tncb_result_free(r: *mut TncbResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Every realization of the bag, as a JSON array of strings, by exhaustive
/// search (bags of at most 10 signs). Release `*out` with
/// `tncb_string_free`.
///
/// # Safety
/// `grammar` and `bag` must be live handles, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tncb_realizations_json(
    grammar: *const TncbGrammar,
    bag: *const TncbBag,
    out: *mut *mut c_char,
) -> TncbStatus {
    guarded(|| {
        if out.is_null() {
            return fail(TncbStatus::NullArgument, "out is null");
        }
        *out = ptr::null_mut();
        let (Some(g), Some(b)) = (grammar.as_ref(), bag.as_ref()) else {
            return fail(TncbStatus::NullArgument, "grammar or bag is null");
        };
        match tncb::oracle::all_realizations(&b.0, &g.0) {
            Ok(set) => {
                let json = serde_json::to_string(&set).expect("string set serializes");
                *out = cstring(&json).into_raw();
                TncbStatus::Ok
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// # Safety
/// `s` must come from a `char **` out parameter of this library and not be
/// used again; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn tncb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
