//! C ABI over the rieszmix decision engine.
//!
//! A problem is parsed once into an opaque `RmProblem` handle. Every call
//! returns an `RmStatus`; results come back through out-pointers. Strings
//! handed out by the library are NUL-terminated JSON and must be released
//! with `rm_string_free`. The message of the last failure on the calling
//! thread is available from `rm_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rieszmix::cli::{self, LoadedProblem, RunOptions};
use rieszmix::error::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Problem file or argument rejected; see `rm_last_error`.
    InputError = 3,
    ComputationError = 4,
    Panic = 5,
}

/// Verdict of a decision, numerically equal to the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RmVerdict {
    Bounded = 0,
    Unbounded = 10,
    OutsideTheoremScope = 20,
}

/// Report flavour for `rm_report`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RmCommand {
    Decide = 0,
    Analyze = 1,
    Probe = 2,
}

/// Opaque parsed problem.
pub struct RmProblem {
    text: String,
    loaded: LoadedProblem,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: RmStatus, msg: impl Into<String>) -> RmStatus {
    set_error(msg.into());
    status
}

fn from_error(e: Error) -> RmStatus {
    let status = if cli::error_exit_code(&e) == cli::EXIT_INPUT { RmStatus::InputError } else { RmStatus::ComputationError };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> RmStatus) -> RmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(RmStatus::Panic, msg)
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, RmStatus> {
    if s.is_null() {
        return Err(fail(RmStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(RmStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn hand_out(s: String, out: *mut *mut c_char) -> RmStatus {
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            RmStatus::Ok
        }
        Err(_) => fail(RmStatus::ComputationError, "report contains NUL"),
    }
}

/// Parses a TOML problem description. On success `*out` owns a new handle.
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rm_problem_parse(toml: *const c_char, out: *mut *mut RmProblem) -> RmStatus {
    guard(|| {
        if out.is_null() {
            return fail(RmStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        let text = match read_str(toml, "toml") {
            Ok(t) => t,
            Err(s) => return s,
        };
        match cli::load_problem(text) {
            Ok(loaded) => {
                *out = Box::into_raw(Box::new(RmProblem { text: text.to_owned(), loaded }));
                RmStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `p` must come from `rm_problem_parse` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rm_problem_free(p: *mut RmProblem) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Decides boundedness.
///
/// # Safety
/// `p` must be a live handle and `verdict` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rm_decide(p: *const RmProblem, verdict: *mut RmVerdict) -> RmStatus {
    guard(|| {
        let Some(p) = p.as_ref() else { return fail(RmStatus::NullPointer, "problem is null") };
        if verdict.is_null() {
            return fail(RmStatus::NullPointer, "verdict is null");
        }
        match cli::verdict_of(&p.loaded.problem) {
            Ok(v) => {
                *verdict = match cli::status_exit_code(v.status) {
                    cli::EXIT_BOUNDED => RmVerdict::Bounded,
                    cli::EXIT_UNBOUNDED => RmVerdict::Unbounded,
                    _ => RmVerdict::OutsideTheoremScope,
                };
                RmStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Builds the JSON report the CLI would write for `command` with `seed`.
/// `*json` receives a string to release with `rm_string_free`.
///
/// # Safety
/// `p` must be a live handle and `json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rm_report(p: *const RmProblem, command: RmCommand, seed: u64, json: *mut *mut c_char) -> RmStatus {
    guard(|| {
        let Some(p) = p.as_ref() else { return fail(RmStatus::NullPointer, "problem is null") };
        if json.is_null() {
            return fail(RmStatus::NullPointer, "json is null");
        }
        *json = ptr::null_mut();
        let opts = RunOptions { seed: Some(seed), ..RunOptions::default() };
        let r = match command {
            RmCommand::Decide => cli::decide_report(&p.text, &opts),
            RmCommand::Analyze => cli::analyze_report(&p.text, &opts),
            RmCommand::Probe => cli::probe_report(&p.text, &opts),
        };
        match r {
            Ok(r) => hand_out(cli::render(&r), json),
            Err(e) => from_error(e),
        }
    })
}

/// Runs the property suites. `*passed` is set to whether all passed; when
/// `summary` is non-null it receives the printed summary.
///
/// # Safety
/// `passed` must be valid; `summary` may be null.
#[no_mangle]
pub unsafe extern "C" fn rm_selftest(seed: u64, passed: *mut bool, summary: *mut *mut c_char) -> RmStatus {
    guard(|| {
        if passed.is_null() {
            return fail(RmStatus::NullPointer, "passed is null");
        }
        let r = cli::selftest_report(seed);
        *passed = r.passed();
        if summary.is_null() {
            RmStatus::Ok
        } else {
            hand_out(cli::selftest_summary(&r), summary)
        }
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version string (static).
#[no_mangle]
pub extern "C" fn rm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
