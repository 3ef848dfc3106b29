//! C ABI over the `coalp` engines.
//!
//! Programs are opaque handles created by [`coalp_program_parse`] and
//! released with [`coalp_program_free`]. Every fallible call returns a
//! [`CoalpStatus`]; on failure a message is available from
//! [`coalp_last_error`] on the same thread. Strings handed out by the library
//! are NUL-terminated UTF-8 and must be released with [`coalp_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use coalp::cli::{classification_report, surface_subst};
use coalp::{
    build_tree, parse_atom, parse_program, render, sld_solve, tm_prove, Error, Format, Goal, Outcome,
    Program, SldLimits, Strategy,
};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoalpStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Program or goal text did not parse, or used a symbol inconsistently.
    ParseError = 3,
    /// A goal or arrow did not fit the required arity.
    ArityError = 4,
    /// A bound or other argument was out of range.
    InvalidArgument = 5,
    /// The library panicked; this is a bug.
    Internal = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoalpVerdict {
    Proved = 0,
    Failed = 1,
    Unknown = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoalpFormat {
    Ascii = 0,
    Dot = 1,
    Json = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoalpStrategy {
    DepthFirst = 0,
    IterativeDeepening = 1,
}

/// A parsed program.
pub struct CoalpProgram {
    program: Program,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(CoalpStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let status = match &e {
            e if e.is_parse_error() => CoalpStatus::ParseError,
            Error::VariableOutOfRange { .. } | Error::ArrowMismatch { .. } => CoalpStatus::ArityError,
            _ => CoalpStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(message: Option<String>) {
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = message.map(|m| CString::new(m.replace('\0', " ")).expect("no NUL bytes"));
    });
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CoalpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(None);
            CoalpStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(Some(message));
            status
        }
        Err(_) => {
            set_error(Some("internal error: the library panicked".into()));
            CoalpStatus::Internal
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(CoalpStatus::NullArgument, format!("`{what}` is NULL"))
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| Failure(CoalpStatus::InvalidUtf8, format!("`{what}` is not UTF-8: {e}")))
}

unsafe fn handle<'a>(p: *const CoalpProgram) -> Result<&'a Program, Failure> {
    p.as_ref().map(|h| &h.program).ok_or_else(|| null("program"))
}

unsafe fn parse_goal(p: &Program, s: *const c_char) -> Result<Goal, Failure> {
    Ok(parse_atom(text(s, "goal")?, &p.signature)?)
}

fn owned(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no NUL bytes").into_raw()
}

fn positive(value: usize, what: &str) -> Result<usize, Failure> {
    if value == 0 {
        return Err(Failure(CoalpStatus::InvalidArgument, format!("`{what}` must be positive")));
    }
    Ok(value)
}

/// Parses program text. On success `*out` receives a handle owned by the
/// caller.
///
/// # Safety
/// `source` must be NULL or a NUL-terminated string; `out` must be NULL or
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn coalp_program_parse(
    source: *const c_char,
    out: *mut *mut CoalpProgram,
) -> CoalpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let program = parse_program(text(source, "source")?)?;
        *out = Box::into_raw(Box::new(CoalpProgram { program }));
        Ok(())
    })
}

/// Releases a program handle. NULL is ignored.
///
/// # Safety
/// `program` must be NULL or a handle from [`coalp_program_parse`] that has
/// not been freed.
#[no_mangle]
pub unsafe extern "C" fn coalp_program_free(program: *mut CoalpProgram) {
    if !program.is_null() {
        drop(Box::from_raw(program));
    }
}

/// Number of clauses, or 0 for NULL.
///
/// # Safety
/// `program` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn coalp_program_clause_count(program: *const CoalpProgram) -> usize {
    program.as_ref().map_or(0, |h| h.program.len())
}

/// Term-matching proof search for `goal` with at most `depth` resolution
/// layers. When the verdict is `Proved` and `proof` is not NULL, `*proof`
/// receives the proof tree as ASCII text; otherwise it is set to NULL.
///
/// # Safety
/// `program` must be a live handle, `goal` a NUL-terminated string,
/// `verdict` valid for writes and `proof` NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn coalp_prove(
    program: *const CoalpProgram,
    goal: *const c_char,
    depth: usize,
    verdict: *mut CoalpVerdict,
    proof: *mut *mut c_char,
) -> CoalpStatus {
    guard(|| {
        if verdict.is_null() {
            return Err(null("verdict"));
        }
        if !proof.is_null() {
            *proof = ptr::null_mut();
        }
        let p = handle(program)?;
        let g = parse_goal(p, goal)?;
        *verdict = match tm_prove(p, &g.atom, g.arity, depth)? {
            Outcome::Proved(tree) => {
                if !proof.is_null() {
                    *proof = owned(render(&tree.to_cotree(), Format::Ascii));
                }
                CoalpVerdict::Proved
            }
            Outcome::Failed => CoalpVerdict::Failed,
            Outcome::Unknown => CoalpVerdict::Unknown,
        };
        Ok(())
    })
}

/// SLD resolution. `*answers` receives one answer substitution per line,
/// written with the goal's variable names; `*exhausted` is set when the
/// step bound cut the search short.
///
/// # Safety
/// `program` must be a live handle, `goal` a NUL-terminated string, and
/// `answers` and `exhausted` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn coalp_solve(
    program: *const CoalpProgram,
    goal: *const c_char,
    max_steps: usize,
    max_answers: usize,
    strategy: CoalpStrategy,
    answers: *mut *mut c_char,
    exhausted: *mut bool,
) -> CoalpStatus {
    guard(|| {
        if answers.is_null() {
            return Err(null("answers"));
        }
        *answers = ptr::null_mut();
        if exhausted.is_null() {
            return Err(null("exhausted"));
        }
        let p = handle(program)?;
        let g = parse_goal(p, goal)?;
        let limits = SldLimits {
            max_steps: positive(max_steps, "max_steps")?,
            max_answers: positive(max_answers, "max_answers")?,
            strategy: match strategy {
                CoalpStrategy::DepthFirst => Strategy::DepthFirst,
                CoalpStrategy::IterativeDeepening => Strategy::IterativeDeepening,
            },
        };
        let r = sld_solve(p, std::slice::from_ref(&g.atom), &limits)?;
        let lines: String = r.answers.iter().map(|a| surface_subst(&a.subst, &g) + "\n").collect();
        *answers = owned(lines);
        *exhausted = r.exhausted;
        Ok(())
    })
}

/// Renders the coinductive tree of `goal` cut after `depth` or-layers.
///
/// # Safety
/// `program` must be a live handle, `goal` a NUL-terminated string and
/// `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn coalp_tree(
    program: *const CoalpProgram,
    goal: *const c_char,
    depth: usize,
    format: CoalpFormat,
    out: *mut *mut c_char,
) -> CoalpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let p = handle(program)?;
        let g = parse_goal(p, goal)?;
        let tree = build_tree(p, &g.atom, g.arity, depth)?;
        let format = match format {
            CoalpFormat::Ascii => Format::Ascii,
            CoalpFormat::Dot => Format::Dot,
            CoalpFormat::Json => Format::Json,
        };
        *out = owned(render(&tree, format));
        Ok(())
    })
}

/// Writes `non-existential` or one line per clause with body-only
/// variables.
///
/// # Safety
/// `program` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn coalp_classify(program: *const CoalpProgram, out: *mut *mut c_char) -> CoalpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = owned(classification_report(handle(program)?));
        Ok(())
    })
}

/// Message for the last failed call on this thread, or NULL after a
/// successful call. The pointer stays valid until the next call into the
/// library on this thread.
#[no_mangle]
pub extern "C" fn coalp_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by the library. NULL is ignored.
///
/// # Safety
/// `s` must be NULL or a string from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn coalp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn coalp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
