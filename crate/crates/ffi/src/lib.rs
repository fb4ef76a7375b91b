//! C interface to `mustar-alba`.
//!
//! Objects cross the boundary as opaque handles that the caller releases
//! with the matching `*_free` function. Strings returned by the library are
//! owned by the caller and released with [`ma_string_free`]. Every fallible
//! call returns an [`MaStatus`]; the message for the most recent failure on
//! the calling thread is available from [`ma_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mustar_alba::algebra::{battery, check_inequality, check_quasi_system, FiniteAlgebra};
use mustar_alba::classifier::classify;
use mustar_alba::engine::{run, run_json, run_text, Mode, RunResult};
use mustar_alba::syntax::{parse_input_inequality, print_inequality, Inequality};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MaStatus {
    Ok = 0,
    /// The call worked but the answer is negative, e.g. a stuck run.
    Negative = 1,
    InvalidInput = 2,
    NullPointer = 3,
    Internal = 4,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MaMode {
    Tame = 0,
    Proper = 1,
    Auto = 2,
}

pub struct MaInequality(Inequality);
pub struct MaRun(RunResult);
pub struct MaAlgebra(FiniteAlgebra);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn guard(f: impl FnOnce() -> Result<MaStatus, (MaStatus, String)>) -> MaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("panic inside mustar-alba");
            MaStatus::Internal
        }
    }
}

unsafe fn text_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (MaStatus, String)> {
    if p.is_null() {
        return Err((MaStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (MaStatus::InvalidInput, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, (MaStatus, String)> {
    p.as_ref().ok_or_else(|| (MaStatus::NullPointer, format!("{what} is null")))
}

fn out_arg<T>(out: *mut T, what: &str) -> Result<(), (MaStatus, String)> {
    if out.is_null() {
        Err((MaStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

fn to_c(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message of the last failed call on this thread. Valid until the next call.
#[no_mangle]
pub extern "C" fn ma_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ma_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `text` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ma_inequality_parse(text: *const c_char, out: *mut *mut MaInequality) -> MaStatus {
    guard(|| {
        out_arg(out, "out")?;
        let t = text_arg(text, "text")?;
        let i = parse_input_inequality(t).map_err(|e| (MaStatus::InvalidInput, e.to_string()))?;
        *out = Box::into_raw(Box::new(MaInequality(i)));
        Ok(MaStatus::Ok)
    })
}

/// # Safety
/// `i` must come from [`ma_inequality_parse`] or be null.
#[no_mangle]
pub unsafe extern "C" fn ma_inequality_free(i: *mut MaInequality) {
    if !i.is_null() {
        drop(Box::from_raw(i));
    }
}

/// # Safety
/// `i` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ma_inequality_print(i: *const MaInequality) -> *mut c_char {
    match i.as_ref() {
        Some(i) => to_c(print_inequality(&i.0)),
        None => ptr::null_mut(),
    }
}

/// Writes the classification as JSON. Returns `Negative` when the level is `None`.
///
/// # Safety
/// `i` must be a live handle and `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn ma_classify(i: *const MaInequality, out_json: *mut *mut c_char) -> MaStatus {
    guard(|| {
        out_arg(out_json, "out_json")?;
        let i = handle(i, "inequality")?;
        let c = classify(&i.0).map_err(|e| (MaStatus::InvalidInput, e.to_string()))?;
        let none = c.level == mustar_alba::classifier::Level::None;
        *out_json = to_c(serde_json::to_string(&c).map_err(|e| (MaStatus::Internal, e.to_string()))?);
        Ok(if none { MaStatus::Negative } else { MaStatus::Ok })
    })
}

/// Runs the calculus in one of the [`MaMode`] modes. The handle is produced
/// for stuck runs too, in which case the status is `Negative`.
///
/// # Safety
/// `i` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ma_run(i: *const MaInequality, mode: i32, out: *mut *mut MaRun) -> MaStatus {
    guard(|| {
        out_arg(out, "out")?;
        let i = handle(i, "inequality")?;
        let mode = match mode {
            m if m == MaMode::Tame as i32 => Mode::Tame,
            m if m == MaMode::Proper as i32 => Mode::Proper,
            m if m == MaMode::Auto as i32 => Mode::Auto,
            m => return Err((MaStatus::InvalidInput, format!("unknown mode {m}"))),
        };
        let r = run(&i.0, mode);
        let ok = r.succeeded();
        *out = Box::into_raw(Box::new(MaRun(r)));
        Ok(if ok { MaStatus::Ok } else { MaStatus::Negative })
    })
}

/// # Safety
/// `r` must come from [`ma_run`] or be null.
#[no_mangle]
pub unsafe extern "C" fn ma_run_free(r: *mut MaRun) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// # Safety
/// `r` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ma_run_succeeded(r: *const MaRun) -> bool {
    r.as_ref().is_some_and(|r| r.0.succeeded())
}

/// # Safety
/// `r` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ma_run_json(r: *const MaRun) -> *mut c_char {
    match r.as_ref() {
        Some(r) => to_c(run_json(&r.0).to_string()),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `r` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ma_run_text(r: *const MaRun, with_trace: bool) -> *mut c_char {
    match r.as_ref() {
        Some(r) => to_c(run_text(&r.0, with_trace)),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ma_algebra_load_json(json: *const c_char, out: *mut *mut MaAlgebra) -> MaStatus {
    guard(|| {
        out_arg(out, "out")?;
        let t = text_arg(json, "json")?;
        let a = FiniteAlgebra::load_json(t).map_err(|e| (MaStatus::InvalidInput, e.to_string()))?;
        *out = Box::into_raw(Box::new(MaAlgebra(a)));
        Ok(MaStatus::Ok)
    })
}

#[no_mangle]
pub extern "C" fn ma_battery_len() -> usize {
    battery().len()
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ma_battery_get(index: usize, out: *mut *mut MaAlgebra) -> MaStatus {
    guard(|| {
        out_arg(out, "out")?;
        let a = battery()
            .into_iter()
            .nth(index)
            .ok_or_else(|| (MaStatus::InvalidInput, format!("battery has no algebra {index}")))?;
        *out = Box::into_raw(Box::new(MaAlgebra(a)));
        Ok(MaStatus::Ok)
    })
}

/// # Safety
/// `a` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ma_algebra_free(a: *mut MaAlgebra) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// # Safety
/// `a` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ma_algebra_size(a: *const MaAlgebra) -> usize {
    a.as_ref().map_or(0, |a| a.0.size())
}

/// # Safety
/// Handles must be live and `valid` writable.
#[no_mangle]
pub unsafe extern "C" fn ma_check_inequality(a: *const MaAlgebra, i: *const MaInequality, valid: *mut bool) -> MaStatus {
    guard(|| {
        out_arg(valid, "valid")?;
        let a = handle(a, "algebra")?;
        let i = handle(i, "inequality")?;
        *valid = check_inequality(&a.0, &i.0).valid;
        Ok(MaStatus::Ok)
    })
}

/// Validity of the pure system of a successful run.
///
/// # Safety
/// Handles must be live and `valid` writable.
#[no_mangle]
pub unsafe extern "C" fn ma_check_run(a: *const MaAlgebra, r: *const MaRun, valid: *mut bool) -> MaStatus {
    guard(|| {
        out_arg(valid, "valid")?;
        let a = handle(a, "algebra")?;
        let r = handle(r, "run")?;
        let pure = r.0.pure_system().ok_or((MaStatus::Negative, "run did not reach a pure system".to_string()))?;
        *valid = check_quasi_system(&a.0, &pure.members).valid;
        Ok(MaStatus::Ok)
    })
}
