//! C ABI over the edgerem library.
//!
//! Instances and codes are opaque handles owned by the caller and released
//! with the matching `_free` function. Reports come back as NUL-terminated
//! JSON strings released with [`edgerem_string_free`]. Every function returns
//! an [`EdgeremStatus`]; on failure [`edgerem_last_error`] describes it.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use edgerem::analysis::{edge_removal_report, VerifyInput};
use edgerem::code::file::load_code;
use edgerem::code::{check_feasibility, FeasibilityTarget, SharedCode, DEFAULT_ENUMERATION_LIMIT};
use edgerem::graph::{validate_instance, NetworkInstance, RateVector};
use edgerem::rational::Rational;
use edgerem::transforms::chain::{parse_mode, run_chain, ChainStep};
use serde_json::Value;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeremStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidInput = 2,
    VerificationFailed = 4,
    ResourceLimit = 5,
    Panic = 6,
}

/// A validated network instance.
pub struct EdgeremInstance {
    inner: NetworkInstance,
}

/// A code together with the instance it runs on.
pub struct EdgeremCode {
    code: SharedCode,
    instance: NetworkInstance,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Failure(EdgeremStatus, String);

impl Failure {
    fn invalid(e: impl std::fmt::Display) -> Self {
        Failure(EdgeremStatus::InvalidInput, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> EdgeremStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EdgeremStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            EdgeremStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(EdgeremStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::invalid(format!("{what} is not UTF-8")))
}

unsafe fn opt_text<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, Failure> {
    if p.is_null() {
        Ok(None)
    } else {
        text(p, what).map(Some)
    }
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(EdgeremStatus::NullArgument, format!("{what} is null")))
}

unsafe fn out_ptr<'a, T>(p: *mut *mut T, what: &str) -> Result<&'a mut *mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| Failure(EdgeremStatus::NullArgument, format!("{what} is null")))
}

fn json_string(v: &impl serde::Serialize) -> Result<*mut c_char, Failure> {
    let value = serde_json::to_value(v).map_err(Failure::invalid)?;
    let s = serde_json::to_string(&value).map_err(Failure::invalid)?;
    CString::new(s).map(CString::into_raw).map_err(Failure::invalid)
}

/// Message describing the last failure on this thread, or null. Valid until
/// the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn edgerem_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by the library.
///
/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn edgerem_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and validates an instance document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn edgerem_instance_from_json(
    json: *const c_char,
    out: *mut *mut EdgeremInstance,
) -> EdgeremStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let inner = validate_instance(text(json, "json")?).map_err(Failure::invalid)?;
        *out = Box::into_raw(Box::new(EdgeremInstance { inner }));
        Ok(())
    })
}

/// # Safety
/// `inst` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn edgerem_instance_free(inst: *mut EdgeremInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Vertex count, or 0 for a null handle.
///
/// # Safety
/// `inst` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn edgerem_instance_num_vertices(inst: *const EdgeremInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.inner.num_vertices())
}

/// Edge count, or 0 for a null handle.
///
/// # Safety
/// `inst` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn edgerem_instance_num_edges(inst: *const EdgeremInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.inner.edges().len())
}

/// Instance document as JSON.
///
/// # Safety
/// `inst` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn edgerem_instance_to_json(
    inst: *const EdgeremInstance,
    out: *mut *mut c_char,
) -> EdgeremStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = json_string(&handle(inst, "instance")?.inner.to_document())?;
        Ok(())
    })
}

/// Loads a code file (table, routing or descriptor form) written for `inst`.
///
/// # Safety
/// `inst` must be a live handle, `json` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn edgerem_code_load(
    inst: *const EdgeremInstance,
    json: *const c_char,
    out: *mut *mut EdgeremCode,
) -> EdgeremStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let inst = handle(inst, "instance")?;
        let value: Value = serde_json::from_str(text(json, "json")?).map_err(Failure::invalid)?;
        let loaded = load_code(&value, &inst.inner).map_err(Failure::invalid)?;
        *out = Box::into_raw(Box::new(EdgeremCode {
            code: loaded.code,
            instance: loaded.instance,
        }));
        Ok(())
    })
}

/// # Safety
/// `code` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn edgerem_code_free(code: *mut EdgeremCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// Copies the instance a code runs on into a new handle.
///
/// # Safety
/// `code` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn edgerem_code_instance(
    code: *const EdgeremCode,
    out: *mut *mut EdgeremInstance,
) -> EdgeremStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let inner = handle(code, "code")?.instance.clone();
        *out = Box::into_raw(Box::new(EdgeremInstance { inner }));
        Ok(())
    })
}

/// Measures the error of `code` on the instance it was loaded for.
/// `epsilon` defaults to "0" and `mode` to "exhaustive" when null. The report
/// is written even when the check fails.
///
/// # Safety
/// `code` must be a live handle; strings NUL-terminated or null; `report` writable.
#[no_mangle]
pub unsafe extern "C" fn edgerem_check(
    code: *const EdgeremCode,
    epsilon: *const c_char,
    mode: *const c_char,
    report: *mut *mut c_char,
) -> EdgeremStatus {
    guard(|| {
        let report = out_ptr(report, "report")?;
        let code = handle(code, "code")?;
        let epsilon: Rational = opt_text(epsilon, "epsilon")?
            .unwrap_or("0")
            .parse()
            .map_err(Failure::invalid)?;
        let mode = parse_mode(opt_text(mode, "mode")?.unwrap_or("exhaustive")).map_err(Failure::invalid)?;
        let r = check_feasibility(
            code.code.as_ref(),
            &code.instance,
            &FeasibilityTarget::with_epsilon(epsilon),
            mode,
        )
        .map_err(|e| match e {
            edgerem::code::CodeError::EnumerationTooLarge { .. } => Failure(EdgeremStatus::ResourceLimit, e.to_string()),
            e => Failure::invalid(e),
        })?;
        *report = json_string(&r)?;
        if r.pass {
            Ok(())
        } else {
            Err(Failure(EdgeremStatus::VerificationFailed, "code does not meet the error target".into()))
        }
    })
}

/// Edge-removal report for adding `(u, u2)` of capacity `lambda` to `inst`.
/// `rates` (comma-separated) and `code` (a code on the instance with the edge
/// added) are optional.
///
/// # Safety
/// `inst` must be a live handle, `code` null or live, strings NUL-terminated
/// (or null where optional), `report` writable.
#[no_mangle]
pub unsafe extern "C" fn edgerem_analyze(
    inst: *const EdgeremInstance,
    u: *const c_char,
    u2: *const c_char,
    lambda: *const c_char,
    rates: *const c_char,
    code: *const EdgeremCode,
    report: *mut *mut c_char,
) -> EdgeremStatus {
    guard(|| {
        let report = out_ptr(report, "report")?;
        let inst = &handle(inst, "instance")?.inner;
        let lambda: Rational = text(lambda, "lambda")?.parse().map_err(Failure::invalid)?;
        let rates = opt_text(rates, "rates")?
            .map(|r| RateVector::parse(r, inst.sources().len()))
            .transpose()
            .map_err(Failure::invalid)?;
        let verify = code.as_ref().map(|c| VerifyInput {
            code: Arc::clone(&c.code),
            limit: DEFAULT_ENUMERATION_LIMIT,
        });
        let r = edge_removal_report(inst, text(u, "u")?, text(u2, "u2")?, &lambda, rates.as_ref(), verify.as_ref())
            .map_err(|e| {
                let status = if e.is_resource_limit() {
                    EdgeremStatus::ResourceLimit
                } else {
                    EdgeremStatus::InvalidInput
                };
                Failure(status, e.to_string())
            })?;
        *report = json_string(&r)?;
        match r.verification {
            Some(v) if !v.pass => Err(Failure(EdgeremStatus::VerificationFailed, "verification failed".into())),
            _ => Ok(()),
        }
    })
}

/// Applies a JSON chain of `{op, params, seed}` steps to `code`.
///
/// # Safety
/// `code` must be a live handle, `chain` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn edgerem_transform(
    code: *const EdgeremCode,
    chain: *const c_char,
    out: *mut *mut EdgeremCode,
) -> EdgeremStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let code = handle(code, "code")?;
        let steps: Vec<ChainStep> = serde_json::from_str(text(chain, "chain")?).map_err(Failure::invalid)?;
        let (state, _) = run_chain(Arc::clone(&code.code), &code.instance, &steps).map_err(Failure::invalid)?;
        *out = Box::into_raw(Box::new(EdgeremCode {
            code: state.code,
            instance: state.inst,
        }));
        Ok(())
    })
}
