//! C ABI over the omniscope core.
//!
//! Every fallible call returns an [`OmniscopeStatus`] and writes its result
//! through an out-pointer. Handles are opaque and must be released with the
//! matching `_free` function; strings returned to the caller are released
//! with [`omniscope_string_free`]. The message of the most recent failure on
//! the calling thread is available from [`omniscope_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use omniscope::algo::{dy_derives, Message};
use omniscope::decision::{decide, Verdict};
use omniscope::document::{load_structure, save_structure};
use omniscope::error::{DecisionError, ModelError};
use omniscope::{ClassTag, EpistemicStructure, Formula};

#[repr(i32)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OmniscopeStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    SchemaError = 4,
    UnknownWorld = 5,
    UnsupportedClass = 6,
    BoundsTooLarge = 7,
    Precondition = 8,
    Internal = 9,
}

/// A parsed formula.
pub struct OmniscopeFormula(Formula);

/// A validated epistemic structure.
pub struct OmniscopeStructure(EpistemicStructure);

/// The outcome of a satisfiability query.
pub struct OmniscopeVerdict(Verdict);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: OmniscopeStatus, message: impl ToString) -> OmniscopeStatus {
    let text = message.to_string().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).unwrap_or_default());
    status
}

fn decision_status(e: &DecisionError) -> OmniscopeStatus {
    match e {
        DecisionError::LikelihoodPresent(_) | DecisionError::UnsupportedClass(_) => {
            OmniscopeStatus::UnsupportedClass
        }
        DecisionError::BoundsTooLarge(_) => OmniscopeStatus::BoundsTooLarge,
        DecisionError::Precondition(_) => OmniscopeStatus::Precondition,
        DecisionError::Model(ModelError::UnknownWorld(_)) => OmniscopeStatus::UnknownWorld,
        _ => OmniscopeStatus::Internal,
    }
}

/// Runs `body`, turning panics into `Internal`.
fn guard(body: impl FnOnce() -> Result<(), OmniscopeStatus>) -> OmniscopeStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => OmniscopeStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(OmniscopeStatus::Internal, "panic inside omniscope"),
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, OmniscopeStatus> {
    if p.is_null() {
        return Err(fail(OmniscopeStatus::NullArgument, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| fail(OmniscopeStatus::InvalidUtf8, e))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), OmniscopeStatus> {
    if out.is_null() {
        return Err(fail(OmniscopeStatus::NullArgument, "null output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, OmniscopeStatus> {
    p.as_ref()
        .ok_or_else(|| fail(OmniscopeStatus::NullArgument, "null handle"))
}

fn owned(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message of the last failure on this thread; valid until the next call.
#[no_mangle]
pub extern "C" fn omniscope_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn omniscope_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `src` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn omniscope_formula_parse(
    src: *const c_char,
    out: *mut *mut OmniscopeFormula,
) -> OmniscopeStatus {
    guard(|| {
        let f: Formula = text(src)?
            .parse()
            .map_err(|e| fail(OmniscopeStatus::ParseError, e))?;
        put(out, Box::into_raw(Box::new(OmniscopeFormula(f))))
    })
}

/// Canonical text of a formula, or null for a null handle.
///
/// # Safety
/// `f` must be a live formula handle or null.
#[no_mangle]
pub unsafe extern "C" fn omniscope_formula_render(f: *const OmniscopeFormula) -> *mut c_char {
    match f.as_ref() {
        Some(f) => owned(f.0.render()),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `f` must come from `omniscope_formula_parse` or be null.
#[no_mangle]
pub unsafe extern "C" fn omniscope_formula_free(f: *mut OmniscopeFormula) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Loads and validates a JSON structure document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn omniscope_structure_load(
    json: *const c_char,
    out: *mut *mut OmniscopeStructure,
) -> OmniscopeStatus {
    guard(|| {
        let s = load_structure(text(json)?).map_err(|e| fail(OmniscopeStatus::SchemaError, e))?;
        let broken = s.validate();
        if !broken.is_empty() {
            return Err(fail(OmniscopeStatus::SchemaError, broken.join("; ")));
        }
        put(out, Box::into_raw(Box::new(OmniscopeStructure(s))))
    })
}

/// # Safety
/// `s` must be a live structure handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn omniscope_structure_save(
    s: *const OmniscopeStructure,
    out: *mut *mut c_char,
) -> OmniscopeStatus {
    guard(|| {
        let s = handle(s)?;
        put(out, owned(save_structure(&s.0)))
    })
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn omniscope_structure_free(s: *mut OmniscopeStructure) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Truth of `f` at `world`.
///
/// # Safety
/// Handles must be live, `world` NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn omniscope_holds(
    s: *const OmniscopeStructure,
    world: *const c_char,
    f: *const OmniscopeFormula,
    out: *mut bool,
) -> OmniscopeStatus {
    guard(|| {
        let (s, f, w) = (handle(s)?, handle(f)?, text(world)?);
        let v = omniscope::model::holds(&s.0, w, &f.0).map_err(|e| match e {
            ModelError::UnknownWorld(_) => fail(OmniscopeStatus::UnknownWorld, e),
            _ => fail(OmniscopeStatus::UnsupportedClass, e),
        })?;
        put(out, v)
    })
}

/// Decides satisfiability of `f` in the class named by `tag`.
///
/// # Safety
/// `f` must be live, `tag` NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn omniscope_decide(
    f: *const OmniscopeFormula,
    tag: *const c_char,
    out: *mut *mut OmniscopeVerdict,
) -> OmniscopeStatus {
    guard(|| {
        let f = handle(f)?;
        let tag: ClassTag = text(tag)?
            .parse()
            .map_err(|e| fail(OmniscopeStatus::ParseError, e))?;
        let v = decide(&f.0, tag).map_err(|e| fail(decision_status(&e), e))?;
        put(out, Box::into_raw(Box::new(OmniscopeVerdict(v))))
    })
}

/// # Safety
/// `v` must be a live verdict handle or null.
#[no_mangle]
pub unsafe extern "C" fn omniscope_verdict_satisfiable(v: *const OmniscopeVerdict) -> bool {
    v.as_ref().is_some_and(|v| v.0.satisfiable)
}

/// Copies the witness structure out; writes null for UNSAT verdicts.
///
/// # Safety
/// `v` must be live; `structure` and `world` must be writable.
#[no_mangle]
pub unsafe extern "C" fn omniscope_verdict_witness(
    v: *const OmniscopeVerdict,
    structure: *mut *mut OmniscopeStructure,
    world: *mut *mut c_char,
) -> OmniscopeStatus {
    guard(|| {
        let v = handle(v)?;
        match &v.0.witness {
            Some(w) => {
                put(structure, Box::into_raw(Box::new(OmniscopeStructure(w.structure.clone()))))?;
                put(world, owned(w.world.clone()))
            }
            None => {
                put(structure, ptr::null_mut())?;
                put(world, ptr::null_mut())
            }
        }
    })
}

/// # Safety
/// `v` must come from `omniscope_decide` or be null.
#[no_mangle]
pub unsafe extern "C" fn omniscope_verdict_free(v: *mut OmniscopeVerdict) {
    if !v.is_null() {
        drop(Box::from_raw(v));
    }
}

/// Whether `message` follows from the `n` intercepted messages.
///
/// # Safety
/// `intercepted` must point to `n` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn omniscope_dy_derives(
    intercepted: *const *const c_char,
    n: usize,
    message: *const c_char,
    out: *mut bool,
) -> OmniscopeStatus {
    guard(|| {
        if intercepted.is_null() && n > 0 {
            return Err(fail(OmniscopeStatus::NullArgument, "null message array"));
        }
        let mut h = Vec::with_capacity(n);
        for i in 0..n {
            let m = Message::parse(text(*intercepted.add(i))?)
                .map_err(|e| fail(OmniscopeStatus::ParseError, e))?;
            h.push(m);
        }
        let m = Message::parse(text(message)?).map_err(|e| fail(OmniscopeStatus::ParseError, e))?;
        put(out, dy_derives(&h, &m))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    fn last() -> String {
        unsafe { CStr::from_ptr(omniscope_last_error()) }
            .to_string_lossy()
            .into_owned()
    }

    #[test]
    fn decide_and_check_witness() {
        unsafe {
            let mut f = ptr::null_mut();
            let src = c("K p & ~K K p");
            assert_eq!(omniscope_formula_parse(src.as_ptr(), &mut f), OmniscopeStatus::Ok);
            let mut v = ptr::null_mut();
            let tag = c("kd45-impossible");
            assert_eq!(omniscope_decide(f, tag.as_ptr(), &mut v), OmniscopeStatus::Ok);
            assert!(omniscope_verdict_satisfiable(v));
            let (mut s, mut w) = (ptr::null_mut(), ptr::null_mut());
            assert_eq!(omniscope_verdict_witness(v, &mut s, &mut w), OmniscopeStatus::Ok);
            let mut held = false;
            assert_eq!(omniscope_holds(s, w, f, &mut held), OmniscopeStatus::Ok);
            assert!(held);

            let mut doc = ptr::null_mut();
            assert_eq!(omniscope_structure_save(s, &mut doc), OmniscopeStatus::Ok);
            let mut s2 = ptr::null_mut();
            assert_eq!(omniscope_structure_load(doc, &mut s2), OmniscopeStatus::Ok);
            assert_eq!((*s).0, (*s2).0);

            let r = omniscope_formula_render(f);
            assert_eq!(CStr::from_ptr(r).to_str().unwrap(), "K p & ~K K p");
            omniscope_string_free(r);
            omniscope_string_free(doc);
            omniscope_string_free(w);
            omniscope_structure_free(s);
            omniscope_structure_free(s2);
            omniscope_verdict_free(v);
            omniscope_formula_free(f);
        }
    }

    #[test]
    fn error_codes() {
        unsafe {
            let mut f = ptr::null_mut();
            let bad = c("K (");
            assert_eq!(omniscope_formula_parse(bad.as_ptr(), &mut f), OmniscopeStatus::ParseError);
            assert!(!last().is_empty());
            assert_eq!(omniscope_formula_parse(ptr::null(), &mut f), OmniscopeStatus::NullArgument);
            let ok = c("l(p) >= 1");
            assert_eq!(omniscope_formula_parse(ok.as_ptr(), &mut f), OmniscopeStatus::Ok);
            let mut v = ptr::null_mut();
            let tag = c("kd45-awareness");
            assert_eq!(omniscope_decide(f, tag.as_ptr(), &mut v), OmniscopeStatus::UnsupportedClass);
            let tag = c("kd45-nonsense");
            assert_eq!(omniscope_decide(f, tag.as_ptr(), &mut v), OmniscopeStatus::ParseError);
            omniscope_formula_free(f);

            let mut s = ptr::null_mut();
            let doc = c(r#"{"tag": {"modal": "S5", "approach": "standard", "probabilistic": false},
                "worlds": ["w"], "pi": {"w": {}}, "possible": []}"#);
            assert_eq!(omniscope_structure_load(doc.as_ptr(), &mut s), OmniscopeStatus::SchemaError);
            assert!(omniscope_formula_render(ptr::null()).is_null());
        }
    }

    #[test]
    fn dolev_yao() {
        let msgs = [c("{m}k"), c("key:k")];
        let ptrs: Vec<*const c_char> = msgs.iter().map(|m| m.as_ptr()).collect();
        let q = c("m");
        let mut yes = false;
        unsafe {
            assert_eq!(omniscope_dy_derives(ptrs.as_ptr(), 2, q.as_ptr(), &mut yes), OmniscopeStatus::Ok);
            assert!(yes);
            assert_eq!(omniscope_dy_derives(ptrs.as_ptr(), 1, q.as_ptr(), &mut yes), OmniscopeStatus::Ok);
            assert!(!yes);
        }
    }
}
