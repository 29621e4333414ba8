//! C interface to `slglue`.
//!
//! Handles are opaque and owned by the caller, who releases them with the
//! matching `*_free` function. Every fallible call returns an [`SlgStatus`];
//! on failure [`slg_last_error`] describes the most recent error of the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use slglue::asymptotics::norms::phase_value;
use slglue::asymptotics::regions::{predicted_exponent, Quantity};
use slglue::config::{parse_config, ExperimentConfig};
use slglue::report::{emit_reports, summary_json, VerificationReport};
use slglue::suites::run_suite;
use slglue::{Error, ModelParams};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidParameter = 3,
    ConfigParse = 4,
    ConfigInvalid = 5,
    NoConvergence = 6,
    NoRegion = 7,
    Io = 8,
    Internal = 9,
    Panic = 10,
}

/// Parsed and validated experiment configuration.
pub struct SlgConfig(ExperimentConfig);

/// Model parameters for single evaluations.
pub struct SlgParams(ModelParams);

/// Result of a suite run.
pub struct SlgReport(VerificationReport);

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SlgCounts {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub exploratory: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> SlgStatus {
    match e {
        Error::InvalidParameter(_) | Error::BranchCore | Error::DegenerateFrame(_) => SlgStatus::InvalidParameter,
        Error::Quadrature { .. } | Error::NoConvergence(_) => SlgStatus::NoConvergence,
        Error::NoRegion { .. } => SlgStatus::NoRegion,
        Error::ConfigParse { .. } => SlgStatus::ConfigParse,
        Error::ConfigInvalid(_) => SlgStatus::ConfigInvalid,
        Error::Io { .. } => SlgStatus::Io,
        Error::Internal(_) => SlgStatus::Internal,
    }
}

/// Runs `f`, records its error and converts panics into [`SlgStatus::Panic`].
fn guard<F: FnOnce() -> Result<(), (SlgStatus, String)>>(f: F) -> SlgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            SlgStatus::Ok
        }
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("panic inside slglue".into());
            SlgStatus::Panic
        }
    }
}

fn lib(e: Error) -> (SlgStatus, String) {
    (status_of(&e), e.to_string())
}

fn null() -> (SlgStatus, String) {
    (SlgStatus::NullPointer, "null pointer argument".into())
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, (SlgStatus, String)> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p).to_str().map_err(|_| (SlgStatus::InvalidUtf8, "string argument is not UTF-8".into()))
}

unsafe fn out_arg<'a, T>(p: *mut T) -> Result<&'a mut T, (SlgStatus, String)> {
    p.as_mut().ok_or_else(null)
}

/// Message of the last failed call on this thread; empty after a successful call.
/// The pointer stays valid until the next call into the library from this thread.
#[no_mangle]
pub extern "C" fn slg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses configuration text (`key = value` lines) into a new handle.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn slg_config_parse(text: *const c_char, out: *mut *mut SlgConfig) -> SlgStatus {
    guard(|| {
        let out = out_arg(out)?;
        *out = ptr::null_mut();
        let cfg = parse_config(str_arg(text)?).map_err(lib)?;
        *out = Box::into_raw(Box::new(SlgConfig(cfg)));
        Ok(())
    })
}

/// # Safety
/// `cfg` must come from [`slg_config_parse`] and not be used afterwards; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn slg_config_free(cfg: *mut SlgConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Number of load-time warnings of the configuration.
///
/// # Safety
/// `cfg` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn slg_config_warning_count(cfg: *const SlgConfig) -> usize {
    cfg.as_ref().map_or(0, |c| c.0.warnings.len())
}

/// Runs the configured suite.
///
/// # Safety
/// `cfg` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn slg_run_suite(cfg: *const SlgConfig, out: *mut *mut SlgReport) -> SlgStatus {
    guard(|| {
        let out = out_arg(out)?;
        *out = ptr::null_mut();
        let cfg = cfg.as_ref().ok_or_else(null)?;
        *out = Box::into_raw(Box::new(SlgReport(run_suite(&cfg.0))));
        Ok(())
    })
}

/// # Safety
/// `rep` must come from [`slg_run_suite`] and not be used afterwards; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn slg_report_free(rep: *mut SlgReport) {
    if !rep.is_null() {
        drop(Box::from_raw(rep));
    }
}

/// # Safety
/// `rep` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn slg_report_counts(rep: *const SlgReport, out: *mut SlgCounts) -> SlgStatus {
    guard(|| {
        let rep = rep.as_ref().ok_or_else(null)?;
        let k = rep.0.counts();
        *out_arg(out)? = SlgCounts { total: k.total, passed: k.passed, failed: k.failed, exploratory: k.exploratory };
        Ok(())
    })
}

/// The summary as JSON text; release it with [`slg_string_free`].
///
/// # Safety
/// `rep` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn slg_report_summary_json(rep: *const SlgReport, out: *mut *mut c_char) -> SlgStatus {
    guard(|| {
        let out = out_arg(out)?;
        *out = ptr::null_mut();
        let rep = rep.as_ref().ok_or_else(null)?;
        let s = CString::new(summary_json(&rep.0)).map_err(|e| (SlgStatus::Internal, e.to_string()))?;
        *out = s.into_raw();
        Ok(())
    })
}

/// Writes the curves, summary and table files into `dir`.
///
/// # Safety
/// `rep` must be a live handle and `dir` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn slg_report_emit(rep: *const SlgReport, dir: *const c_char) -> SlgStatus {
    guard(|| {
        let rep = rep.as_ref().ok_or_else(null)?;
        emit_reports(&rep.0, Path::new(str_arg(dir)?)).map_err(lib)?;
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn slg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Default model parameters.
#[no_mangle]
pub extern "C" fn slg_params_default() -> *mut SlgParams {
    Box::into_raw(Box::new(SlgParams(ModelParams::default())))
}

/// # Safety
/// `p` must come from [`slg_params_default`] and not be used afterwards; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn slg_params_free(p: *mut SlgParams) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Sets a numeric field by name (`m`, `a`, `l`, `r0`, `r0_prime`, `c1`, `c2`, `kappa`,
/// `eta1`, `eta2`, `c_eta1`, `c_eta2`, `part_a`, `part_b`, `quad_tol`, `fit_tol`).
/// Invariants are checked by [`slg_params_validate`].
///
/// # Safety
/// `p` must be a live handle and `key` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn slg_params_set(p: *mut SlgParams, key: *const c_char, value: f64) -> SlgStatus {
    guard(|| {
        let p = &mut p.as_mut().ok_or_else(null)?.0;
        let key = str_arg(key)?;
        let slot = match key {
            "m" => {
                if !(value >= 1.0 && value.fract() == 0.0 && value <= u32::MAX as f64) {
                    return Err((SlgStatus::InvalidParameter, format!("m = {value} is not a positive integer")));
                }
                p.m = value as u32;
                return Ok(());
            }
            "a" => &mut p.a,
            "l" => &mut p.l,
            "r0" => &mut p.r0,
            "r0_prime" => &mut p.r0_prime,
            "c1" => &mut p.c1,
            "c2" => &mut p.c2,
            "kappa" => &mut p.kappa,
            "eta1" => &mut p.eta1,
            "eta2" => &mut p.eta2,
            "c_eta1" => &mut p.c_eta1,
            "c_eta2" => &mut p.c_eta2,
            "part_a" => &mut p.part_a,
            "part_b" => &mut p.part_b,
            "quad_tol" => &mut p.quad_tol,
            "fit_tol" => &mut p.fit_tol,
            _ => return Err((SlgStatus::InvalidParameter, format!("unknown parameter '{key}'"))),
        };
        *slot = value;
        Ok(())
    })
}

/// Checks every parameter invariant; the message lists all violations.
///
/// # Safety
/// `p` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn slg_params_validate(p: *const SlgParams) -> SlgStatus {
    guard(|| p.as_ref().ok_or_else(null)?.0.validate().map_err(lib))
}

fn quantity(tag: &str) -> Result<Quantity, (SlgStatus, String)> {
    Quantity::from_tag(tag).ok_or_else(|| (SlgStatus::InvalidParameter, format!("unknown quantity '{tag}'")))
}

/// Table exponent of a phase quantity (`epsL65_Q`, `depsL6_P`, ...) at `(c1, c2, m)`.
///
/// # Safety
/// `tag` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn slg_predicted_exponent(tag: *const c_char, c1: f64, c2: f64, m: u32, out: *mut f64) -> SlgStatus {
    guard(|| {
        let q = quantity(str_arg(tag)?)?;
        *out_arg(out)? = predicted_exponent(q, c1, c2, m).map_err(lib)?.exponent_f64();
        Ok(())
    })
}

/// One sample of a phase quantity at `t`.
///
/// # Safety
/// `p` must be a live handle, `tag` a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn slg_phase_value(p: *const SlgParams, tag: *const c_char, t: f64, out: *mut f64) -> SlgStatus {
    guard(|| {
        let p = &p.as_ref().ok_or_else(null)?.0;
        let q = quantity(str_arg(tag)?)?;
        p.validate().map_err(lib)?;
        *out_arg(out)? = phase_value(q, t, p).map_err(lib)?;
        Ok(())
    })
}
