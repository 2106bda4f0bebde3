//! C ABI over `siegel-core`.
//!
//! Every fallible call returns a [`SiegelStatus`]; on failure the message is kept in
//! a thread-local slot readable through [`siegel_last_error`]. Points and rotations
//! are opaque heap handles released with their `_free` functions. Matrices cross the
//! boundary as 2x2 row-major `double[4]` arrays.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use siegel_core::boundary::{run_table_case, CaseId, RunOptions};
use siegel_core::contraction::{
    mu_star, psi_apply, psi_blocks, SymplecticRotation, DEFAULT_DELTA_G,
};
use siegel_core::matkernel::RealSym2;
use siegel_core::siegel::{to_ball, wp, SiegelPoint};
use siegel_core::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiegelStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Malformed JSON, asymmetric or non-PSD input.
    Schema = 3,
    /// Degenerate point, singular transform or rank-deficient data.
    Numerical = 4,
    /// Impossible case or an interval violation.
    Domain = 5,
    Internal = 6,
    Panic = 7,
}

/// Interior point of the half-space.
pub struct SiegelPointHandle(SiegelPoint);

/// Rotation `Psi_lambda` for the default `Delta_G`.
pub struct SiegelRotationHandle(SymplecticRotation);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SiegelContraction {
    pub p: f64,
    pub mu_star: f64,
    pub mu_raw: f64,
    pub wp1: f64,
    pub wp2: f64,
    pub r1: f64,
    pub r2: f64,
    /// NaN when a point is `iI`.
    pub mu_polar: f64,
    pub range_residual: f64,
    pub eq_residual: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SiegelStatus {
    match e {
        Error::Schema(_)
        | Error::Asymmetry { .. }
        | Error::NotPsd { .. }
        | Error::AsymmetricX { .. } => SiegelStatus::Schema,
        Error::InvalidParameter(_) | Error::InvalidNorm(_) => SiegelStatus::InvalidArgument,
        Error::OutOfInterval { .. }
        | Error::InfeasibleCase(_)
        | Error::NotImpossibleCase(_)
        | Error::OutsideBall { .. } => SiegelStatus::Domain,
        Error::Internal(_) => SiegelStatus::Internal,
        _ => SiegelStatus::Numerical,
    }
}

/// Runs `f`, recording errors and panics.
fn guard(f: impl FnOnce() -> Result<(), (SiegelStatus, String)>) -> SiegelStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SiegelStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside siegel".into());
            SiegelStatus::Panic
        }
    }
}

fn core_err(e: Error) -> (SiegelStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (SiegelStatus, String) {
    (SiegelStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read4<'a>(p: *const f64, what: &str) -> Result<&'a [f64; 4], (SiegelStatus, String)> {
    p.cast::<[f64; 4]>().as_ref().ok_or_else(|| null(what))
}

fn sym_rows(m: &[f64; 4], what: &str) -> Result<RealSym2, (SiegelStatus, String)> {
    RealSym2::from_rows([[m[0], m[1]], [m[2], m[3]]], 1e-12)
        .map_err(|e| (SiegelStatus::Schema, format!("{what}: {e}")))
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (SiegelStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        (
            SiegelStatus::InvalidArgument,
            format!("{what} is not UTF-8"),
        )
    })
}

fn boxed_point(out: *mut *mut SiegelPointHandle, z: SiegelPoint) {
    // SAFETY: callers check `out` before computing `z`
    unsafe { *out = Box::into_raw(Box::new(SiegelPointHandle(z))) };
}

/// Message of the last failed call on this thread, or NULL.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn siegel_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Builds an interior point from row-major `x` and `y`.
///
/// # Safety
/// `x` and `y` point to 4 doubles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn siegel_point_new(
    x: *const f64,
    y: *const f64,
    out: *mut *mut SiegelPointHandle,
) -> SiegelStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let x = sym_rows(read4(x, "x")?, "x")?;
        let y = sym_rows(read4(y, "y")?, "y")?;
        boxed_point(out, SiegelPoint::new(x, y).map_err(core_err)?);
        Ok(())
    })
}

/// Parses `{"X": [[..],[..]], "Y": [[..],[..]]}`; the point must be interior.
///
/// # Safety
/// `json` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn siegel_point_from_json(
    json: *const c_char,
    out: *mut *mut SiegelPointHandle,
) -> SiegelStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let z = SiegelPoint::from_json(c_str(json, "json")?).map_err(core_err)?;
        if !z.is_interior() {
            return Err((SiegelStatus::Numerical, "point lies on the boundary".into()));
        }
        boxed_point(out, z);
        Ok(())
    })
}

/// Copies `X` and `Y` out as row-major arrays.
///
/// # Safety
/// `z` is a live handle; `x` and `y` point to 4 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn siegel_point_parts(
    z: *const SiegelPointHandle,
    x: *mut f64,
    y: *mut f64,
) -> SiegelStatus {
    guard(|| {
        let z = z.as_ref().ok_or_else(|| null("z"))?;
        let (xo, yo) = (x.cast::<[f64; 4]>(), y.cast::<[f64; 4]>());
        let (xo, yo) = (
            xo.as_mut().ok_or_else(|| null("x"))?,
            yo.as_mut().ok_or_else(|| null("y"))?,
        );
        let flat = |m: RealSym2| [m.xx, m.xy, m.xy, m.yy];
        *xo = flat(z.0.x());
        *yo = flat(z.0.y());
        Ok(())
    })
}

/// # Safety
/// `z` is NULL or a handle from this library, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn siegel_point_free(z: *mut SiegelPointHandle) {
    if !z.is_null() {
        drop(Box::from_raw(z));
    }
}

/// `w_p(Z, iI)`.
///
/// # Safety
/// `z` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn siegel_wp(
    z: *const SiegelPointHandle,
    p: f64,
    out: *mut f64,
) -> SiegelStatus {
    guard(|| {
        let z = z.as_ref().ok_or_else(|| null("z"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = wp(&z.0, p).map_err(core_err)?;
        Ok(())
    })
}

/// Cayley image `W`, split into real and imaginary row-major parts.
///
/// # Safety
/// `z` is a live handle; `re` and `im` point to 4 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn siegel_to_ball(
    z: *const SiegelPointHandle,
    re: *mut f64,
    im: *mut f64,
) -> SiegelStatus {
    guard(|| {
        let z = z.as_ref().ok_or_else(|| null("z"))?;
        let re = re.cast::<[f64; 4]>().as_mut().ok_or_else(|| null("re"))?;
        let im = im.cast::<[f64; 4]>().as_mut().ok_or_else(|| null("im"))?;
        let w = to_ball(&z.0).map_err(core_err)?.matrix();
        for i in 0..2 {
            for j in 0..2 {
                re[2 * i + j] = w.m[i][j].re;
                im[2 * i + j] = w.m[i][j].im;
            }
        }
        Ok(())
    })
}

/// Contraction report of a pair.
///
/// # Safety
/// `z1`, `z2` are live handles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn siegel_mu_star(
    z1: *const SiegelPointHandle,
    z2: *const SiegelPointHandle,
    p: f64,
    out: *mut SiegelContraction,
) -> SiegelStatus {
    guard(|| {
        let z1 = z1.as_ref().ok_or_else(|| null("z1"))?;
        let z2 = z2.as_ref().ok_or_else(|| null("z2"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let r = mu_star(&z1.0, &z2.0, p).map_err(core_err)?;
        *out = SiegelContraction {
            p: r.p,
            mu_star: r.mu_star,
            mu_raw: r.mu_raw,
            wp1: r.wp1,
            wp2: r.wp2,
            r1: r.r1,
            r2: r.r2,
            mu_polar: r.mu_polar.unwrap_or(f64::NAN),
            range_residual: r.range_residual,
            eq_residual: r.eq_residual,
        };
        Ok(())
    })
}

/// `Psi_lambda` for `lambda` in the closed admissible interval.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn siegel_rotation_new(
    lambda: f64,
    out: *mut *mut SiegelRotationHandle,
) -> SiegelStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let rot = psi_blocks(lambda, &DEFAULT_DELTA_G).map_err(core_err)?;
        *out = Box::into_raw(Box::new(SiegelRotationHandle(rot)));
        Ok(())
    })
}

/// # Safety
/// `rot` is NULL or a handle from this library, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn siegel_rotation_free(rot: *mut SiegelRotationHandle) {
    if !rot.is_null() {
        drop(Box::from_raw(rot));
    }
}

/// Image of `z` under the rotation, as a new handle.
///
/// # Safety
/// `rot` and `z` are live handles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn siegel_psi_apply(
    rot: *const SiegelRotationHandle,
    z: *const SiegelPointHandle,
    out: *mut *mut SiegelPointHandle,
) -> SiegelStatus {
    guard(|| {
        let rot = rot.as_ref().ok_or_else(|| null("rot"))?;
        let z = z.as_ref().ok_or_else(|| null("z"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        boxed_point(out, psi_apply(&rot.0, &z.0).map_err(core_err)?);
        Ok(())
    })
}

/// Boundary run for a case such as `"++,+-"` as a JSON report.
///
/// Feasible cases run their witness; impossible ones run falsifier sample `seed`.
/// The string is released with [`siegel_string_free`].
///
/// # Safety
/// `case_label` is a NUL-terminated string; `out_json` is writable.
#[no_mangle]
pub unsafe extern "C" fn siegel_boundary_run(
    case_label: *const c_char,
    seed: u64,
    p: f64,
    out_json: *mut *mut c_char,
) -> SiegelStatus {
    guard(|| {
        if out_json.is_null() {
            return Err(null("out_json"));
        }
        let case: CaseId = c_str(case_label, "case_label")?.parse().map_err(core_err)?;
        let report = run_table_case(case, seed, p, &RunOptions::default()).map_err(core_err)?;
        let json =
            serde_json::to_string(&report).map_err(|e| (SiegelStatus::Internal, e.to_string()))?;
        *out_json = CString::new(json).expect("JSON has no NUL").into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` is NULL or a string returned by this library, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn siegel_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
