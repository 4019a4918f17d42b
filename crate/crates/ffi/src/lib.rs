//! C ABI over the `paraboloid-float` library.
//!
//! Every fallible function returns a [`PfStatus`]; on failure a message is
//! available from [`pf_last_error_message`] on the calling thread. Handles
//! are opaque and must be released with the matching `*_free` function.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use paraboloid_float::error::Error;
use paraboloid_float::geometry::{SegmentShape, Side};
use paraboloid_float::solver::{
    find_all_equilibria, no_solution_region, CaseKind, Equilibrium, Position, RegionCase, SearchOptions,
};
use paraboloid_float::stability::{
    classify, degenerate_probe, potential_nonarchimedean, Resolution, StabilityKind, StabilityVerdict,
};
use paraboloid_float::sweep::{csv_string, sweep_branches, SweepCurve};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PfStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    InvalidDensity = 3,
    Convergence = 4,
    Numeric = 5,
    OutOfRange = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PfPosition {
    LeftHand = 0,
    RightHand = 1,
    Horizontal = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PfCase {
    Archimedean = 0,
    NonArchimedean = 1,
    Horizontal = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PfStability {
    Stable = 0,
    Saddle = 1,
    DegenerateUnstable = 2,
    DegenerateInconclusive = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PfRegionCase {
    WholeLeftHalf = 0,
    UpToCenter = 1,
    Bounded = 2,
    Empty = 3,
}

/// Opaque segment shape.
pub struct PfShape {
    inner: SegmentShape,
}

/// Opaque list of equilibria.
pub struct PfEquilibria {
    items: Vec<Equilibrium>,
    failures: usize,
}

/// Opaque sweep result.
pub struct PfSweep {
    curve: SweepCurve,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PfSearchOptions {
    pub sweep_step: f64,
    pub refine_steep: bool,
    pub residual_tol: f64,
    pub dedup_tol: f64,
}

/// Fields without a value (`has_* == false`) are set to NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PfEquilibrium {
    pub position: PfPosition,
    pub case_kind: PfCase,
    pub has_x: bool,
    pub x: f64,
    pub has_b: bool,
    pub b: f64,
    pub has_c: bool,
    pub c: f64,
    pub sigma: f64,
    pub tilt_deg: f64,
    pub stability: PfStability,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// NaN unless the Hessian is singular.
    pub cubic_coefficient: f64,
    pub residual_e: f64,
    pub residual_f: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PfClassification {
    pub e: f64,
    pub f: f64,
    pub sigma_implied: f64,
    pub grad: [f64; 2],
    /// Row-major `[h_XX, h_Xb, h_bX, h_bb]`.
    pub hessian: [f64; 4],
    pub stability: PfStability,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub cubic_coefficient: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PfCurvePoint {
    pub x: f64,
    pub b: f64,
    pub sigma: f64,
    pub branch: usize,
    pub stability: PfStability,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PfRegion {
    pub a1: f64,
    pub gamma: f64,
    pub delta: f64,
    pub has_x1: bool,
    pub x1: f64,
    pub has_x2: bool,
    pub x2: f64,
    pub region_case: PfRegionCase,
    pub has_interval: bool,
    pub lo: f64,
    pub hi: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: PfStatus, msg: impl Into<String>) -> PfStatus {
    set_error(msg);
    status
}

fn status_of(e: &Error) -> PfStatus {
    match e {
        Error::Domain(_) | Error::Degenerate(_) | Error::Pole { .. } => PfStatus::Domain,
        Error::InvalidDensity(_) => PfStatus::InvalidDensity,
        Error::Convergence(_) => PfStatus::Convergence,
        Error::Tolerance { .. } | Error::Stencil(_) | Error::Probe(_) => PfStatus::Numeric,
    }
}

fn from_error(e: Error) -> PfStatus {
    fail(status_of(&e), e.to_string())
}

/// Runs `f`, converting panics into [`PfStatus::Panic`].
fn guard<F: FnOnce() -> PfStatus>(f: F) -> PfStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(PfStatus::Panic, format!("panic: {msg}"))
        }
    }
}

fn stability_of(v: &StabilityVerdict) -> PfStability {
    match (v.kind, v.degenerate.map(|d| d.resolved)) {
        (StabilityKind::Stable, _) => PfStability::Stable,
        (StabilityKind::Saddle, _) => PfStability::Saddle,
        (StabilityKind::Degenerate, Some(Resolution::Unstable)) => PfStability::DegenerateUnstable,
        (StabilityKind::Degenerate, _) => PfStability::DegenerateInconclusive,
    }
}

fn opt(v: Option<f64>) -> (bool, f64) {
    (v.is_some(), v.unwrap_or(f64::NAN))
}

fn equilibrium_record(e: &Equilibrium) -> PfEquilibrium {
    let (has_x, x) = opt(e.x);
    let (has_b, b) = opt(e.b);
    let (has_c, c) = opt(e.c);
    PfEquilibrium {
        position: match e.side {
            Position::LeftHand => PfPosition::LeftHand,
            Position::RightHand => PfPosition::RightHand,
            Position::Horizontal => PfPosition::Horizontal,
        },
        case_kind: match e.case_kind {
            CaseKind::Archimedean => PfCase::Archimedean,
            CaseKind::NonArchimedean => PfCase::NonArchimedean,
            CaseKind::Horizontal => PfCase::Horizontal,
        },
        has_x,
        x,
        has_b,
        b,
        has_c,
        c,
        sigma: e.sigma,
        tilt_deg: e.tilt_deg,
        stability: stability_of(&e.stability),
        lambda_min: e.stability.eigenvalues.0,
        lambda_max: e.stability.eigenvalues.1,
        cubic_coefficient: e.stability.degenerate.map_or(f64::NAN, |d| d.cubic_coefficient),
        residual_e: e.residuals.e,
        residual_f: e.residuals.f_rel,
    }
}

unsafe fn shape_ref<'a>(shape: *const PfShape) -> Result<&'a SegmentShape, PfStatus> {
    shape.as_ref().map(|s| &s.inner).ok_or_else(|| fail(PfStatus::NullPointer, "shape handle is null"))
}

fn store_shape(result: paraboloid_float::error::Result<SegmentShape>, out: *mut *mut PfShape) -> PfStatus {
    if out.is_null() {
        return fail(PfStatus::NullPointer, "output pointer is null");
    }
    match result {
        Ok(inner) => {
            unsafe { *out = Box::into_raw(Box::new(PfShape { inner })) };
            PfStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

/// Message of the last failure on this thread, or null. Valid until the
/// next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn pf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pf_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(s) => s,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}

#[no_mangle]
pub extern "C" fn pf_search_options_default() -> PfSearchOptions {
    let d = SearchOptions::default();
    PfSearchOptions {
        sweep_step: d.sweep_step,
        refine_steep: d.refine_steep,
        residual_tol: d.residual_tol,
        dedup_tol: d.dedup_tol,
    }
}

#[no_mangle]
pub unsafe extern "C" fn pf_shape_new(axis: f64, out: *mut *mut PfShape) -> PfStatus {
    guard(|| store_shape(SegmentShape::new(axis), out))
}

/// Shape from a base angle in degrees, `a = tan²(φ)/4`.
#[no_mangle]
pub unsafe extern "C" fn pf_shape_from_base_angle(phi_deg: f64, out: *mut *mut PfShape) -> PfStatus {
    guard(|| store_shape(SegmentShape::from_base_angle_deg(phi_deg), out))
}

/// Axis length, or NaN for a null handle.
#[no_mangle]
pub unsafe extern "C" fn pf_shape_axis(shape: *const PfShape) -> f64 {
    shape.as_ref().map_or(f64::NAN, |s| s.inner.axis())
}

#[no_mangle]
pub unsafe extern "C" fn pf_shape_free(shape: *mut PfShape) {
    if !shape.is_null() {
        drop(Box::from_raw(shape));
    }
}

/// All equilibria for density `sigma`. `options` may be null for defaults.
#[no_mangle]
pub unsafe extern "C" fn pf_solve(
    shape: *const PfShape,
    sigma: f64,
    options: *const PfSearchOptions,
    out: *mut *mut PfEquilibria,
) -> PfStatus {
    guard(|| {
        let shape = match shape_ref(shape) {
            Ok(s) => s,
            Err(st) => return st,
        };
        if out.is_null() {
            return fail(PfStatus::NullPointer, "output pointer is null");
        }
        let opts = match options.as_ref() {
            Some(o) => SearchOptions {
                sweep_step: o.sweep_step,
                refine_steep: o.refine_steep,
                residual_tol: o.residual_tol,
                dedup_tol: o.dedup_tol,
            },
            None => SearchOptions::default(),
        };
        match find_all_equilibria(shape, sigma, &opts) {
            Ok(r) => {
                let failures = r.diagnostics.failures.len();
                *out = Box::into_raw(Box::new(PfEquilibria { items: r.equilibria, failures }));
                PfStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Number of equilibria, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn pf_equilibria_len(list: *const PfEquilibria) -> usize {
    list.as_ref().map_or(0, |l| l.items.len())
}

/// Candidates skipped because they did not converge.
#[no_mangle]
pub unsafe extern "C" fn pf_equilibria_failures(list: *const PfEquilibria) -> usize {
    list.as_ref().map_or(0, |l| l.failures)
}

#[no_mangle]
pub unsafe extern "C" fn pf_equilibria_get(
    list: *const PfEquilibria,
    index: usize,
    out: *mut PfEquilibrium,
) -> PfStatus {
    guard(|| {
        let (Some(list), false) = (list.as_ref(), out.is_null()) else {
            return fail(PfStatus::NullPointer, "null list or output pointer");
        };
        match list.items.get(index) {
            Some(e) => {
                *out = equilibrium_record(e);
                PfStatus::Ok
            }
            None => fail(PfStatus::OutOfRange, format!("index {index} out of range (len {})", list.items.len())),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn pf_equilibria_free(list: *mut PfEquilibria) {
    if !list.is_null() {
        drop(Box::from_raw(list));
    }
}

/// Conditions, derivatives and verdict at `(X, b)`. `right_hand` selects the
/// density `1 − σ`.
#[no_mangle]
pub unsafe extern "C" fn pf_classify(
    shape: *const PfShape,
    x: f64,
    b: f64,
    sigma: f64,
    right_hand: bool,
    out: *mut PfClassification,
) -> PfStatus {
    guard(|| {
        let shape = match shape_ref(shape) {
            Ok(s) => s,
            Err(st) => return st,
        };
        if out.is_null() {
            return fail(PfStatus::NullPointer, "output pointer is null");
        }
        if !(sigma > 0.0 && sigma < 1.0) {
            return from_error(Error::InvalidDensity(sigma));
        }
        let side = if right_hand { Side::RightHand } else { Side::LeftHand };
        let s = side.effective_density(sigma);
        let result = (|| {
            let cond = paraboloid_float::conditions::evaluate(shape, x, b, s)?;
            let pe = potential_nonarchimedean(shape, x, b, s)?;
            let mut v = classify(&pe.hessian);
            if v.kind == StabilityKind::Degenerate {
                v.degenerate = degenerate_probe(shape, x, b, s).ok();
            }
            Ok::<_, Error>((cond, pe, v))
        })();
        match result {
            Ok((cond, pe, v)) => {
                let h = pe.hessian;
                *out = PfClassification {
                    e: cond.e,
                    f: cond.f,
                    sigma_implied: cond.sigma_implied,
                    grad: pe.grad,
                    hessian: [h[0][0], h[0][1], h[1][0], h[1][1]],
                    stability: stability_of(&v),
                    lambda_min: v.eigenvalues.0,
                    lambda_max: v.eigenvalues.1,
                    cubic_coefficient: v.degenerate.map_or(f64::NAN, |d| d.cubic_coefficient),
                };
                PfStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn pf_region(shape: *const PfShape, out: *mut PfRegion) -> PfStatus {
    guard(|| {
        let shape = match shape_ref(shape) {
            Ok(s) => s,
            Err(st) => return st,
        };
        if out.is_null() {
            return fail(PfStatus::NullPointer, "output pointer is null");
        }
        let r = no_solution_region(shape);
        let (has_x1, x1) = opt(r.x1);
        let (has_x2, x2) = opt(r.x2);
        let (lo, hi) = r.interval.unwrap_or((f64::NAN, f64::NAN));
        *out = PfRegion {
            a1: r.a1,
            gamma: r.gamma,
            delta: r.delta,
            has_x1,
            x1,
            has_x2,
            x2,
            region_case: match r.case {
                RegionCase::WholeLeftHalf => PfRegionCase::WholeLeftHalf,
                RegionCase::UpToCenter => PfRegionCase::UpToCenter,
                RegionCase::Bounded => PfRegionCase::Bounded,
                RegionCase::Empty => PfRegionCase::Empty,
            },
            has_interval: r.interval.is_some(),
            lo,
            hi,
        };
        PfStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn pf_sweep(shape: *const PfShape, step: f64, refine_steep: bool, out: *mut *mut PfSweep) -> PfStatus {
    guard(|| {
        let shape = match shape_ref(shape) {
            Ok(s) => s,
            Err(st) => return st,
        };
        if out.is_null() {
            return fail(PfStatus::NullPointer, "output pointer is null");
        }
        match sweep_branches(shape, step, refine_steep) {
            Ok(curve) => {
                *out = Box::into_raw(Box::new(PfSweep { curve }));
                PfStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn pf_sweep_len(sweep: *const PfSweep) -> usize {
    sweep.as_ref().map_or(0, |s| s.curve.points.len())
}

#[no_mangle]
pub unsafe extern "C" fn pf_sweep_point(sweep: *const PfSweep, index: usize, out: *mut PfCurvePoint) -> PfStatus {
    guard(|| {
        let (Some(sweep), false) = (sweep.as_ref(), out.is_null()) else {
            return fail(PfStatus::NullPointer, "null sweep or output pointer");
        };
        match sweep.curve.points.get(index) {
            Some(p) => {
                *out = PfCurvePoint {
                    x: p.x,
                    b: p.b,
                    sigma: p.sigma,
                    branch: p.branch,
                    stability: stability_of(&p.stability),
                };
                PfStatus::Ok
            }
            None => fail(PfStatus::OutOfRange, format!("index {index} out of range")),
        }
    })
}

/// Writes the CSV export into `buf` (NUL-terminated). `needed` receives the
/// required capacity including the terminator; pass a null `buf` to query it.
#[no_mangle]
pub unsafe extern "C" fn pf_sweep_csv(
    sweep: *const PfSweep,
    buf: *mut c_char,
    capacity: usize,
    needed: *mut usize,
) -> PfStatus {
    guard(|| {
        let Some(sweep) = sweep.as_ref() else {
            return fail(PfStatus::NullPointer, "sweep handle is null");
        };
        let csv = csv_string(&sweep.curve);
        let len = csv.len() + 1;
        if let Some(n) = needed.as_mut() {
            *n = len;
        }
        if buf.is_null() {
            return PfStatus::Ok;
        }
        if capacity < len {
            return fail(PfStatus::BufferTooSmall, format!("buffer holds {capacity} bytes, {len} needed"));
        }
        ptr::copy_nonoverlapping(csv.as_ptr().cast::<c_char>(), buf, csv.len());
        *buf.add(csv.len()) = 0;
        PfStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn pf_sweep_free(sweep: *mut PfSweep) {
    if !sweep.is_null() {
        drop(Box::from_raw(sweep));
    }
}
