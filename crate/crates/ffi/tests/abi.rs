use std::ffi::CStr;
use std::ptr;

use paraboloid_float_ffi::*;

fn shape(a: f64) -> *mut PfShape {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { pf_shape_new(a, &mut s) }, PfStatus::Ok);
    s
}

fn last_error() -> String {
    let p = pf_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn solve_reference_case() {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { pf_shape_from_base_angle(74.33, &mut s) }, PfStatus::Ok);
    assert!((unsafe { pf_shape_axis(s) } - 3.17690918).abs() < 1e-7);
    let mut list = ptr::null_mut();
    assert_eq!(unsafe { pf_solve(s, 0.51, ptr::null(), &mut list) }, PfStatus::Ok);
    let n = unsafe { pf_equilibria_len(list) };
    let mut tilts = Vec::new();
    for i in 0..n {
        let mut e = std::mem::MaybeUninit::<PfEquilibrium>::uninit();
        assert_eq!(unsafe { pf_equilibria_get(list, i, e.as_mut_ptr()) }, PfStatus::Ok);
        let e = unsafe { e.assume_init() };
        if e.case_kind == PfCase::NonArchimedean {
            assert!(e.has_x && e.has_b);
            assert!(e.residual_e <= 1e-8 && e.residual_f <= 1e-8);
            tilts.push(e.tilt_deg);
        }
    }
    tilts.sort_by(f64::total_cmp);
    let want = [34.961, 56.793, 94.506, 131.260, 131.653];
    assert_eq!(tilts.len(), 5);
    for (t, w) in tilts.iter().zip(want) {
        assert!((t - w).abs() < 2e-3, "{t} vs {w}");
    }
    let mut e = std::mem::MaybeUninit::<PfEquilibrium>::uninit();
    assert_eq!(unsafe { pf_equilibria_get(list, n, e.as_mut_ptr()) }, PfStatus::OutOfRange);
    unsafe {
        pf_equilibria_free(list);
        pf_shape_free(s);
    }
}

#[test]
fn errors_carry_messages() {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { pf_shape_new(-1.0, &mut s) }, PfStatus::Domain);
    assert!(s.is_null());
    assert!(last_error().contains("axis length"));

    let s = shape(1.0);
    let mut list = ptr::null_mut();
    assert_eq!(unsafe { pf_solve(s, 1.5, ptr::null(), &mut list) }, PfStatus::InvalidDensity);
    assert!(last_error().contains("density must lie in (0,1)"));
    assert_eq!(unsafe { pf_solve(ptr::null(), 0.5, ptr::null(), &mut list) }, PfStatus::NullPointer);

    // a successful call clears the message
    let mut r = std::mem::MaybeUninit::<PfRegion>::uninit();
    assert_eq!(unsafe { pf_region(s, r.as_mut_ptr()) }, PfStatus::Ok);
    assert!(pf_last_error_message().is_null());
    unsafe { pf_shape_free(s) };
}

#[test]
fn classify_degenerate_point() {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { pf_shape_from_base_angle(74.33, &mut s) }, PfStatus::Ok);
    let mut c = std::mem::MaybeUninit::<PfClassification>::uninit();
    let st = unsafe { pf_classify(s, -1.0270270346, -1.1320542054, 0.51000554178, false, c.as_mut_ptr()) };
    assert_eq!(st, PfStatus::Ok);
    let c = unsafe { c.assume_init() };
    assert_eq!(c.stability, PfStability::DegenerateUnstable);
    assert!((c.cubic_coefficient - 0.20378903).abs() < 1e-4);
    assert_eq!(c.hessian[1], c.hessian[2]);
    unsafe { pf_shape_free(s) };
}

#[test]
fn region_and_sweep() {
    let s = shape(2.5);
    let mut r = std::mem::MaybeUninit::<PfRegion>::uninit();
    assert_eq!(unsafe { pf_region(s, r.as_mut_ptr()) }, PfStatus::Ok);
    let r = unsafe { r.assume_init() };
    assert_eq!(r.region_case, PfRegionCase::Bounded);
    assert!((r.x1 + 1.143).abs() < 1e-3 && (r.x2 + 0.0917).abs() < 1e-3);

    let mut sw = ptr::null_mut();
    assert_eq!(unsafe { pf_sweep(s, 0.01, true, &mut sw) }, PfStatus::Ok);
    let n = unsafe { pf_sweep_len(sw) };
    assert!(n > 357);
    let mut p = std::mem::MaybeUninit::<PfCurvePoint>::uninit();
    assert_eq!(unsafe { pf_sweep_point(sw, 0, p.as_mut_ptr()) }, PfStatus::Ok);
    assert!(unsafe { p.assume_init() }.sigma > 0.0);

    let mut needed = 0usize;
    assert_eq!(unsafe { pf_sweep_csv(sw, ptr::null_mut(), 0, &mut needed) }, PfStatus::Ok);
    let mut small = vec![0 as std::ffi::c_char; 8];
    assert_eq!(
        unsafe { pf_sweep_csv(sw, small.as_mut_ptr(), small.len(), ptr::null_mut()) },
        PfStatus::BufferTooSmall
    );
    let mut buf = vec![0 as std::ffi::c_char; needed];
    assert_eq!(unsafe { pf_sweep_csv(sw, buf.as_mut_ptr(), buf.len(), ptr::null_mut()) }, PfStatus::Ok);
    let text = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap();
    assert!(text.starts_with("X,b,sigma,branch,stability,case\n"));
    assert_eq!(text.lines().count(), n + 1);
    unsafe {
        pf_sweep_free(sw);
        pf_shape_free(s);
    }
}

#[test]
fn null_handles_are_tolerated() {
    unsafe {
        pf_shape_free(ptr::null_mut());
        pf_equilibria_free(ptr::null_mut());
        pf_sweep_free(ptr::null_mut());
        assert_eq!(pf_equilibria_len(ptr::null()), 0);
        assert!(pf_shape_axis(ptr::null()).is_nan());
    }
    let v = unsafe { CStr::from_ptr(pf_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/paraboloid_float.h")).unwrap();
    for sym in ["pf_solve", "pf_classify", "pf_sweep_csv", "pf_last_error_message", "typedef struct PfShape PfShape"] {
        assert!(h.contains(sym), "{sym} missing from header");
    }
}

/// Builds the C example against the header and the static library.
#[test]
fn c_program_links_and_runs() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap();
    let lib = profile_dir.join("libparaboloid_float_ffi.a");
    assert!(lib.exists(), "static library not built at {}", lib.display());
    let manifest = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let out = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("pf_smoke");
    let status = std::process::Command::new("cc")
        .arg(manifest.join("examples/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&out)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let run = std::process::Command::new(&out).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let text = String::from_utf8(run.stdout).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.contains("131.653"));
}
