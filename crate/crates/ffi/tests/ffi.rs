use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use siegel_ffi::*;

fn point(x: [f64; 4], y: [f64; 4]) -> *mut SiegelPointHandle {
    let mut h = ptr::null_mut();
    let st = unsafe { siegel_point_new(x.as_ptr(), y.as_ptr(), &mut h) };
    assert_eq!(st, SiegelStatus::Ok);
    h
}

fn last_error() -> String {
    let p = siegel_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

#[test]
fn hand_value_through_the_abi() {
    let a = point([0.0; 4], [1.0, 0.0, 0.0, 1.0]);
    let b = point([0.0; 4], [2.0, 0.0, 0.0, 2.0]);
    let mut r = SiegelContraction::default();
    assert_eq!(
        unsafe { siegel_mu_star(a, b, 1.0, &mut r) },
        SiegelStatus::Ok
    );
    assert!((r.mu_star - 2.0 / 9.0).abs() < 1e-12);
    assert!(r.mu_polar.is_nan());

    let mut w = 0.0;
    assert_eq!(unsafe { siegel_wp(a, 1.0, &mut w) }, SiegelStatus::Ok);
    assert_eq!(w, 0.0);

    let (mut re, mut im) = ([9.0; 4], [9.0; 4]);
    assert_eq!(
        unsafe { siegel_to_ball(a, re.as_mut_ptr(), im.as_mut_ptr()) },
        SiegelStatus::Ok
    );
    assert!(re.iter().chain(&im).all(|v| v.abs() < 1e-15));
    unsafe {
        siegel_point_free(a);
        siegel_point_free(b);
    }
}

#[test]
fn rotation_fixes_base_point() {
    let mut rot = ptr::null_mut();
    assert_eq!(
        unsafe { siegel_rotation_new(0.5, &mut rot) },
        SiegelStatus::Ok
    );
    let json = CString::new(r#"{"X":[[0,0],[0,0]],"Y":[[1,0],[0,1]]}"#).unwrap();
    let mut z = ptr::null_mut();
    assert_eq!(
        unsafe { siegel_point_from_json(json.as_ptr(), &mut z) },
        SiegelStatus::Ok
    );
    let mut moved = ptr::null_mut();
    assert_eq!(
        unsafe { siegel_psi_apply(rot, z, &mut moved) },
        SiegelStatus::Ok
    );
    let (mut x, mut y) = ([0.0; 4], [0.0; 4]);
    assert_eq!(
        unsafe { siegel_point_parts(moved, x.as_mut_ptr(), y.as_mut_ptr()) },
        SiegelStatus::Ok
    );
    assert!(x.iter().all(|v| v.abs() < 1e-12));
    assert!((y[0] - 1.0).abs() < 1e-12 && (y[3] - 1.0).abs() < 1e-12 && y[1].abs() < 1e-12);
    unsafe {
        siegel_point_free(moved);
        siegel_point_free(z);
        siegel_rotation_free(rot);
    }
}

#[test]
fn errors_are_reported() {
    let mut h = ptr::null_mut();
    let x = [0.0, 1.0, 0.5, 0.0];
    let y = [1.0, 0.0, 0.0, 1.0];
    assert_eq!(
        unsafe { siegel_point_new(x.as_ptr(), y.as_ptr(), &mut h) },
        SiegelStatus::Schema
    );
    assert!(last_error().contains("symmetric"));
    assert!(h.is_null());

    assert_eq!(
        unsafe { siegel_point_new(ptr::null(), y.as_ptr(), &mut h) },
        SiegelStatus::NullPointer
    );
    let mut rot = ptr::null_mut();
    assert_eq!(
        unsafe { siegel_rotation_new(5.0, &mut rot) },
        SiegelStatus::Domain
    );
    let bad = CString::new("{").unwrap();
    assert_eq!(
        unsafe { siegel_point_from_json(bad.as_ptr(), &mut h) },
        SiegelStatus::Schema
    );
    let mut w = 0.0;
    assert_eq!(
        unsafe { siegel_wp(ptr::null(), 1.0, &mut w) },
        SiegelStatus::NullPointer
    );
    unsafe {
        siegel_point_free(ptr::null_mut());
        siegel_string_free(ptr::null_mut());
    }
}

#[test]
fn boundary_report_as_json() {
    let case = CString::new("++,+-").unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(
        unsafe { siegel_boundary_run(case.as_ptr(), 42, 1.0, &mut s) },
        SiegelStatus::Ok
    );
    let text = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { siegel_string_free(s) };
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["verdict"], "Impossible");

    let bad = CString::new("++").unwrap();
    assert_eq!(
        unsafe { siegel_boundary_run(bad.as_ptr(), 42, 1.0, &mut s) },
        SiegelStatus::Schema
    );
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    let src = tempfile::Builder::new().suffix(".c").tempfile().unwrap();
    std::fs::write(
        src.path(),
        "#include \"siegel.h\"\nint main(void) { SiegelContraction r; (void)r; return SIEGEL_STATUS_OK; }\n",
    )
    .unwrap();
    for (cc, extra) in [("cc", &["-std=c99"][..]), ("c++", &["-x", "c++"][..])] {
        let status = Command::new(cc)
            .args(extra)
            .args(["-Wall", "-Werror", "-fsyntax-only", "-I", dir])
            .arg(src.path())
            .status();
        match status {
            Ok(s) => assert!(s.success(), "{cc} rejected the header"),
            Err(_) => eprintln!("{cc} not available; header check skipped"),
        }
    }
}
