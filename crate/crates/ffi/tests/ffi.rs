use std::ffi::{c_char, CStr};
use std::ptr;

use hyperbif_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    let needed = unsafe { hb_last_error(buf.as_mut_ptr(), buf.len()) };
    let s = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned();
    assert!(needed >= s.len() + 1);
    s
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(hb_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn exterior_profile_round_trips_through_handles() {
    let mut h: *mut HbProfile = ptr::null_mut();
    assert_eq!(unsafe { hb_solve_exterior(3, 3.0, 1.0, &mut h) }, HbStatus::Ok);
    assert!(!h.is_null());
    let mut n = 0usize;
    assert_eq!(unsafe { hb_profile_len(h, &mut n) }, HbStatus::Ok);
    let (mut r, mut v, mut d) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    assert_eq!(
        unsafe { hb_profile_copy(h, r.as_mut_ptr(), v.as_mut_ptr(), d.as_mut_ptr(), n) },
        HbStatus::Ok
    );
    assert_eq!(r[0], 1.0);
    assert_eq!(v[0], 0.0);
    let mut slope = 0.0;
    assert_eq!(unsafe { hb_profile_slope(h, &mut slope) }, HbStatus::Ok);
    assert_eq!(slope, d[0]);

    let (mut val, mut der) = (0.0, 0.0);
    assert_eq!(unsafe { hb_profile_eval(h, r[10], &mut val, &mut der) }, HbStatus::Ok);
    assert!((val - v[10]).abs() < 1e-12 && (der - d[10]).abs() < 1e-9);
    assert_eq!(unsafe { hb_profile_eval(h, 0.5, &mut val, ptr::null_mut()) }, HbStatus::Validation);

    assert_eq!(
        unsafe { hb_profile_copy(h, r.as_mut_ptr(), v.as_mut_ptr(), ptr::null_mut(), n - 1) },
        HbStatus::Validation
    );
    assert!(last_error().contains("buffer length"));
    unsafe { hb_profile_free(h) };
    unsafe { hb_profile_free(ptr::null_mut()) };
}

#[test]
fn invalid_inputs_map_to_status_codes() {
    let mut h: *mut HbProfile = ptr::null_mut();
    assert_eq!(unsafe { hb_solve_exterior(3, 5.0, 1.0, &mut h) }, HbStatus::Validation);
    assert!(h.is_null());
    assert!(last_error().contains("subcritical"));
    assert_eq!(unsafe { hb_solve_exterior(3, 3.0, 1.0, ptr::null_mut()) }, HbStatus::NullPointer);
    let mut n = 0usize;
    assert_eq!(unsafe { hb_profile_len(ptr::null(), &mut n) }, HbStatus::NullPointer);
    assert!(last_error().contains("profile"));

    let mut g: *mut HbGroup = ptr::null_mut();
    assert_eq!(
        unsafe { hb_group_new(HbGroupKind::Icosahedral, 0, 2, 0, 12, &mut g) },
        HbStatus::Validation
    );
}

#[test]
fn last_error_truncates_and_reports_full_size() {
    let mut h: *mut HbProfile = ptr::null_mut();
    unsafe { hb_solve_exterior(1, 3.0, 1.0, &mut h) };
    let full = unsafe { hb_last_error(ptr::null_mut(), 0) };
    let mut small = [0 as c_char; 8];
    assert_eq!(unsafe { hb_last_error(small.as_mut_ptr(), small.len()) }, full);
    let s = unsafe { CStr::from_ptr(small.as_ptr()) };
    assert_eq!(s.to_bytes().len(), 7);
}

#[test]
fn group_handles_expose_invariant_degrees() {
    let mut g: *mut HbGroup = ptr::null_mut();
    assert_eq!(unsafe { hb_group_new(HbGroupKind::Icosahedral, 0, 3, 0, 12, &mut g) }, HbStatus::Ok);
    let mut count = 0usize;
    assert_eq!(unsafe { hb_group_degree_count(g, &mut count) }, HbStatus::Ok);
    assert_eq!(count, 3);
    let (mut k, mut m, mut mu) = (0usize, 0usize, 0.0);
    assert_eq!(unsafe { hb_group_degree(g, 0, &mut k, &mut m, &mut mu) }, HbStatus::Ok);
    assert_eq!((k, m, mu), (6, 1, 42.0));
    assert_eq!(unsafe { hb_group_degree(g, 3, &mut k, &mut m, &mut mu) }, HbStatus::Validation);
    let mut ok = 0;
    assert_eq!(unsafe { hb_group_g1(g, &mut ok) }, HbStatus::Ok);
    assert_eq!(ok, 1);
    unsafe { hb_group_free(g) };

    let mut t: *mut HbGroup = ptr::null_mut();
    assert_eq!(unsafe { hb_group_new(HbGroupKind::Trivial, 0, 3, 0, 4, &mut t) }, HbStatus::Ok);
    assert_eq!(unsafe { hb_group_g1(t, &mut ok) }, HbStatus::Ok);
    assert_eq!(ok, 0);
    unsafe { hb_group_free(t) };
}

#[test]
fn spectral_quantities_have_the_expected_signs() {
    let mut tau = 0.0;
    assert_eq!(unsafe { hb_ground_eigenvalue(3, 3.0, 1.0, &mut tau) }, HbStatus::Ok);
    assert!(tau < 0.0);
    let mut s = 0.0;
    assert_eq!(unsafe { hb_sigma(3, 3.0, 6, 50.0, &mut s) }, HbStatus::Ok);
    assert!(s > 0.0);
}

#[test]
fn dihedral_bifurcation_is_certified() {
    let mut g: *mut HbGroup = ptr::null_mut();
    assert_eq!(unsafe { hb_group_new(HbGroupKind::Dihedral, 3, 2, 0, 12, &mut g) }, HbStatus::Ok);
    let mut b = HbBifurcation::default();
    assert_eq!(unsafe { hb_find_bifurcation(2, 3.0, g, 50.0, 40, &mut b) }, HbStatus::Ok);
    assert_eq!(b.degree, 3);
    assert_eq!(b.certified, 1);
    assert!((b.radius_star * b.radius_star * b.lambda_star - 1.0).abs() < 1e-12);
    assert_eq!(unsafe { hb_find_bifurcation(3, 3.0, g, 50.0, 40, &mut b) }, HbStatus::Validation);
    unsafe { hb_group_free(g) };
}

#[test]
fn header_declares_the_interface() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/hyperbif.h")).unwrap();
    for name in [
        "HYPERBIF_H",
        "HB_STATUS_OK",
        "HB_STATUS_PANIC",
        "HB_GROUP_KIND_ICOSAHEDRAL",
        "typedef struct HbProfile HbProfile",
        "hb_solve_exterior",
        "hb_profile_free",
        "hb_find_bifurcation",
        "hb_last_error",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
    // Compile the header as C when a compiler is around.
    if let Ok(out) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-x", "c", "-std=c99", "-Wall", "-Werror"])
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include/hyperbif.h"))
        .output()
    {
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
}
