use std::ffi::{c_char, CStr, CString};
use std::ptr;

use hardy_cones_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 256];
    unsafe { hc_last_error_message(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn quarter_plane_constants() {
    let mut cone = ptr::null_mut();
    assert_eq!(unsafe { hc_cone_sector(std::f64::consts::FRAC_PI_2, &mut cone) }, HcStatus::Ok);
    assert_eq!(unsafe { hc_cone_dim(cone) }, 2);
    let mut c = HcConstants::default();
    assert_eq!(unsafe { hc_constants(cone, 0.0, 3, &mut c) }, HcStatus::Ok);
    assert!((c.sigma - 4.0).abs() < 1e-5);
    assert!((c.lambda - 4.0).abs() < 1e-5);
    assert!((c.mu0 - 0.25).abs() < 1e-3);
    let t = std::f64::consts::PI / 8.0;
    let x = [2.0 * t.cos(), 2.0 * t.sin()];
    let mut d = 0.0;
    assert_eq!(unsafe { hc_cone_delta(cone, x.as_ptr(), 2, &mut d) }, HcStatus::Ok);
    assert!((d - 2.0 * t.sin()).abs() < 1e-14);
    unsafe { hc_cone_free(cone) };
}

#[test]
fn spectrum_handle() {
    let mut cone = ptr::null_mut();
    assert_eq!(unsafe { hc_cone_cap(3, std::f64::consts::FRAC_PI_2, &mut cone) }, HcStatus::Ok);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { hc_sigma(cone, 0.0, 2, &mut s) }, HcStatus::Ok);
    assert!((unsafe { hc_spectrum_sigma(s) } - 2.0).abs() < 1e-3);
    let pole = [0.0, 0.0, 3.0];
    let mut v = 0.0;
    assert_eq!(unsafe { hc_spectrum_eval(s, pole.as_ptr(), 3, &mut v) }, HcStatus::Ok);
    assert!((v - 1.0).abs() < 1e-6);
    unsafe { hc_spectrum_free(s) };
    unsafe { hc_cone_free(cone) };
    assert!(unsafe { hc_spectrum_sigma(ptr::null()) }.is_nan());
}

#[test]
fn error_codes_and_messages() {
    let mut cone = ptr::null_mut();
    assert_eq!(unsafe { hc_cone_sector(7.0, &mut cone) }, HcStatus::InvalidCone);
    assert!(cone.is_null());
    assert!(last_error().contains("alpha"));
    assert_eq!(unsafe { hc_cone_sector(1.0, ptr::null_mut()) }, HcStatus::NullPointer);
    let mut d = 0.0;
    assert_eq!(unsafe { hc_cone_delta(ptr::null(), [1.0].as_ptr(), 1, &mut d) }, HcStatus::NullPointer);
    assert_eq!(unsafe { hc_cone_polygon(ptr::null(), 3, &mut cone) }, HcStatus::NullPointer);
    let bad = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0];
    assert_eq!(unsafe { hc_cone_polygon(bad.as_ptr(), 2, &mut cone) }, HcStatus::InvalidCone);
    let mut ok = ptr::null_mut();
    assert_eq!(unsafe { hc_cone_sector(1.0, &mut ok) }, HcStatus::Ok);
    assert_eq!(unsafe { hc_last_error_message(ptr::null_mut(), 0) }, 0);
    unsafe { hc_cone_free(ok) };
    unsafe { hc_cone_free(ptr::null_mut()) };
}

#[test]
fn octant_polygon() {
    let v = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
    let mut cone = ptr::null_mut();
    assert_eq!(unsafe { hc_cone_polygon(v.as_ptr(), 3, &mut cone) }, HcStatus::Ok);
    let x = [1.0, 1.0, 1.0];
    let mut d = 0.0;
    assert_eq!(unsafe { hc_cone_delta(cone, x.as_ptr(), 3, &mut d) }, HcStatus::Ok);
    assert!((d - 1.0).abs() < 1e-12);
    unsafe { hc_cone_free(cone) };
}

#[test]
fn ftt_entry_points() {
    let a = [-0.3, -0.2, 0.0];
    let mut class = HcFttClass::Subcritical;
    assert_eq!(unsafe { hc_ftt_classify(a.as_ptr(), 3, &mut class) }, HcStatus::Ok);
    assert_eq!(class, HcFttClass::Critical);
    let mut r = 1.0;
    assert_eq!(unsafe { hc_ftt_residual(a.as_ptr(), 3, 50, 42, &mut r) }, HcStatus::Ok);
    assert!(r <= 1e-5);
    let positive = [0.1, 0.0];
    assert_eq!(unsafe { hc_ftt_classify(positive.as_ptr(), 2, &mut class) }, HcStatus::InvalidArgument);
}

#[test]
fn report_round_trip() {
    let cfg = CString::new("mu = [0]\n[cone]\nkind = \"sector\"\nalpha_over_pi = 1\n").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { hc_run_report(cfg.as_ptr(), &mut out) }, HcStatus::Ok);
    let json = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_owned();
    unsafe { hc_string_free(out) };
    assert!(json.contains("\"lambda\""));
    let bad = CString::new("mu = [0]\n[cone]\nkind = \"sector\"\nalpha = 7\n").unwrap();
    assert_eq!(unsafe { hc_run_report(bad.as_ptr(), &mut out) }, HcStatus::Config);
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/hardy_cones.h")).unwrap();
    for name in [
        "hc_last_error_message",
        "hc_cone_sector",
        "hc_cone_cap",
        "hc_cone_polygon",
        "hc_cone_free",
        "hc_cone_dim",
        "hc_cone_delta",
        "hc_sigma",
        "hc_spectrum_sigma",
        "hc_spectrum_eval",
        "hc_spectrum_free",
        "hc_mu0",
        "hc_constants",
        "hc_ftt_classify",
        "hc_ftt_residual",
        "hc_run_report",
        "hc_string_free",
        "typedef struct HcCone HcCone",
        "HC_STATUS_NO_CONVERGENCE = 4",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
