use std::ffi::CStr;
use std::ptr;

use biharm_ffi::*;

fn rect(outer: usize, centers: &[f64], radii: &[f64], circle: usize) -> *mut BiharmDomain {
    let mut d = ptr::null_mut();
    let s = unsafe {
        biharm_domain_new(1.0, 0.5, 0.1, outer, centers.as_ptr(), radii.as_ptr(), radii.len(), circle, &mut d)
    };
    assert_eq!(s, BiharmStatus::Ok);
    assert!(!d.is_null());
    d
}

fn last_error() -> String {
    let mut buf = [0 as std::ffi::c_char; 256];
    unsafe { biharm_last_error(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn r2logr(x: [f64; 2], s: [f64; 2]) -> f64 {
    let r2 = (x[0] - s[0]).powi(2) + (x[1] - s[1]).powi(2);
    0.5 * r2 * r2.ln()
}

#[test]
fn manufactured_solve_round_trip() {
    let d = rect(40, &[], &[], 0);
    let mut n = 0;
    assert_eq!(unsafe { biharm_domain_system_size(d, &mut n) }, BiharmStatus::Ok);
    assert_eq!(n, 2 * 40 * 16 + 1);
    let src = [1.8, 1.1];
    let mut sol = ptr::null_mut();
    let s = unsafe { biharm_solve_manufactured(d, src.as_ptr(), [1.0].as_ptr(), 1, &mut sol) };
    assert_eq!(s, BiharmStatus::Ok);
    // The solution keeps the factored system alive on its own.
    unsafe { biharm_domain_free(d) };
    let xy = [0.3, 0.2, 0.7, 0.35];
    let mut w = [0.0; 2];
    assert_eq!(unsafe { biharm_solution_eval(sol, xy.as_ptr(), 2, w.as_mut_ptr()) }, BiharmStatus::Ok);
    for (k, wk) in w.iter().enumerate() {
        let exact = r2logr([xy[2 * k], xy[2 * k + 1]], src);
        assert!((wk - exact).abs() < 1e-9, "{wk} vs {exact}");
    }
    let mut c = [f64::NAN; 1];
    assert_eq!(unsafe { biharm_solution_charges(sol, c.as_mut_ptr(), 1) }, BiharmStatus::Ok);
    assert!(c[0].is_finite());
    unsafe { biharm_solution_free(sol) };
}

#[test]
fn greens_function_with_a_hole() {
    let d = rect(48, &[0.3, 0.25], &[0.06], 8);
    let mut inside = -1;
    assert_eq!(unsafe { biharm_domain_contains(d, 0.3, 0.25, &mut inside) }, BiharmStatus::Ok);
    assert_eq!(inside, 0);
    let loads = [0.7, 0.25];
    let mut sol = ptr::null_mut();
    assert_eq!(unsafe { biharm_solve_greens(d, loads.as_ptr(), 1, &mut sol) }, BiharmStatus::Ok);
    let mut c = [0.0; 2];
    assert_eq!(unsafe { biharm_solution_charges(sol, c.as_mut_ptr(), 1) }, BiharmStatus::InvalidArgument);
    assert_eq!(unsafe { biharm_solution_charges(sol, c.as_mut_ptr(), 2) }, BiharmStatus::Ok);
    let mut w = [0.0];
    assert_eq!(unsafe { biharm_solution_eval(sol, [0.6, 0.2].as_ptr(), 1, w.as_mut_ptr()) }, BiharmStatus::Ok);
    assert!(w[0] > 0.0);
    assert_eq!(
        unsafe { biharm_solution_eval(sol, [0.3, 0.25].as_ptr(), 1, w.as_mut_ptr()) },
        BiharmStatus::OutsideDomain
    );
    assert!(last_error().contains("outside"));
    unsafe { biharm_solution_free(sol) };
    unsafe { biharm_domain_free(d) };
}

#[test]
fn bad_arguments_return_codes() {
    let mut d = ptr::null_mut();
    let s = unsafe { biharm_domain_new(1.0, 0.5, -0.1, 16, ptr::null(), ptr::null(), 0, 0, &mut d) };
    assert_eq!(s, BiharmStatus::InvalidArgument);
    assert!(d.is_null());
    assert!(!last_error().is_empty());
    let s = unsafe { biharm_domain_new(1.0, 0.5, 0.1, 16, ptr::null(), ptr::null(), 1, 4, &mut d) };
    assert_eq!(s, BiharmStatus::NullPointer);
    assert_eq!(unsafe { biharm_domain_system_size(ptr::null(), ptr::null_mut()) }, BiharmStatus::NullPointer);

    let d = rect(16, &[], &[], 0);
    let mut sol = ptr::null_mut();
    let inside = [0.5, 0.25];
    let s = unsafe { biharm_solve_manufactured(d, inside.as_ptr(), [1.0].as_ptr(), 1, &mut sol) };
    assert_eq!(s, BiharmStatus::InvalidArgument);
    let s = unsafe { biharm_solve_greens(d, [2.0, 2.0].as_ptr(), 1, &mut sol) };
    assert_eq!(s, BiharmStatus::OutsideDomain);
    assert!(sol.is_null());
    unsafe { biharm_domain_free(d) };
    unsafe { biharm_domain_free(ptr::null_mut()) };
    unsafe { biharm_solution_free(ptr::null_mut()) };
}

#[test]
fn status_strings_and_truncated_messages() {
    let s = unsafe { CStr::from_ptr(biharm_status_str(BiharmStatus::OnBoundary)) };
    assert_eq!(s.to_str().unwrap(), "point on the boundary");
    let mut d = ptr::null_mut();
    unsafe { biharm_domain_new(1.0, 0.5, 0.1, 0, ptr::null(), ptr::null(), 0, 0, &mut d) };
    let full = unsafe { biharm_last_error(ptr::null_mut(), 0) };
    let mut buf = [1 as std::ffi::c_char; 4];
    assert_eq!(unsafe { biharm_last_error(buf.as_mut_ptr(), 4) }, full);
    assert_eq!(buf[3], 0);
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/biharm.h");
    let text = std::fs::read_to_string(header).unwrap();
    for f in ["biharm_domain_new", "biharm_solve_greens", "biharm_solution_eval", "BIHARM_STATUS_OK"] {
        assert!(text.contains(f), "{f}");
    }
    let Ok(out) = std::process::Command::new("cc").args(["-fsyntax-only", "-x", "c", header]).output() else {
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
