use std::ffi::{c_char, CStr, CString};
use std::ptr;

use phimod_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let mut buf = vec![0 as c_char; phimod_last_error_length().max(1)];
    unsafe { phimod_last_error_message(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_string_lossy().into_owned();
    phimod_string_free(s);
    out
}

#[test]
fn phi_power_coefficients() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(phimod_expand_phi(3, 1, 2, &mut h), PhimodStatus::Ok);
        let mut s = ptr::null_mut();
        assert_eq!(phimod_hcombo_to_string(h, &mut s), PhimodStatus::Ok);
        assert_eq!(take(s), "2 H_{1,1} + H_2");
        let mut n = 0;
        assert_eq!(phimod_hcombo_num_terms(h, &mut n), PhimodStatus::Ok);
        assert_eq!(n, 2);
        phimod_hcombo_free(h);

        let mut h = ptr::null_mut();
        assert_eq!(phimod_expand_phi(3, 3, 5, &mut h), PhimodStatus::Ok);
        let mut v = 0;
        assert_eq!(phimod_hcombo_coeff(h, c("297398301914493").as_ptr(), &mut v), PhimodStatus::Ok);
        assert_eq!(v, 3);
        assert_eq!(phimod_hcombo_coeff(h, c("ten").as_ptr(), &mut v), PhimodStatus::BadInput);
        assert!(last_error().contains("ten"));
        phimod_hcombo_free(h);
    }
}

#[test]
fn solve_extract_verify() {
    unsafe {
        let mut sol = ptr::null_mut();
        assert_eq!(phimod_solve_builtin(c("noncrossing").as_ptr(), 0, 0, 1, &mut sol), PhimodStatus::Ok);
        let mut m = 0;
        assert_eq!(phimod_solution_modulus(sol, &mut m), PhimodStatus::Ok);
        assert_eq!(m, 27);
        let mut v = 0;
        assert_eq!(phimod_solution_coeff(sol, c("10").as_ptr(), 0, &mut v), PhimodStatus::Ok);
        assert_eq!(v, 20);
        assert_eq!(phimod_solution_coeff(sol, c("10").as_ptr(), 9, &mut v), PhimodStatus::Ok);
        assert_eq!(v, 2);
        let mut bad = u64::MAX;
        assert_eq!(
            phimod_solution_verify(sol, c("noncrossing").as_ptr(), 0, 0, 500, 0, &mut bad),
            PhimodStatus::Ok
        );
        assert_eq!(bad, u64::MAX);
        // checking against a different sequence reports where they part
        assert_eq!(
            phimod_solution_verify(sol, c("kreweras").as_ptr(), 0, 0, 500, 0, &mut bad),
            PhimodStatus::Mismatch
        );
        assert!(bad <= 500 && last_error().starts_with(&format!("n={bad}")));

        let mut json = ptr::null_mut();
        assert_eq!(phimod_solution_to_json(sol, &mut json), PhimodStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(phimod_solution_from_json(json, &mut back), PhimodStatus::Ok);
        phimod_string_free(json);
        let mut r1 = [0u64; 300];
        let mut r2 = [0u64; 300];
        phimod_solution_classify(sol, 0, r1.as_mut_ptr(), 300);
        phimod_solution_classify(back, 0, r2.as_mut_ptr(), 300);
        assert_eq!(r1, r2);
        let mut s = ptr::null_mut();
        assert_eq!(phimod_solution_to_string(back, &mut s), PhimodStatus::Ok);
        assert!(take(s).contains("Φ"));
        phimod_solution_free(back);
        phimod_solution_free(sol);
    }
}

#[test]
fn custom_equation() {
    unsafe {
        // ternary trees: F = 1 + z F^3
        let mut sol = ptr::null_mut();
        let init = [1i64];
        let st = phimod_solve_equation(c("z*F^3 - F + 1").as_ptr(), 3, 2, 1, init.as_ptr(), 1, 1, &mut sol);
        assert_eq!(st, PhimodStatus::Ok, "{}", last_error());
        let mut got = [0u64; 8];
        phimod_solution_classify(sol, 27, got.as_mut_ptr(), 8);
        let want = [1u64, 1, 3, 12, 55, 273, 1428, 7752].map(|x| x % 27);
        assert_eq!(got, want);
        phimod_solution_free(sol);
    }
}

#[test]
fn lift_failure_and_errors() {
    unsafe {
        let mut sol = ptr::null_mut();
        assert_eq!(phimod_solve_builtin(c("gessel_f1").as_ptr(), 0, 0, 1, &mut sol), PhimodStatus::LiftFailed);
        assert!(sol.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(phimod_solve_builtin(c("nope").as_ptr(), 0, 0, 1, &mut sol), PhimodStatus::BadInput);
        assert_eq!(phimod_solve_builtin(ptr::null(), 0, 0, 1, &mut sol), PhimodStatus::NullPointer);
        assert_eq!(phimod_solve_builtin(c("kreweras").as_ptr(), 0, 0, 1, ptr::null_mut()), PhimodStatus::NullPointer);
        let mut v = 0;
        assert_eq!(phimod_solution_coeff(ptr::null(), c("1").as_ptr(), 0, &mut v), PhimodStatus::NullPointer);
        assert_eq!(phimod_expand_phi(4, 1, 2, &mut ptr::null_mut()), PhimodStatus::BadInput);
        // success clears the message
        let mut b = 0;
        assert_eq!(phimod_degree_lower_bound(3, 4, &mut b), PhimodStatus::Ok);
        assert_eq!(phimod_last_error_length(), 0);
        phimod_solution_free(ptr::null_mut());
        phimod_hcombo_free(ptr::null_mut());
        phimod_string_free(ptr::null_mut());
    }
}

#[test]
fn minpoly_and_bound() {
    unsafe {
        let mut vanishes = true;
        let mut deg = 0;
        let printed = c("(t^3-t+z)^3 - 9*(t^2-t+z)");
        assert_eq!(phimod_minpoly_verify(printed.as_ptr(), 3, 4, &mut vanishes, &mut deg), PhimodStatus::Ok);
        assert_eq!((vanishes, deg), (false, 9));
        let found = c("(t^3 - t + z)^3 + 27*(z*t^2 - z^2*t) - 9*(t^3 - t + z)");
        assert_eq!(phimod_minpoly_verify(found.as_ptr(), 3, 4, &mut vanishes, ptr::null_mut()), PhimodStatus::Ok);
        assert!(vanishes);
        assert_eq!(phimod_minpoly_verify(c("t^").as_ptr(), 3, 4, &mut vanishes, &mut deg), PhimodStatus::BadInput);
        let mut b = 0;
        for (p, g, want) in [(2, 1, 2), (3, 4, 9), (5, 6, 25), (3, 13, 27)] {
            assert_eq!(phimod_degree_lower_bound(p, g, &mut b), PhimodStatus::Ok);
            assert_eq!(b, want, "p={p} γ={g}");
        }
        assert_eq!(phimod_degree_lower_bound(3, 0, &mut b), PhimodStatus::BadInput);
        assert!(!CStr::from_ptr(phimod_version()).to_bytes().is_empty());
    }
}
