//! C ABI over `phimod`.
//!
//! Every function returns a [`PhimodStatus`]; results come back through out
//! pointers. Objects are opaque handles released with their `_free`
//! function, strings with [`phimod_string_free`]. On failure the message is
//! kept per thread and read with [`phimod_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_bigint::BigInt;
use phimod::applications::{builtin, classify, verify_against_oracle, BuiltinParams};
use phimod::hseries::{expand_phi_power, normal_form_phi_power, EXPAND_CAP};
use phimod::minpoly::{degree_lower_bound, vanishing_report, Tree};
use phimod::phipoly::PhiPolyJson;
use phimod::solver::{find_base, solve};
use phimod::{Context, Error, FunctionalEquation, HCombo, PhiPoly};

/// Status codes; the first four match the CLI exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhimodStatus {
    Ok = 0,
    Mismatch = 1,
    LiftFailed = 2,
    BadInput = 3,
    NullPointer = 4,
    Internal = 5,
}

/// A solved generating function: polynomial in Φ over Laurent polynomials mod p^γ.
pub struct PhimodSolution(PhiPoly);

/// A combination of H-series with Laurent polynomial coefficients.
pub struct PhimodHCombo(HCombo);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

enum Fail {
    Lib(Error),
    Status(PhimodStatus, String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

type FfiResult<T> = std::result::Result<T, Fail>;

fn guard(f: impl FnOnce() -> FfiResult<PhimodStatus>) -> PhimodStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            s
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            if e.exit_code() == 2 {
                PhimodStatus::LiftFailed
            } else {
                PhimodStatus::BadInput
            }
        }
        Ok(Err(Fail::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "internal error".into());
            set_error(msg);
            PhimodStatus::Internal
        }
    }
}

fn null(what: &str) -> Fail {
    Fail::Status(PhimodStatus::NullPointer, format!("{what} is null"))
}

unsafe fn c_str<'a>(s: *const c_char, what: &str) -> FfiResult<&'a str> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Fail::Lib(Error::BadInput(format!("{what} is not UTF-8"))))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> FfiResult<&'a mut T> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> FfiResult<&'a T> {
    p.as_ref().ok_or_else(|| null(what))
}

fn big(s: &str) -> FfiResult<BigInt> {
    s.trim().parse().map_err(|_| Fail::Lib(Error::BadInput(format!("not an integer: {s}"))))
}

fn give_string(s: String, out: &mut *mut c_char) -> FfiResult<PhimodStatus> {
    *out = CString::new(s).map_err(|_| Fail::Status(PhimodStatus::Internal, "interior NUL".into()))?.into_raw();
    Ok(PhimodStatus::Ok)
}

fn params(p: u64, k: u64) -> BuiltinParams {
    BuiltinParams { p: (p != 0).then_some(p), h: None, k: (k != 0).then_some(k) }
}

/// Bytes needed for the last error message including the NUL; 0 when none.
#[no_mangle]
pub extern "C" fn phimod_last_error_length() -> usize {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(0, |s| s.as_bytes_with_nul().len()))
}

/// Copy the last error message into `buf` (truncated, always NUL-terminated).
/// Returns the number of bytes written excluding the NUL.
///
/// # Safety
/// `buf` must be valid for `len` bytes or null.
#[no_mangle]
pub unsafe extern "C" fn phimod_last_error_message(buf: *mut c_char, len: usize) -> usize {
    if buf.is_null() || len == 0 {
        return 0;
    }
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let bytes = e.as_ref().map_or(&[][..], |s| s.as_bytes());
        let n = bytes.len().min(len - 1);
        ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
        *buf.add(n) = 0;
        n
    })
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn phimod_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Solve a built-in equation (noncrossing, kreweras, fusscatalan, blossom,
/// gessel_f1 … gessel_f5) modulo p^(p^alpha). `p = 0` and `k = 0` select defaults.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn phimod_solve_builtin(
    name: *const c_char,
    p: u64,
    k: u64,
    alpha: u32,
    out: *mut *mut PhimodSolution,
) -> PhimodStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let name = c_str(name, "name")?;
        let b = builtin(name, params(p, k))?;
        let base = b.base(alpha).or_else(|| find_base(&b.equation, alpha, None)).ok_or_else(|| Error::LiftFailed {
            beta: 1,
            reason: "no base solution".into(),
        })?;
        finish_solve(&b.equation, &base, alpha, out)
    })
}

/// Solve P(z, F) = 0 given as text in z and F, with the listed initial terms.
///
/// # Safety
/// `poly` must be NUL-terminated; `initial` valid for `n_initial` values; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn phimod_solve_equation(
    poly: *const c_char,
    p: u64,
    scale_d: u32,
    step_h: u32,
    initial: *const i64,
    n_initial: usize,
    alpha: u32,
    out: *mut *mut PhimodSolution,
) -> PhimodStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let text = c_str(poly, "poly")?;
        let init: Vec<BigInt> = if n_initial == 0 {
            Vec::new()
        } else if initial.is_null() {
            return Err(null("initial"));
        } else {
            std::slice::from_raw_parts(initial, n_initial).iter().map(|&x| BigInt::from(x)).collect()
        };
        let eq = FunctionalEquation::parse("equation", p, text, scale_d, step_h, &init)?;
        let base = find_base(&eq, alpha, None)
            .ok_or_else(|| Error::LiftFailed { beta: 1, reason: "no solution modulo p in the search window".into() })?;
        finish_solve(&eq, &base, alpha, out)
    })
}

fn finish_solve(
    eq: &FunctionalEquation,
    base: &PhiPoly,
    alpha: u32,
    out: &mut *mut PhimodSolution,
) -> FfiResult<PhimodStatus> {
    let rep = solve(eq, base, alpha, None)?;
    if let Some(f) = rep.failure {
        return Err(Fail::Lib(Error::LiftFailed { beta: rep.reached_beta + 1, reason: f }));
    }
    if !rep.certified {
        return Err(Fail::Lib(Error::LiftFailed { beta: rep.reached_beta, reason: "not certified".into() }));
    }
    *out = Box::into_raw(Box::new(PhimodSolution(rep.solution)));
    Ok(PhimodStatus::Ok)
}

/// Read a solution from its JSON form.
///
/// # Safety
/// `json` must be NUL-terminated; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn phimod_solution_from_json(json: *const c_char, out: *mut *mut PhimodSolution) -> PhimodStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let j: PhiPolyJson = serde_json::from_str(c_str(json, "json")?)
            .map_err(|e| Fail::Lib(Error::BadInput(format!("solution JSON: {e}"))))?;
        *out = Box::into_raw(Box::new(PhimodSolution(PhiPoly::from_json(&j, None, None)?)));
        Ok(PhimodStatus::Ok)
    })
}

/// JSON form of a solution; free with `phimod_string_free`.
///
/// # Safety
/// `sol` must be a live handle; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn phimod_solution_to_json(sol: *const PhimodSolution, out: *mut *mut c_char) -> PhimodStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let s = handle(sol, "solution")?;
        give_string(serde_json::to_string(&s.0.to_json()).expect("plain data"), out)
    })
}

/// Human-readable form "a_0 + a_1 Φ(z) + …"; free with `phimod_string_free`.
///
/// # Safety
/// `sol` must be a live handle; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn phimod_solution_to_string(sol: *const PhimodSolution, out: *mut *mut c_char) -> PhimodStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        give_string(handle(sol, "solution")?.0.display(false), out)
    })
}

/// The modulus p^γ the solution is known to.
///
/// # Safety
/// `sol` must be a live handle; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn phimod_solution_modulus(sol: *const PhimodSolution, out: *mut u64) -> PhimodStatus {
    guard(|| {
        *out_ptr(out, "out")? = handle(sol, "solution")?.0.ctx().modulus();
        Ok(PhimodStatus::Ok)
    })
}

/// Coefficient of z^n (n in decimal, any size), reduced modulo `modulus`
/// (0 = the solution's modulus).
///
/// # Safety
/// `sol` must be a live handle; `n` NUL-terminated; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn phimod_solution_coeff(
    sol: *const PhimodSolution,
    n: *const c_char,
    modulus: u64,
    out: *mut u64,
) -> PhimodStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let s = handle(sol, "solution")?;
        let mut r = s.0.extract_coefficient(&big(c_str(n, "n")?)?)?;
        if modulus != 0 {
            r = r.reduce_to(modulus)?;
        }
        *out = r.value;
        Ok(PhimodStatus::Ok)
    })
}

/// Residues of the coefficients of z^0 … z^{len−1} modulo `modulus` into `buf`.
///
/// # Safety
/// `sol` must be a live handle; `buf` valid for `len` values.
#[no_mangle]
pub unsafe extern "C" fn phimod_solution_classify(
    sol: *const PhimodSolution,
    modulus: u64,
    buf: *mut u64,
    len: usize,
) -> PhimodStatus {
    guard(|| {
        let s = handle(sol, "solution")?;
        if len == 0 {
            return Ok(PhimodStatus::Ok);
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        let m = if modulus == 0 { s.0.ctx().modulus() } else { modulus };
        let t = classify(&s.0, len as u64 - 1, m)?;
        std::slice::from_raw_parts_mut(buf, len).copy_from_slice(&t.residues);
        Ok(PhimodStatus::Ok)
    })
}

/// Compare with the exact values of a built-in sequence for n ≤ n_max.
/// Returns Mismatch and sets `first_bad` to the first differing n when they disagree.
///
/// # Safety
/// `sol` must be a live handle; `name` NUL-terminated; `first_bad` valid or null.
#[no_mangle]
pub unsafe extern "C" fn phimod_solution_verify(
    sol: *const PhimodSolution,
    name: *const c_char,
    p: u64,
    k: u64,
    n_max: u64,
    modulus: u64,
    first_bad: *mut u64,
) -> PhimodStatus {
    guard(|| {
        let s = handle(sol, "solution")?;
        let oracle = builtin(c_str(name, "name")?, params(p, k))?.oracle();
        let m = if modulus == 0 { s.0.ctx().modulus() } else { modulus };
        let chk = verify_against_oracle(&s.0, &oracle, n_max, m)?;
        match chk.first_mismatch {
            None => Ok(PhimodStatus::Ok),
            Some(mm) => {
                if let Some(fb) = first_bad.as_mut() {
                    *fb = mm.n;
                }
                Err(Fail::Status(
                    PhimodStatus::Mismatch,
                    format!("n={}: got {} expected {}", mm.n, mm.got, mm.expected),
                ))
            }
        }
    })
}

/// Release a solution.
///
/// # Safety
/// `sol` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn phimod_solution_free(sol: *mut PhimodSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// Φ^K modulo p^γ in the reduced H-basis.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn phimod_expand_phi(p: u64, gamma: u32, k: u64, out: *mut *mut PhimodHCombo) -> PhimodStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let ctx = Context::new(p, gamma, 1)?;
        let c = if k <= EXPAND_CAP { expand_phi_power(ctx, k)?.reduce() } else { normal_form_phi_power(ctx, k) };
        *out = Box::into_raw(Box::new(PhimodHCombo(c)));
        Ok(PhimodStatus::Ok)
    })
}

/// Coefficient of z^n.
///
/// # Safety
/// `h` must be a live handle; `n` NUL-terminated; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn phimod_hcombo_coeff(h: *const PhimodHCombo, n: *const c_char, out: *mut u64) -> PhimodStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = handle(h, "hcombo")?.0.coeff_at_z(&big(c_str(n, "n")?)?)?.value;
        Ok(PhimodStatus::Ok)
    })
}

/// Number of H-terms (the free part not counted).
///
/// # Safety
/// `h` must be a live handle; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn phimod_hcombo_num_terms(h: *const PhimodHCombo, out: *mut usize) -> PhimodStatus {
    guard(|| {
        *out_ptr(out, "out")? = handle(h, "hcombo")?.0.num_terms();
        Ok(PhimodStatus::Ok)
    })
}

/// Text form such as "2 H_{1,1} + H_2"; free with `phimod_string_free`.
///
/// # Safety
/// `h` must be a live handle; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn phimod_hcombo_to_string(h: *const PhimodHCombo, out: *mut *mut c_char) -> PhimodStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        give_string(handle(h, "hcombo")?.0.display(false), out)
    })
}

/// Release an H-combination.
///
/// # Safety
/// `h` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn phimod_hcombo_free(h: *mut PhimodHCombo) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Whether A(z, Φ(z)) ≡ 0 mod p^γ, decided exactly; `degree` receives deg_t A.
///
/// # Safety
/// `poly` NUL-terminated; `vanishes` valid; `degree` valid or null.
#[no_mangle]
pub unsafe extern "C" fn phimod_minpoly_verify(
    poly: *const c_char,
    p: u64,
    gamma: u32,
    vanishes: *mut bool,
    degree: *mut u32,
) -> PhimodStatus {
    guard(|| {
        let v = out_ptr(vanishes, "vanishes")?;
        let rep = vanishing_report(&Tree::parse(c_str(poly, "poly")?)?, p, gamma)?;
        *v = rep.vanishes;
        if let Some(d) = degree.as_mut() {
            *d = rep.degree;
        }
        Ok(PhimodStatus::Ok)
    })
}

/// Least d with v_p(d!) ≥ γ.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn phimod_degree_lower_bound(p: u64, gamma: u32, out: *mut u64) -> PhimodStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        Context::new(p, 1, 1)?;
        if gamma == 0 {
            return Err(Fail::Lib(Error::BadInput("gamma must be positive".into())));
        }
        *out = degree_lower_bound(p, gamma);
        Ok(PhimodStatus::Ok)
    })
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn phimod_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
