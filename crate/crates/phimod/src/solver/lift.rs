//! Verification of a mod-p base and lifting it one power of p at a time.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::equation::FunctionalEquation;
use super::linsolve::{diagonal_monomial, solve_with_det};
use super::series::series_solution;
use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::modarith::{checked_pow, Context};
use crate::phipoly::{relation_poly, PhiPoly, PhiPolyJson};

/// Per-step record of a lift.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepLog {
    pub beta: u32,
    pub rows: usize,
    pub cols: usize,
    /// det(M) mod p, pretty-printed.
    pub det: String,
    /// True when M was a scalar monomial multiple of the identity.
    pub diagonal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftReport {
    pub solution: PhiPoly,
    /// The solution satisfies the equation modulo p^reached_beta.
    pub reached_beta: u32,
    pub steps: Vec<StepLog>,
    pub failure: Option<String>,
    pub cert_order: i64,
    pub certified: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LiftReportJson {
    pub equation: String,
    pub p: u64,
    pub alpha: u32,
    pub reached_beta: u32,
    pub modulus: String,
    pub steps: Vec<StepLog>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    pub cert_order: i64,
    pub certified: bool,
    pub solution: PhiPolyJson,
}

impl LiftReport {
    pub fn to_json(&self, eq: &FunctionalEquation) -> LiftReportJson {
        LiftReportJson {
            equation: eq.name.clone(),
            p: eq.p,
            alpha: self.solution.alpha,
            reached_beta: self.reached_beta,
            modulus: num_traits::pow(BigInt::from(eq.p), self.reached_beta as usize).to_string(),
            steps: self.steps.clone(),
            failure: self.failure.clone(),
            cert_order: self.cert_order,
            certified: self.certified,
            solution: self.solution.to_json(),
        }
    }

    pub fn is_success(&self) -> bool {
        self.failure.is_none() && self.certified
    }
}

/// Horner evaluation with a reduction after every multiplication.
fn eval_reduced(coeffs: &[LaurentPoly], f: &PhiPoly, rel: &[LaurentPoly]) -> PhiPoly {
    let mut acc = PhiPoly::zero(*f.ctx(), f.alpha);
    for c in coeffs.iter().rev() {
        acc = acc.mul(f).add(&PhiPoly::constant(c.clone(), f.alpha)).rem_monic(rel);
    }
    acc
}

/// t^q − t + w over F_p: the minimal relation of Φ modulo p.
fn artin_schreier(ctx: Context) -> Vec<LaurentPoly> {
    let q = ctx.q() as usize;
    let mut v = vec![LaurentPoly::zero(ctx); q + 1];
    v[q] = LaurentPoly::one(ctx);
    v[1] = &v[1] - &LaurentPoly::one(ctx);
    v[0] = &v[0] + &LaurentPoly::monomial(ctx, 1, 1);
    v
}

/// P(base) ≡ 0 mod p exactly (reduction by the degree-q relation, whose
/// remainders are unique), and base reproduces the initial terms mod p.
pub fn verify_base(eq: &FunctionalEquation, base: &PhiPoly) -> bool {
    let Ok(ctx) = eq.ctx(1) else {
        return false;
    };
    if base.ctx().p != eq.p || base.ctx().scale_d != eq.scale_d || base.ctx().step_h != eq.step_h {
        return false;
    }
    let f = base.with_ctx(ctx);
    let rel = artin_schreier(ctx);
    if !eval_reduced(&eq.coeff_polys(ctx), &f.rem_monic(&rel), &rel).is_zero() {
        return false;
    }
    let d = eq.scale_d as i64;
    let order = eq.initial.len() as i64 * d;
    let s = f.to_series(order);
    let low_ok = (s.low()..0).all(|e| s.coeff(e) == 0);
    low_ok
        && eq
            .initial
            .iter()
            .enumerate()
            .all(|(n, c)| (0..d).all(|r| s.coeff(n as i64 * d + r) == if r == 0 { ctx.from_bigint(c) } else { 0 }))
}

fn qpow(q: u64, e: u32) -> Result<u64> {
    checked_pow(q, e).ok_or_else(|| Error::OutOfRange(format!("{q}^{e} overflows")))
}

/// One lifting step: `current` satisfies the equation mod p^beta (its
/// context has gamma ≥ beta); the result satisfies it mod p^{beta+1}.
pub fn lift(eq: &FunctionalEquation, current: &PhiPoly, beta: u32) -> Result<(PhiPoly, StepLog)> {
    let alpha = current.alpha;
    let qa = qpow(eq.q(), alpha)?;
    if beta == 0 || (beta as u64 + 1) > qa {
        return Err(Error::Precondition(format!(
            "lifting to p^{} needs beta+1 ≤ q^alpha = {qa}",
            beta + 1
        )));
    }
    let hi = eq.ctx(beta + 1)?;
    let low = eq.ctx(1)?;
    let rel_hi = relation_poly(hi, alpha)?;
    let rel_lo = relation_poly(low, alpha)?;
    let f = current.with_ctx(eq.ctx(beta)?).with_ctx(hi).rem_monic(&rel_hi);
    let pb = qpow(eq.p, beta)?;

    let residual = eval_reduced(&eq.coeff_polys(hi), &f, &rel_hi);
    let n = (qa * eq.q()) as usize;
    let mut r = Vec::with_capacity(n);
    for i in 0..n {
        let c = residual.coeff(i).div_exact(pb, low).ok_or_else(|| {
            Error::Precondition(format!("current solution does not satisfy the equation mod p^{beta}"))
        })?;
        r.push(c.neg_ref());
    }

    let fbar = f.with_ctx(low);
    let g = eval_reduced(&eq.derivative_polys(low), &fbar, &rel_lo);
    // columns: reduce(t^i · g)
    let mut m = vec![vec![LaurentPoly::zero(low); n]; n];
    let mut col = g.clone();
    let t = PhiPoly::phi(low, alpha);
    for i in 0..n {
        for (k, row) in m.iter_mut().enumerate() {
            row[i] = col.coeff(k);
        }
        if i + 1 < n {
            col = col.mul(&t).rem_monic(&rel_lo);
        }
    }

    let (b, det, diagonal) = if let Some(u) = diagonal_monomial(&m) {
        let (e, c) = u.terms()[0];
        let inv = low.inv(c).expect("nonzero mod p");
        let b: Vec<LaurentPoly> = r.iter().map(|ri| ri.shift(-e).scale(inv)).collect();
        (b, u.pow(n as u64), true)
    } else {
        match solve_with_det(low, &m, &r) {
            Ok((b, det)) => (b, det, false),
            Err(Error::Singular) => {
                return Err(Error::LiftFailed { beta, reason: "inconsistent or underdetermined system".into() })
            }
            Err(Error::NonLaurent) => return Err(Error::LiftFailed { beta, reason: "non-Laurent solution".into() }),
            Err(e) => return Err(e),
        }
    };

    let delta = PhiPoly::from_coeffs(hi, alpha, b.iter().map(|x| x.with_ctx(hi).scale(pb)).collect());
    let next = f.add(&delta);
    let check = eval_reduced(&eq.coeff_polys(hi), &next, &rel_hi);
    if !check.is_zero() {
        return Err(Error::LiftFailed { beta, reason: "residual not divisible by the next power of p".into() });
    }
    let log = StepLog { beta, rows: n, cols: n, det: det.display(true), diagonal };
    Ok((next, log))
}

/// Default certification order in w-units.
pub fn default_cert_order(eq: &FunctionalEquation, alpha: u32) -> i64 {
    if eq.step_h == 1 {
        (eq.p as i64).pow(alpha + 4)
    } else {
        (eq.q() as i64).pow(alpha + 1) * (eq.p as i64).pow(3)
    }
}

/// Lift a verified base to p^{q^alpha} and certify against the series recursion.
pub fn solve(eq: &FunctionalEquation, base: &PhiPoly, alpha: u32, cert_order: Option<i64>) -> Result<LiftReport> {
    if !verify_base(eq, base) {
        return Err(Error::Precondition("base does not solve the equation modulo p".into()));
    }
    let qa = qpow(eq.q(), alpha)?;
    let target = u32::try_from(qa).map_err(|_| Error::OutOfRange("q^alpha too large".into()))?;
    eq.ctx(target)?;
    let cert_order = cert_order.unwrap_or_else(|| default_cert_order(eq, alpha));
    let mut current = base.with_ctx(eq.ctx(1)?).with_alpha(alpha);
    let mut steps = Vec::new();
    let mut failure = None;
    let mut reached = 1;
    for beta in 1..target {
        match lift(eq, &current, beta) {
            Ok((next, log)) => {
                current = next;
                steps.push(log);
                reached = beta + 1;
            }
            Err(e @ Error::LiftFailed { .. }) => {
                failure = Some(e.to_string());
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let ctx = eq.ctx(reached)?;
    let series = series_solution(eq, cert_order, ctx)?;
    let ours = current.with_ctx(ctx).to_series(cert_order);
    let certified = match ours.first_difference(&series) {
        None => true,
        Some(e) => {
            if failure.is_none() {
                failure = Some(format!("certification mismatch at w^{e}"));
            }
            false
        }
    };
    Ok(LiftReport { solution: current.with_ctx(ctx), reached_beta: reached, steps, failure, cert_order, certified })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::frobenius_sum_w;

    fn nc() -> FunctionalEquation {
        FunctionalEquation::parse("nc", 3, "F^3 + F^2 - 3*z*F + 2*z^2", 1, 1, &[0.into(), 1.into()]).unwrap()
    }

    fn nc_base(alpha: u32) -> PhiPoly {
        let ctx = Context::new(3, 1, 1).unwrap();
        let s = frobenius_sum_w(ctx, alpha);
        let one = LaurentPoly::one(ctx);
        let qa = 3usize.pow(alpha);
        let mut c = vec![LaurentPoly::zero(ctx); 2 * qa + 1];
        c[0] = &(&s * &s) + &s;
        c[qa] = &one - &s;
        c[2 * qa] = one;
        PhiPoly::from_coeffs(ctx, alpha, c)
    }

    #[test]
    fn base_checks() {
        let eq = nc();
        assert!(verify_base(&eq, &nc_base(1)));
        assert!(verify_base(&eq, &nc_base(0)));
        assert!(!verify_base(&eq, &PhiPoly::zero(Context::new(3, 1, 1).unwrap(), 1)));
    }

    #[test]
    fn noncrossing_mod_27() {
        let eq = nc();
        let rep = solve(&eq, &nc_base(1), 1, Some(243)).unwrap();
        assert!(rep.is_success(), "{:?}", rep.failure);
        assert_eq!(rep.reached_beta, 3);
        assert_eq!(rep.solution.ctx().modulus(), 27);
        assert_eq!(rep.steps.len(), 2);
    }

    #[test]
    fn lift_rejects_non_solution() {
        let eq = nc();
        let ctx = Context::new(3, 1, 1).unwrap();
        let bogus = PhiPoly::phi(ctx, 1);
        assert!(matches!(lift(&eq, &bogus, 1), Err(Error::Precondition(_))));
    }
}
