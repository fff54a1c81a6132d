//! Derivative-free polynomial functional equations P(z, F) = 0.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::dsl;
use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::modarith::{is_prime, Context};
use crate::phipoly::PhiPoly;

/// One monomial c · w^exp · F^deg (exp in w-units).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EqTerm {
    pub coeff: BigInt,
    pub exp: i64,
    pub deg: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionalEquation {
    pub name: String,
    pub p: u64,
    pub scale_d: u32,
    pub step_h: u32,
    pub terms: Vec<EqTerm>,
    /// Leading series coefficients F_0, F_1, … in z-units.
    pub initial: Vec<BigInt>,
}

/// On-disk / CLI form of an equation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EquationSpec {
    #[serde(default)]
    pub name: Option<String>,
    pub p: u64,
    pub polynomial: String,
    #[serde(default, rename = "scaleD")]
    pub scale_d: Option<u32>,
    #[serde(default, rename = "stepH")]
    pub step_h: Option<u32>,
    #[serde(default)]
    pub initial_terms: Vec<i64>,
    #[serde(default)]
    pub gamma_exponent_alpha: Option<u32>,
}

impl FunctionalEquation {
    /// Parse "F^3 + F^2 - 3*z*F + 2*z^2"; z is the original variable, so every
    /// z-exponent is multiplied by `scale_d` to get w-units.
    pub fn parse(name: &str, p: u64, text: &str, scale_d: u32, step_h: u32, initial: &[BigInt]) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::BadInput(format!("{p} is not prime")));
        }
        if scale_d == 0 || step_h == 0 {
            return Err(Error::BadInput("scaleD and stepH must be positive".into()));
        }
        let poly = dsl::expand(&dsl::parse(text, &["z", "F"])?);
        let terms: Vec<EqTerm> = poly
            .into_iter()
            .map(|((a, m), c)| EqTerm { coeff: c, exp: a as i64 * scale_d as i64, deg: m })
            .collect();
        if !terms.iter().any(|t| t.deg > 0) {
            return Err(Error::BadInput("equation does not involve F".into()));
        }
        Ok(FunctionalEquation {
            name: name.to_string(),
            p,
            scale_d,
            step_h,
            terms,
            initial: initial.to_vec(),
        })
    }

    pub fn from_spec(spec: &EquationSpec) -> Result<Self> {
        let init: Vec<BigInt> = spec.initial_terms.iter().map(|&x| BigInt::from(x)).collect();
        if init.is_empty() {
            return Err(Error::BadInput("initial_terms must list at least one coefficient".into()));
        }
        Self::parse(
            spec.name.as_deref().unwrap_or("custom"),
            spec.p,
            &spec.polynomial,
            spec.scale_d.unwrap_or(1),
            spec.step_h.unwrap_or(1),
            &init,
        )
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|t| t.deg).max().unwrap_or(0)
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.step_h)
    }

    /// The context mod p^gamma matching this equation's D and h.
    pub fn ctx(&self, gamma: u32) -> Result<Context> {
        Context::with_step(self.p, gamma, self.scale_d, self.step_h)
    }

    /// Coefficients of P grouped by F-degree, as Laurent polynomials in ctx.
    pub fn coeff_polys(&self, ctx: Context) -> Vec<LaurentPoly> {
        let mut out = vec![LaurentPoly::zero(ctx); self.degree() as usize + 1];
        for t in &self.terms {
            let m = LaurentPoly::monomial(ctx, t.exp, ctx.from_bigint(&t.coeff));
            out[t.deg as usize] = &out[t.deg as usize] + &m;
        }
        out
    }

    /// Coefficients of ∂P/∂F grouped by F-degree.
    pub fn derivative_polys(&self, ctx: Context) -> Vec<LaurentPoly> {
        let mut out = vec![LaurentPoly::zero(ctx); self.degree().max(1) as usize];
        for t in self.terms.iter().filter(|t| t.deg > 0) {
            let c = &t.coeff * BigInt::from(t.deg);
            let m = LaurentPoly::monomial(ctx, t.exp, ctx.from_bigint(&c));
            let i = t.deg as usize - 1;
            out[i] = &out[i] + &m;
        }
        out
    }

    /// P(F) for a PhiPoly F (unreduced, Horner in F).
    pub fn eval_phipoly(&self, f: &PhiPoly) -> PhiPoly {
        let ctx = *f.ctx();
        horner(&self.coeff_polys(ctx), f)
    }

    /// ∂P/∂F at F.
    pub fn eval_derivative(&self, f: &PhiPoly) -> PhiPoly {
        let ctx = *f.ctx();
        horner(&self.derivative_polys(ctx), f)
    }

    /// Human-readable polynomial in z and F.
    pub fn display(&self) -> String {
        let mut terms = self.terms.clone();
        terms.sort_by(|a, b| b.deg.cmp(&a.deg).then(b.exp.cmp(&a.exp)));
        let d = self.scale_d as i64;
        let mut s = String::new();
        for (i, t) in terms.iter().enumerate() {
            let neg = t.coeff.is_negative();
            let mag = t.coeff.abs();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mut factors = Vec::new();
            if !mag.to_u64().is_some_and(|x| x == 1) || (t.exp == 0 && t.deg == 0) {
                factors.push(mag.to_string());
            }
            if t.exp != 0 {
                let e = t.exp / d;
                factors.push(if e == 1 { "z".into() } else { format!("z^{e}") });
            }
            match t.deg {
                0 => {}
                1 => factors.push("F".into()),
                m => factors.push(format!("F^{m}")),
            }
            s.push_str(&factors.join("*"));
        }
        if s.is_empty() {
            s.push('0');
        }
        s
    }
}

fn horner(coeffs: &[LaurentPoly], f: &PhiPoly) -> PhiPoly {
    let mut acc = PhiPoly::zero(*f.ctx(), f.alpha);
    for c in coeffs.iter().rev() {
        acc = acc.mul(f).add(&PhiPoly::constant(c.clone(), f.alpha));
    }
    acc
}
