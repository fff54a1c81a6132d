//! Polynomials in Φ with Laurent coefficients.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};
use crate::hseries::{normal_form_phi_power, HCombo};
use crate::laurent::{LaurentJson, LaurentPoly, TruncSeries};
use crate::modarith::{Context, Residue};

/// Σ a_i(w) Φ^i(w) with Φ(w) = Σ w^{q^n}, q = p^h.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiPoly {
    ctx: Context,
    pub alpha: u32,
    coeffs: Vec<LaurentPoly>,
}

impl PhiPoly {
    pub fn zero(ctx: Context, alpha: u32) -> Self {
        PhiPoly { ctx, alpha, coeffs: Vec::new() }
    }

    pub fn from_coeffs(ctx: Context, alpha: u32, coeffs: Vec<LaurentPoly>) -> Self {
        let mut p = PhiPoly { ctx, alpha, coeffs };
        p.trim();
        p
    }

    pub fn constant(a: LaurentPoly, alpha: u32) -> Self {
        Self::from_coeffs(*a.ctx(), alpha, vec![a])
    }

    /// a · Φ^i
    pub fn term(a: LaurentPoly, i: usize, alpha: u32) -> Self {
        let ctx = *a.ctx();
        let mut v = vec![LaurentPoly::zero(ctx); i];
        v.push(a);
        Self::from_coeffs(ctx, alpha, v)
    }

    pub fn phi(ctx: Context, alpha: u32) -> Self {
        Self::term(LaurentPoly::one(ctx), 1, alpha)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn ctx(&self) -> &Context {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[LaurentPoly] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> LaurentPoly {
        self.coeffs.get(i).cloned().unwrap_or_else(|| LaurentPoly::zero(self.ctx))
    }

    /// Degree in Φ; None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.ctx != other.ctx || self.alpha != other.alpha {
            return Err(Error::ContextMismatch(format!(
                "{:?}/α={} vs {:?}/α={}",
                self.ctx, self.alpha, other.ctx, other.alpha
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let v = (0..n).map(|i| &self.coeff(i) + &other.coeff(i)).collect();
        Ok(Self::from_coeffs(self.ctx, self.alpha, v))
    }

    pub fn add(&self, other: &Self) -> Self {
        self.try_add(other).expect("context mismatch")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self::from_coeffs(self.ctx, self.alpha, self.coeffs.iter().map(|c| c.neg_ref()).collect())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.ctx, self.alpha));
        }
        let mut v = vec![LaurentPoly::zero(self.ctx); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    v[i + j] = &v[i + j] + &(a * b);
                }
            }
        }
        Ok(Self::from_coeffs(self.ctx, self.alpha, v))
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.try_mul(other).expect("context mismatch")
    }

    pub fn mul_laurent(&self, a: &LaurentPoly) -> Self {
        Self::from_coeffs(self.ctx, self.alpha, self.coeffs.iter().map(|c| c * a).collect())
    }

    pub fn scale(&self, c: u64) -> Self {
        Self::from_coeffs(self.ctx, self.alpha, self.coeffs.iter().map(|x| x.scale(c)).collect())
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::constant(LaurentPoly::one(self.ctx), self.alpha);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Same polynomial, coefficients re-read in another context.
    pub fn with_ctx(&self, ctx: Context) -> Self {
        Self::from_coeffs(ctx, self.alpha, self.coeffs.iter().map(|c| c.with_ctx(ctx)).collect())
    }

    pub fn with_alpha(&self, alpha: u32) -> Self {
        PhiPoly { alpha, ..self.clone() }
    }

    /// Reduce the degree below q^{α+1} using R(t) = (t^q − t + w)^{q^α}, which
    /// annihilates Φ modulo p^{q^α}.
    pub fn reduce(&self) -> Result<Self> {
        let rel = relation_poly(self.ctx, self.alpha)?;
        Ok(self.rem_monic(&rel))
    }

    /// Remainder modulo an arbitrary monic polynomial in Φ.
    pub fn rem_monic(&self, rel: &[LaurentPoly]) -> Self {
        let n = rel.len() - 1;
        let mut c = self.coeffs.clone();
        let nonzero: Vec<(usize, &LaurentPoly)> =
            rel[..n].iter().enumerate().filter(|(_, x)| !x.is_zero()).collect();
        while c.len() > n {
            let top = c.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let shift = c.len() - n;
            for &(j, r) in &nonzero {
                c[shift + j] = &c[shift + j] - &(&top * r);
            }
        }
        Self::from_coeffs(self.ctx, self.alpha, c)
    }

    /// Σ a_i · NF(Φ^i).
    pub fn to_hcombo(&self) -> HCombo {
        let mut out = HCombo::zero(self.ctx);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            out = out.add(&normal_form_phi_power(self.ctx, i as u64).mul_laurent(a));
        }
        out
    }

    pub fn to_series(&self, order: i64) -> TruncSeries {
        let lo = self.coeffs.iter().filter_map(|c| c.min_exp()).min().unwrap_or(0).min(0);
        let inner = order - lo;
        let phi = phi_series(self.ctx, inner);
        let mut power = LaurentPoly::one(self.ctx).to_series(inner);
        let mut out = TruncSeries::zero(self.ctx, order);
        for (i, a) in self.coeffs.iter().enumerate() {
            if i > 0 {
                power = power.mul(&phi);
            }
            if !a.is_zero() {
                out = out.add(&power.mul_laurent(a).truncate(order));
            }
        }
        out
    }

    /// Coefficient of z^n.
    pub fn extract_coefficient(&self, n: &BigInt) -> Result<Residue> {
        self.to_hcombo().coeff_at_z(n)
    }

    pub fn to_json(&self) -> PhiPolyJson {
        PhiPolyJson {
            p: Some(self.ctx.p),
            gamma: Some(self.ctx.gamma),
            step_h: Some(self.ctx.step_h),
            alpha: self.alpha,
            coeffs: self.coeffs.iter().map(|c| c.to_json()).collect(),
        }
    }

    /// Read a PhiPoly file. Missing p/gamma fall back to the given defaults.
    pub fn from_json(j: &PhiPolyJson, p: Option<u64>, gamma: Option<u32>) -> Result<Self> {
        let p = j.p.or(p).ok_or_else(|| Error::BadInput("PhiPoly JSON lacks p".into()))?;
        let gamma = j.gamma.or(gamma).ok_or_else(|| Error::BadInput("PhiPoly JSON lacks gamma".into()))?;
        let scale = j.coeffs.first().map(|c| c.scale_d).unwrap_or(1);
        let ctx = Context::with_step(p, gamma, scale, j.step_h.unwrap_or(1))?;
        let coeffs = j.coeffs.iter().map(|c| LaurentPoly::from_json(ctx, c)).collect::<Result<Vec<_>>>()?;
        Ok(Self::from_coeffs(ctx, j.alpha, coeffs))
    }

    /// Display in the style "18 z^3+z^2+z + (18 z^3+12 z^2) Φ(z) + … + 12 Φ^8(z)".
    pub fn display(&self, signed: bool) -> String {
        let arg = if self.ctx.scale_d > 1 { format!("(z^(1/{}))", self.ctx.scale_d) } else { "(z)".to_string() };
        let mut pieces = Vec::new();
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let phi = match i {
                0 => String::new(),
                1 => format!("Φ{arg}"),
                _ => format!("Φ^{i}{arg}"),
            };
            let c = a.display(signed);
            let piece = if i == 0 {
                c
            } else if c == "1" {
                phi
            } else if c == "-1" {
                format!("-{phi}")
            } else if a.len() == 1 {
                format!("{c} {phi}")
            } else {
                format!("({c}) {phi}")
            };
            pieces.push(piece);
        }
        let mut out = String::new();
        for (i, piece) in pieces.iter().enumerate() {
            match (i, piece.strip_prefix('-')) {
                (0, _) => out.push_str(piece),
                (_, Some(rest)) => {
                    out.push_str(" - ");
                    out.push_str(rest);
                }
                (_, None) => {
                    out.push_str(" + ");
                    out.push_str(piece);
                }
            }
        }
        if out.is_empty() {
            "0".into()
        } else {
            out
        }
    }
}

impl fmt::Display for PhiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display(false))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiPolyJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<u32>,
    #[serde(default, rename = "stepH", skip_serializing_if = "Option::is_none")]
    pub step_h: Option<u32>,
    pub alpha: u32,
    pub coeffs: Vec<LaurentJson>,
}

/// Coefficients (low to high) of R(t) = (t^q − t + w)^{q^α} mod p^γ.
/// Requires γ ≤ q^α, the modulus up to which R(Φ) vanishes.
pub fn relation_poly(ctx: Context, alpha: u32) -> Result<Vec<LaurentPoly>> {
    let q = ctx.q();
    let qa = q.checked_pow(alpha).ok_or_else(|| Error::OutOfRange("q^alpha overflows".into()))?;
    if ctx.gamma as u64 > qa {
        return Err(Error::RelationModulus { gamma: ctx.gamma, alpha });
    }
    let deg = (qa * q) as usize;
    let mut v = vec![LaurentPoly::zero(ctx); deg + 1];
    if ctx.gamma == 1 {
        v[deg] = LaurentPoly::one(ctx);
        v[qa as usize] = LaurentPoly::constant(ctx, ctx.neg(1));
        v[0] = LaurentPoly::monomial(ctx, qa as i64, 1);
        return Ok(v);
    }
    let mut g = vec![LaurentPoly::zero(ctx); q as usize + 1];
    g[q as usize] = LaurentPoly::one(ctx);
    g[1] = LaurentPoly::constant(ctx, ctx.neg(1));
    g[0] = LaurentPoly::monomial(ctx, 1, 1);
    let base = PhiPoly::from_coeffs(ctx, alpha, g);
    let r = base.pow(qa);
    for (i, c) in r.coeffs.into_iter().enumerate() {
        v[i] = c;
    }
    Ok(v)
}

/// Φ(w) = Σ_n w^{q^n} truncated at `order`.
pub fn phi_series(ctx: Context, order: i64) -> TruncSeries {
    let q = ctx.q() as i64;
    let mut terms = Vec::new();
    let mut e = 1i64;
    while e < order {
        terms.push((e, 1));
        match e.checked_mul(q) {
            Some(x) => e = x,
            None => break,
        }
    }
    TruncSeries::from_sparse(ctx, order, terms)
}

/// Φ'(w) = Σ_{n≤β} p^n w^{p^n − 1} modulo p^{β+1}.
pub fn phi_derivative_series(ctx: Context, beta: u32, order: i64) -> Result<TruncSeries> {
    let c = ctx.with_gamma(beta + 1)?;
    let p = ctx.p as i64;
    let terms = (0..=beta).map(|n| (p.pow(n) - 1, c.pow(ctx.p, n as u64)));
    Ok(TruncSeries::from_sparse(c, order, terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64, g: u32, d: u32) -> Context {
        Context::new(p, g, d).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        let c = ctx(3, 2, 1);
        let phi = PhiPoly::phi(c, 1);
        assert_eq!(phi.mul(&phi).coeffs().len(), 3);
        let z = PhiPoly::constant(LaurentPoly::monomial(c, 1, 1), 1);
        let prod = phi.add(&z).mul(&phi.sub(&z));
        let want = phi.mul(&phi).sub(&z.mul(&z));
        assert_eq!(prod, want);
        let c1 = ctx(3, 1, 1);
        assert_eq!(PhiPoly::phi(c1, 0).pow(3), PhiPoly::term(LaurentPoly::one(c1), 3, 0));
    }

    #[test]
    fn reduce_examples() {
        let c = ctx(3, 1, 1);
        let r = PhiPoly::term(LaurentPoly::one(c), 3, 0).reduce().unwrap();
        let want = PhiPoly::phi(c, 0).sub(&PhiPoly::constant(LaurentPoly::monomial(c, 1, 1), 0));
        assert_eq!(r, want);
        let small = PhiPoly::term(LaurentPoly::monomial(c, 2, 1), 2, 0);
        assert_eq!(small.reduce().unwrap(), small);
        let c27 = ctx(3, 3, 1);
        let nine = PhiPoly::term(LaurentPoly::one(c27), 9, 1);
        let r = nine.reduce().unwrap();
        assert!(r.degree().unwrap() < 9);
        assert_eq!(r.coeff(7), LaurentPoly::constant(c27, 3));
        assert_eq!(r.coeff(6), LaurentPoly::monomial(c27, 1, 24));
        let t = 729;
        assert!(r.to_series(t).agrees_with(&nine.to_series(t)));
        assert!(matches!(nine.with_alpha(0).reduce(), Err(Error::RelationModulus { .. })));
    }

    #[test]
    fn series_examples() {
        let c = ctx(3, 3, 1);
        assert_eq!(PhiPoly::phi(c, 1).to_series(27).nonzero(), vec![(1, 1), (3, 1), (9, 1)]);
        assert_eq!(PhiPoly::phi(c, 1).to_series(28).nonzero(), vec![(1, 1), (3, 1), (9, 1), (27, 1)]);
        let a0 = LaurentPoly::from_signed(c, [(-1, 2), (4, 1)]);
        let s = PhiPoly::constant(a0.clone(), 0).to_series(10);
        assert!(s.agrees_with(&a0.to_series(10)));
    }

    #[test]
    fn derivative_series() {
        let c = ctx(3, 3, 1);
        let d = phi_derivative_series(c, 0, 20).unwrap();
        assert_eq!(d.nonzero(), vec![(0, 1)]);
        let d = phi_derivative_series(c, 1, 10).unwrap();
        assert_eq!(d.nonzero(), vec![(0, 1), (2, 3)]);
        let direct = PhiPoly::phi(c.with_gamma(2).unwrap(), 0).to_series(30).derivative();
        assert!(direct.agrees_with(&phi_derivative_series(c, 1, 29).unwrap()));
    }

    #[test]
    fn extraction_round_trip() {
        let c = ctx(3, 3, 1);
        let a = PhiPoly::from_coeffs(
            c,
            1,
            vec![
                LaurentPoly::from_signed(c, [(1, 1), (2, 5)]),
                LaurentPoly::from_signed(c, [(0, 7)]),
                LaurentPoly::from_signed(c, [(1, 2)]),
                LaurentPoly::from_signed(c, [(0, 4), (2, 1)]),
            ],
        );
        let s = a.to_series(200);
        let h = a.to_hcombo();
        for n in 0..200 {
            assert_eq!(h.coeff_at_z(&BigInt::from(n)).unwrap().value, s.coeff(n), "n={n}");
        }
    }

    #[test]
    fn json_round_trip() {
        let c = ctx(5, 2, 4);
        let a = PhiPoly::term(LaurentPoly::monomial(c, -1, 1), 5, 1);
        let j = serde_json::to_string(&a.to_json()).unwrap();
        let back = PhiPoly::from_json(&serde_json::from_str(&j).unwrap(), None, None).unwrap();
        assert_eq!(back, a);
        assert_eq!(a.display(false), "z^(-1/4) Φ^5(z^(1/4))");
    }
}
