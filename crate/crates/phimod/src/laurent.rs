//! Sparse Laurent polynomials over Z/p^γ in w = z^{1/D}, and truncated series.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::modarith::Context;

/// Canonical sparse Laurent polynomial: terms sorted by exponent, no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    ctx: Context,
    terms: Vec<(i64, u64)>,
}

impl LaurentPoly {
    pub fn zero(ctx: Context) -> Self {
        LaurentPoly { ctx, terms: Vec::new() }
    }

    pub fn constant(ctx: Context, c: u64) -> Self {
        Self::monomial(ctx, 0, c)
    }

    pub fn one(ctx: Context) -> Self {
        Self::constant(ctx, 1)
    }

    pub fn monomial(ctx: Context, e: i64, c: u64) -> Self {
        let c = c % ctx.modulus();
        if c == 0 {
            Self::zero(ctx)
        } else {
            LaurentPoly { ctx, terms: vec![(e, c)] }
        }
    }

    /// Build from arbitrary (exponent, coefficient) pairs; duplicates are summed.
    pub fn from_terms(ctx: Context, terms: impl IntoIterator<Item = (i64, u64)>) -> Self {
        let mut v: Vec<(i64, u64)> = terms.into_iter().map(|(e, c)| (e, c % ctx.modulus())).collect();
        v.sort_unstable_by_key(|t| t.0);
        Self::canonical(ctx, v)
    }

    pub fn from_signed(ctx: Context, terms: impl IntoIterator<Item = (i64, i64)>) -> Self {
        Self::from_terms(ctx, terms.into_iter().map(|(e, c)| (e, ctx.from_i64(c))))
    }

    fn canonical(ctx: Context, sorted: Vec<(i64, u64)>) -> Self {
        let mut out: Vec<(i64, u64)> = Vec::with_capacity(sorted.len());
        for (e, c) in sorted {
            match out.last_mut() {
                Some(last) if last.0 == e => last.1 = ctx.add(last.1, c),
                _ => out.push((e, c)),
            }
        }
        out.retain(|t| t.1 != 0);
        LaurentPoly { ctx, terms: out }
    }

    pub fn ctx(&self) -> &Context {
        &self.ctx
    }

    pub fn terms(&self) -> &[(i64, u64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: i64) -> u64 {
        match self.terms.binary_search_by_key(&e, |t| t.0) {
            Ok(i) => self.terms[i].1,
            Err(_) => 0,
        }
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.first().map(|t| t.0)
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.last().map(|t| t.0)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.ctx != other.ctx {
            return Err(Error::ContextMismatch(format!("{:?} vs {:?}", self.ctx, other.ctx)));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut v = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                v.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                v.push(b[j]);
                j += 1;
            } else {
                let c = self.ctx.add(a[i].1, b[j].1);
                if c != 0 {
                    v.push((a[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
        Ok(LaurentPoly { ctx: self.ctx, terms: v })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.ctx));
        }
        let ctx = self.ctx;
        let lo = self.terms[0].0 + other.terms[0].0;
        let hi = self.max_exp().unwrap() + other.max_exp().unwrap();
        let span = (hi - lo + 1) as usize;
        let work = self.terms.len() * other.terms.len();
        if span <= 4 * work + 64 {
            let m = ctx.modulus() as u128;
            let mut acc = vec![0u128; span];
            // accumulate lazily, reducing before overflow
            let limit = u128::MAX - m * m;
            for &(ea, ca) in &self.terms {
                for &(eb, cb) in &other.terms {
                    let k = (ea + eb - lo) as usize;
                    let mut s = acc[k] + ca as u128 * cb as u128;
                    if s > limit {
                        s %= m;
                    }
                    acc[k] = s;
                }
            }
            let terms = acc
                .into_iter()
                .enumerate()
                .filter_map(|(k, s)| {
                    let c = (s % m) as u64;
                    (c != 0).then_some((lo + k as i64, c))
                })
                .collect();
            Ok(LaurentPoly { ctx, terms })
        } else {
            let mut acc: HashMap<i64, u64> = HashMap::with_capacity(work);
            for &(ea, ca) in &self.terms {
                for &(eb, cb) in &other.terms {
                    let e = acc.entry(ea + eb).or_insert(0);
                    *e = ctx.add(*e, ctx.mul(ca, cb));
                }
            }
            Ok(Self::from_terms(ctx, acc))
        }
    }

    pub fn neg_ref(&self) -> Self {
        LaurentPoly {
            ctx: self.ctx,
            terms: self.terms.iter().map(|&(e, c)| (e, self.ctx.neg(c))).collect(),
        }
    }

    pub fn scale(&self, c: u64) -> Self {
        let c = c % self.ctx.modulus();
        let terms = self
            .terms
            .iter()
            .filter_map(|&(e, a)| {
                let v = self.ctx.mul(a, c);
                (v != 0).then_some((e, v))
            })
            .collect();
        LaurentPoly { ctx: self.ctx, terms }
    }

    /// Multiply by w^k.
    pub fn shift(&self, k: i64) -> Self {
        LaurentPoly { ctx: self.ctx, terms: self.terms.iter().map(|&(e, c)| (e + k, c)).collect() }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.ctx);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Substitute w → w^k (k ≥ 1).
    pub fn dilate(&self, k: i64) -> Self {
        LaurentPoly { ctx: self.ctx, terms: self.terms.iter().map(|&(e, c)| (e * k, c)).collect() }
    }

    /// Re-interpret in another context (reducing or widening the modulus).
    /// Widening keeps the residues' representatives in [0, m).
    pub fn with_ctx(&self, ctx: Context) -> Self {
        Self::from_terms(ctx, self.terms.iter().copied())
    }

    /// Divide every coefficient exactly by `d`; `None` if some coefficient is not divisible.
    pub fn div_exact(&self, d: u64, target: Context) -> Option<Self> {
        let mut out = Vec::with_capacity(self.terms.len());
        for &(e, c) in &self.terms {
            if c % d != 0 {
                return None;
            }
            out.push((e, c / d));
        }
        Some(Self::from_terms(target, out))
    }

    /// Smallest p-adic valuation of a coefficient (gamma for the zero polynomial).
    pub fn valuation(&self) -> u32 {
        self.terms.iter().map(|&(_, c)| self.ctx.val(c)).min().unwrap_or(self.ctx.gamma)
    }

    pub fn to_series(&self, order: i64) -> TruncSeries {
        TruncSeries::from_sparse(self.ctx, order, self.terms.iter().copied())
    }

    pub fn to_json(&self) -> LaurentJson {
        LaurentJson { scale_d: self.ctx.scale_d, terms: self.terms.iter().map(|&(e, c)| (e, c as i64)).collect() }
    }

    pub fn from_json(ctx: Context, j: &LaurentJson) -> Result<Self> {
        if j.scale_d != ctx.scale_d {
            return Err(Error::BadInput(format!("scaleD {} does not match context {}", j.scale_d, ctx.scale_d)));
        }
        Ok(Self::from_signed(ctx, j.terms.iter().copied()))
    }

    /// Render as a z-polynomial, e.g. "3 z^2+15 z" or "11 z^(-1/2)".
    pub fn display(&self, signed: bool) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (i, &(e, c)) in self.terms.iter().rev().enumerate() {
            let v = if signed { self.ctx.symmetric(c) as i128 } else { c as i128 };
            let mono = zpow(e, self.ctx.scale_d as i64);
            let (neg, mag) = (v < 0, v.unsigned_abs());
            if i > 0 {
                s.push(if neg { '-' } else { '+' });
            } else if neg {
                s.push('-');
            }
            match (mag, mono.is_empty()) {
                (_, true) => s.push_str(&mag.to_string()),
                (1, false) => s.push_str(&mono),
                _ => {
                    s.push_str(&mag.to_string());
                    s.push(' ');
                    s.push_str(&mono);
                }
            }
        }
        s
    }
}

/// "z", "z^3", "z^(-1/2)" or "" for exponent e in w-units with w = z^{1/d}.
pub fn zpow(e: i64, d: i64) -> String {
    if e == 0 {
        return String::new();
    }
    let g = num_integer::gcd(e.abs(), d);
    let (num, den) = (e / g, d / g);
    match (num, den) {
        (1, 1) => "z".to_string(),
        (n, 1) if n > 0 => format!("z^{n}"),
        (n, 1) => format!("z^({n})"),
        (n, d) => format!("z^({n}/{d})"),
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display(false))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaurentJson {
    #[serde(rename = "scaleD")]
    pub scale_d: u32,
    pub terms: Vec<(i64, i64)>,
}

impl<'a> Add<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_add(rhs).expect("context mismatch")
    }
}

impl<'a> Sub<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_sub(rhs).expect("context mismatch")
    }
}

impl<'a> Mul<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_mul(rhs).expect("context mismatch")
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.neg_ref()
    }
}

/// s_α(z) = Σ_{k<α} z^{p^k}, returned in w-units (exponents scaled by D).
pub fn frobenius_sum(ctx: Context, alpha: u32) -> LaurentPoly {
    let d = ctx.scale_d as i64;
    LaurentPoly::from_terms(ctx, (0..alpha).map(|k| (d * (ctx.p as i64).pow(k), 1)))
}

/// s_α evaluated at w itself, in base q = p^h: Σ_{k<α} w^{q^k}.
/// This is the form the base solutions use after the substitution z → w.
pub fn frobenius_sum_w(ctx: Context, alpha: u32) -> LaurentPoly {
    let q = ctx.q() as i64;
    LaurentPoly::from_terms(ctx, (0..alpha).map(|k| (q.pow(k), 1)))
}

/// Truncated series: coefficients for exponents in [low, order); everything
/// at or above `order` is unknown.
#[derive(Clone, Debug)]
pub struct TruncSeries {
    ctx: Context,
    order: i64,
    low: i64,
    coeffs: Vec<u64>,
}

impl TruncSeries {
    pub fn zero(ctx: Context, order: i64) -> Self {
        TruncSeries { ctx, order, low: order.min(0), coeffs: vec![0; (order - order.min(0)) as usize] }
    }

    /// Dense series with coefficients starting at exponent `low`.
    pub fn from_dense(ctx: Context, low: i64, order: i64, mut coeffs: Vec<u64>) -> Self {
        let len = (order - low).max(0) as usize;
        coeffs.resize(len, 0);
        for c in coeffs.iter_mut() {
            *c %= ctx.modulus();
        }
        TruncSeries { ctx, order, low, coeffs }
    }

    pub fn from_sparse(ctx: Context, order: i64, terms: impl IntoIterator<Item = (i64, u64)>) -> Self {
        let terms: Vec<(i64, u64)> = terms.into_iter().filter(|t| t.0 < order).collect();
        let low = terms.iter().map(|t| t.0).min().unwrap_or(0).min(0);
        let mut s = TruncSeries { ctx, order, low, coeffs: vec![0; (order - low).max(0) as usize] };
        for (e, c) in terms {
            s.add_at(e, c);
        }
        s
    }

    pub fn ctx(&self) -> &Context {
        &self.ctx
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn low(&self) -> i64 {
        self.low
    }

    pub fn coeff(&self, e: i64) -> u64 {
        assert!(e < self.order, "exponent {e} beyond truncation order {}", self.order);
        if e < self.low {
            0
        } else {
            self.coeffs[(e - self.low) as usize]
        }
    }

    pub fn add_at(&mut self, e: i64, c: u64) {
        if e >= self.order {
            return;
        }
        if e < self.low {
            let extra = (self.low - e) as usize;
            let mut v = vec![0; extra];
            v.extend_from_slice(&self.coeffs);
            self.coeffs = v;
            self.low = e;
        }
        let k = (e - self.low) as usize;
        self.coeffs[k] = self.ctx.add(self.coeffs[k], c);
    }

    /// Nonzero terms as (exponent, coefficient).
    pub fn nonzero(&self) -> Vec<(i64, u64)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (self.low + i as i64, c))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Equality up to the smaller of the two orders.
    pub fn agrees_with(&self, other: &TruncSeries) -> bool {
        self.first_difference(other).is_none()
    }

    pub fn first_difference(&self, other: &TruncSeries) -> Option<i64> {
        let hi = self.order.min(other.order);
        let lo = self.low.min(other.low);
        let m = self.ctx.modulus().min(other.ctx.modulus());
        (lo..hi).find(|&e| self.coeff(e) % m != other.coeff(e) % m)
    }

    pub fn truncate(&self, order: i64) -> TruncSeries {
        let order = order.min(self.order);
        let len = (order - self.low).max(0) as usize;
        TruncSeries { ctx: self.ctx, order, low: self.low, coeffs: self.coeffs[..len.min(self.coeffs.len())].to_vec() }
    }

    pub fn add(&self, other: &TruncSeries) -> TruncSeries {
        let order = self.order.min(other.order);
        let mut out = self.truncate(order);
        for (e, c) in other.nonzero() {
            out.add_at(e, c);
        }
        out
    }

    pub fn scale(&self, c: u64) -> TruncSeries {
        let mut out = self.clone();
        for x in out.coeffs.iter_mut() {
            *x = self.ctx.mul(*x, c);
        }
        out
    }

    /// Product truncated at the order both factors determine.
    pub fn mul(&self, other: &TruncSeries) -> TruncSeries {
        let low = self.low + other.low;
        let order = (self.order + other.low).min(other.order + self.low);
        let mut out = TruncSeries { ctx: self.ctx, order, low, coeffs: vec![0; (order - low).max(0) as usize] };
        let a = self.nonzero();
        let b = other.nonzero();
        for &(ea, ca) in &a {
            for &(eb, cb) in &b {
                let e = ea + eb;
                if e >= order {
                    break;
                }
                let k = (e - low) as usize;
                out.coeffs[k] = self.ctx.add(out.coeffs[k], self.ctx.mul(ca, cb));
            }
        }
        out
    }

    /// Multiply by a sparse Laurent polynomial, keeping this series' order
    /// shifted by the polynomial's smallest exponent.
    pub fn mul_laurent(&self, a: &LaurentPoly) -> TruncSeries {
        let Some(lo) = a.min_exp() else {
            return TruncSeries::zero(self.ctx, self.order);
        };
        let order = self.order + lo;
        let mut out = TruncSeries::zero(self.ctx, order);
        for (e, c) in self.nonzero() {
            for &(ea, ca) in a.terms() {
                out.add_at(e + ea, self.ctx.mul(c, ca));
            }
        }
        out
    }

    /// Formal derivative with respect to w.
    pub fn derivative(&self) -> TruncSeries {
        let mut out = TruncSeries::zero(self.ctx, self.order - 1);
        for (e, c) in self.nonzero() {
            if e != 0 {
                out.add_at(e - 1, self.ctx.mul(c, self.ctx.from_i64(e)));
            }
        }
        out
    }
}

impl PartialEq for TruncSeries {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.agrees_with(other)
    }
}
