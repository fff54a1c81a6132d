//! Polynomial relations A(z, Φ(z)) ≡ 0 mod p^γ, decided exactly in the
//! normalized H-basis.
//!
//! A candidate is kept as an expression tree so that powers of p-divisible
//! subexpressions can be evaluated with reduced precision: if X(Φ) = p^v·Y,
//! then X^k = p^{vk}·Y^k and Y^k is only needed modulo p^{γ−vk}, where
//! Y^p ≡ Y(z^p) (mod p) replaces the multiplication altogether.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dsl::{self, Expr};
use crate::error::{Error, Result};
use crate::hseries::normal_form_phi_power;
use crate::hseries::{Composition, HCombo};
use crate::laurent::LaurentPoly;
use crate::modarith::{vp_factorial, Context};

/// Σ c·z^a·t^b with integer coefficients, keyed by (a, b).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BivarPoly {
    terms: BTreeMap<(u32, u32), BigInt>,
}

#[derive(Serialize, Deserialize)]
struct BivarJson {
    monomials: Vec<(Value, u32, u32)>,
}

impl BivarPoly {
    pub fn from_terms(terms: impl IntoIterator<Item = (BigInt, u32, u32)>) -> Self {
        let mut p = BivarPoly::default();
        for (c, a, b) in terms {
            p.add_monomial(c, a, b);
        }
        p
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::from_terms([(c.into(), 0, 0)])
    }

    /// t^p − t + z.
    pub fn artin_schreier(p: u64) -> Self {
        Self::from_terms([(BigInt::one(), 0, p as u32), (-BigInt::one(), 0, 1), (BigInt::one(), 1, 0)])
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(Tree::parse(s)?.expand())
    }

    fn add_monomial(&mut self, c: BigInt, a: u32, b: u32) {
        let e = self.terms.entry((a, b)).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&(a, b));
        }
    }

    /// (coefficient, z-exponent, t-exponent).
    pub fn monomials(&self) -> impl Iterator<Item = (&BigInt, u32, u32)> {
        self.terms.iter().map(|(&(a, b), c)| (c, a, b))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree_t(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.1).max()
    }

    pub fn max_z(&self) -> u32 {
        self.terms.keys().map(|k| k.0).max().unwrap_or(0)
    }

    /// Leading coefficient in t is the constant 1.
    pub fn is_monic(&self) -> bool {
        match self.degree_t() {
            None => false,
            Some(d) => {
                let lead: Vec<_> = self.terms.iter().filter(|(k, _)| k.1 == d).collect();
                lead.len() == 1 && lead[0].0 .0 == 0 && lead[0].1.is_one()
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (c, a, b) in o.monomials() {
            out.add_monomial(c.clone(), a, b);
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-BigInt::one())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::from_terms(self.monomials().map(|(x, a, b)| (x * c, a, b)))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = BivarPoly::default();
        for (x, a, b) in self.monomials() {
            for (y, c, d) in o.monomials() {
                out.add_monomial(x * y, a + c, b + d);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = BivarPoly::constant(1);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Gcd of the coefficients, signed like the leading monomial.
    fn content(&self) -> BigInt {
        let g = self.terms.values().fold(BigInt::zero(), |g, c| g.gcd(c));
        match self.lead() {
            Some((c, _, _)) if c.is_negative() => -g,
            _ => g,
        }
    }

    /// First monomial in display order (t-degree, then z-degree, descending).
    fn lead(&self) -> Option<(&BigInt, u32, u32)> {
        self.display_order().into_iter().next()
    }

    fn display_order(&self) -> Vec<(&BigInt, u32, u32)> {
        let mut v: Vec<_> = self.monomials().collect();
        v.sort_by(|x, y| (y.2, y.1).cmp(&(x.2, x.1)));
        v
    }

    pub fn to_json(&self) -> String {
        let monomials = self
            .monomials()
            .map(|(c, a, b)| {
                let v = c.to_i64().map_or_else(|| Value::String(c.to_string()), Value::from);
                (v, a, b)
            })
            .collect();
        serde_json::to_string(&BivarJson { monomials }).expect("plain data")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: BivarJson = serde_json::from_str(s).map_err(|e| Error::BadInput(format!("polynomial JSON: {e}")))?;
        let mut out = BivarPoly::default();
        for (c, a, b) in j.monomials {
            let c = match c {
                Value::Number(n) => n.as_i64().map(BigInt::from),
                Value::String(s) => s.parse::<BigInt>().ok(),
                _ => None,
            }
            .ok_or_else(|| Error::BadInput("monomial coefficient must be an integer".into()))?;
            out.add_monomial(c, a, b);
        }
        Ok(out)
    }

    /// A(z, Φ) in the H-basis: Σ_b c_b(z) NF(Φ^b).
    pub fn at_phi(&self, ctx: Context) -> HCombo {
        let mut by_t: BTreeMap<u32, Vec<(i64, u64)>> = BTreeMap::new();
        for (c, a, b) in self.monomials() {
            by_t.entry(b).or_default().push((a as i64, ctx.from_bigint(c)));
        }
        let mut out = HCombo::zero(ctx);
        for (b, coeffs) in by_t {
            let c = LaurentPoly::from_terms(ctx, coeffs);
            if c.is_zero() {
                continue;
            }
            out = out.add(&normal_form_phi_power(ctx, b as u64).mul_laurent(&c));
        }
        out
    }
}

fn monomial_str(c: &BigInt, a: u32, b: u32) -> String {
    let mut f = Vec::new();
    let abs = c.abs();
    if !abs.is_one() || (a == 0 && b == 0) {
        f.push(abs.to_string());
    }
    match a {
        0 => {}
        1 => f.push("z".into()),
        _ => f.push(format!("z^{a}")),
    }
    match b {
        0 => {}
        1 => f.push("t".into()),
        _ => f.push(format!("t^{b}")),
    }
    f.join("*")
}

impl fmt::Display for BivarPoly {
    /// "t^3 - t + z"; re-parsable by [`BivarPoly::parse`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (c, a, b)) in self.display_order().into_iter().enumerate() {
            let m = monomial_str(c, a, b);
            match (i, c.is_negative()) {
                (0, false) => write!(f, "{m}")?,
                (0, true) => write!(f, "-{m}")?,
                (_, false) => write!(f, " + {m}")?,
                (_, true) => write!(f, " - {m}")?,
            }
        }
        Ok(())
    }
}

/// Candidate polynomial with powers of compound subexpressions kept intact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tree {
    Poly(BivarPoly),
    Add(Box<Tree>, Box<Tree>),
    Sub(Box<Tree>, Box<Tree>),
    Mul(Box<Tree>, Box<Tree>),
    Pow(Box<Tree>, u32),
}

fn has_compound_pow(e: &Expr) -> bool {
    match e {
        Expr::Int(_) | Expr::Var(_) => false,
        Expr::Pow(b, _) => !matches!(**b, Expr::Int(_) | Expr::Var(_)),
        Expr::Neg(a) => has_compound_pow(a),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => has_compound_pow(a) || has_compound_pow(b),
    }
}

fn poly_of(e: &Expr) -> BivarPoly {
    BivarPoly::from_terms(dsl::expand(e).into_iter().map(|((a, b), c)| (c, a, b)))
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Sum,
    Product,
    Atom,
}

impl Tree {
    /// Parse over the variables z and t.
    pub fn parse(s: &str) -> Result<Self> {
        Ok(Self::from_expr(&dsl::parse(s, &["z", "t"])?))
    }

    fn from_expr(e: &Expr) -> Self {
        if !has_compound_pow(e) {
            return Tree::Poly(poly_of(e));
        }
        match e {
            Expr::Add(a, b) => Tree::Add(Box::new(Self::from_expr(a)), Box::new(Self::from_expr(b))),
            Expr::Sub(a, b) => Tree::Sub(Box::new(Self::from_expr(a)), Box::new(Self::from_expr(b))),
            Expr::Mul(a, b) => Tree::Mul(Box::new(Self::from_expr(a)), Box::new(Self::from_expr(b))),
            Expr::Neg(a) => Tree::Mul(Box::new(Tree::Poly(BivarPoly::constant(-1))), Box::new(Self::from_expr(a))),
            Expr::Pow(a, k) => Tree::Pow(Box::new(Self::from_expr(a)), *k),
            Expr::Int(_) | Expr::Var(_) => unreachable!("atoms have no compound power"),
        }
    }

    pub fn pow(self, k: u32) -> Self {
        Tree::Pow(Box::new(self), k)
    }

    /// c·self, folded into the leaf when self is a plain polynomial.
    pub fn scaled(self, c: &BigInt) -> Self {
        match self {
            Tree::Poly(p) => Tree::Poly(p.scale(c)),
            t => Tree::Mul(Box::new(Tree::Poly(BivarPoly::constant(c.clone()))), Box::new(t)),
        }
    }

    pub fn plus(self, o: Tree) -> Self {
        Tree::Add(Box::new(self), Box::new(o))
    }

    pub fn minus(self, o: Tree) -> Self {
        Tree::Sub(Box::new(self), Box::new(o))
    }

    pub fn expand(&self) -> BivarPoly {
        match self {
            Tree::Poly(p) => p.clone(),
            Tree::Add(a, b) => a.expand().add(&b.expand()),
            Tree::Sub(a, b) => a.expand().sub(&b.expand()),
            Tree::Mul(a, b) => a.expand().mul(&b.expand()),
            Tree::Pow(a, k) => a.expand().pow(*k),
        }
    }

    fn render(&self) -> (String, Prec) {
        fn wrap((s, p): (String, Prec), min: Prec) -> String {
            if p < min || s.starts_with('-') {
                format!("({s})")
            } else {
                s
            }
        }
        match self {
            Tree::Poly(p) => {
                let n = p.terms.len();
                if n <= 1 {
                    let s = p.to_string();
                    let prec = if s.starts_with('-') {
                        Prec::Sum
                    } else if s.contains('*') {
                        Prec::Product
                    } else {
                        Prec::Atom
                    };
                    return (s, prec);
                }
                let c = p.content();
                if c.is_one() {
                    return (p.to_string(), Prec::Sum);
                }
                let inner = BivarPoly::from_terms(p.monomials().map(|(x, a, b)| (x / &c, a, b)));
                if c == -BigInt::one() {
                    (format!("-({inner})"), Prec::Sum)
                } else if c.is_negative() {
                    (format!("-{}*({inner})", -c), Prec::Sum)
                } else {
                    (format!("{c}*({inner})"), Prec::Product)
                }
            }
            Tree::Add(a, b) => {
                let l = a.render().0;
                let r = b.render().0;
                match r.strip_prefix('-') {
                    Some(rest) => (format!("{l} - {rest}"), Prec::Sum),
                    None => (format!("{l} + {r}"), Prec::Sum),
                }
            }
            Tree::Sub(a, b) => {
                let l = a.render().0;
                (format!("{l} - {}", wrap(b.render(), Prec::Product)), Prec::Sum)
            }
            Tree::Mul(a, b) => {
                if let Tree::Poly(c) = &**a {
                    if c.terms.len() == 1 && c.terms.contains_key(&(0, 0)) {
                        let c = &c.terms[&(0, 0)];
                        let body = wrap(b.render(), Prec::Product);
                        if c == &-BigInt::one() {
                            return (format!("-{body}"), Prec::Sum);
                        }
                        let prec = if c.is_negative() { Prec::Sum } else { Prec::Product };
                        return (format!("{c}*{body}"), prec);
                    }
                }
                (format!("{}*{}", wrap(a.render(), Prec::Product), wrap(b.render(), Prec::Product)), Prec::Product)
            }
            Tree::Pow(a, k) => (format!("{}^{k}", wrap(a.render(), Prec::Atom)), Prec::Atom),
        }
    }

    /// A(z, Φ(z)) mod p^γ as a normalized combination.
    pub fn at_phi(&self, p: u64, gamma: u32) -> Result<HCombo> {
        let ctx = Context::new(p, gamma, 1)?;
        Ok(match self {
            Tree::Poly(q) => q.at_phi(ctx),
            Tree::Add(a, b) => a.at_phi(p, gamma)?.add(&b.at_phi(p, gamma)?),
            Tree::Sub(a, b) => a.at_phi(p, gamma)?.sub(&b.at_phi(p, gamma)?),
            Tree::Mul(a, b) => {
                let (x, y) = (a.at_phi(p, gamma)?, b.at_phi(p, gamma)?);
                if x.is_zero() || y.is_zero() {
                    return Ok(HCombo::zero(ctx));
                }
                let v = x.valuation() + y.valuation();
                if v >= gamma {
                    return Ok(HCombo::zero(ctx));
                }
                if v + 1 < gamma {
                    // the stuffle grows fast with precision; NF(Φ^b) does not
                    return Ok(self.expand().at_phi(ctx));
                }
                let (vx, vy) = (x.valuation(), y.valuation());
                lift_back(&unit_part(&x, vx, 1)?.mul(&unit_part(&y, vy, 1)?), v, ctx)?
            }
            Tree::Pow(a, k) => {
                if *k == 0 {
                    return Ok(HCombo::from_free(LaurentPoly::one(ctx)));
                }
                let x = a.at_phi(p, gamma)?;
                if x.is_zero() {
                    return Ok(HCombo::zero(ctx));
                }
                let v = x.valuation();
                if v as u64 * *k as u64 >= gamma as u64 {
                    return Ok(HCombo::zero(ctx));
                }
                if gamma - v * k > 1 || *k % p as u32 != 0 {
                    return Ok(self.expand().at_phi(ctx));
                }
                // X^k = p^{vk} Y^k with Y^k needed mod p only: Y^{p^j m} = (Y^m)(z^{p^j})
                let (mut j, mut m) = (0, *k);
                while m % p as u32 == 0 {
                    j += 1;
                    m /= p as u32;
                }
                let mut y = if m == 1 {
                    unit_part(&x, v, 1)?
                } else {
                    unit_part(&Tree::Pow(a.clone(), m).at_phi(p, v * m + 1)?, v * m, 1)?
                };
                for _ in 0..j {
                    y = y.frobenius_twist();
                }
                lift_back(&y, v * k, ctx)?
            }
        })
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render().0)
    }
}

/// X / p^v reduced modulo p^rest.
fn unit_part(x: &HCombo, v: u32, rest: u32) -> Result<HCombo> {
    let c = *x.ctx();
    let mid = Context::new(c.p, c.gamma - v, 1)?;
    let y = x.div_p_power(v, mid).ok_or_else(|| Error::Precondition("valuation below the claimed power".into()))?;
    Ok(y.with_ctx(Context::new(c.p, rest, 1)?))
}

fn lift_back(y: &HCombo, v: u32, ctx: Context) -> Result<HCombo> {
    Ok(y.with_ctx(ctx).scale(ctx.pow(ctx.p, v as u64)))
}

/// Exact decision of A(z, Φ(z)) ≡ 0 mod p^γ, structured evaluation.
pub fn verify_vanishing(a: &Tree, p: u64, gamma: u32) -> Result<bool> {
    Ok(a.at_phi(p, gamma)?.is_zero())
}

/// Same decision from the fully expanded polynomial.
pub fn verify_vanishing_expanded(a: &BivarPoly, p: u64, gamma: u32) -> Result<bool> {
    Ok(a.at_phi(Context::new(p, gamma, 1)?).is_zero())
}

/// Cross-check on the first `order` coefficients of A(z, Φ(z)) mod p^γ,
/// with Φ = Σ z^{p^n}. Necessary for vanishing, not sufficient.
pub fn verify_vanishing_truncated(a: &BivarPoly, p: u64, gamma: u32, order: usize) -> Result<bool> {
    let ctx = Context::new(p, gamma, 1)?;
    let mut phi = vec![0u64; order];
    let mut e = 1usize;
    while e < order {
        phi[e] = 1;
        e = e.saturating_mul(p as usize);
    }
    let mul = |x: &[u64], y: &[u64]| {
        let mut out = vec![0u64; order];
        for (i, &a) in x.iter().enumerate().filter(|t| *t.1 != 0) {
            for (j, &b) in y[..order - i].iter().enumerate().filter(|t| *t.1 != 0) {
                out[i + j] = ctx.add(out[i + j], ctx.mul(a, b));
            }
        }
        out
    };
    let mut acc = vec![0u64; order];
    let mut power = vec![0u64; order];
    power[0] = 1 % ctx.modulus();
    for b in 0..=a.degree_t().unwrap_or(0) {
        if b > 0 {
            power = mul(&power, &phi);
        }
        for (c, za, _) in a.monomials().filter(|m| m.2 == b) {
            let c = ctx.from_bigint(c);
            for (i, &x) in power.iter().enumerate().take(order.saturating_sub(za as usize)) {
                acc[i + za as usize] = ctx.add(acc[i + za as usize], ctx.mul(c, x));
            }
        }
    }
    Ok(acc.iter().all(|&x| x == 0))
}

/// Least d with v_p(d!) ≥ γ.
pub fn degree_lower_bound(p: u64, gamma: u32) -> u64 {
    assert!(gamma >= 1, "gamma must be positive");
    let mut d = p;
    while vp_factorial(d, p) < gamma as u64 {
        d += p;
    }
    debug_assert!((1..d).all(|e| vp_factorial(e, p) < gamma as u64));
    d
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VanishingReport {
    pub vanishes: bool,
    pub degree: u32,
    pub monic: bool,
    pub lower_bound: u64,
    /// Terms of the residual combination (0 iff it vanishes).
    pub residual_terms: usize,
}

impl fmt::Display for VanishingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "vanishes: {}; degree {}; lower bound {}", self.vanishes, self.degree, self.lower_bound)
    }
}

pub fn vanishing_report(a: &Tree, p: u64, gamma: u32) -> Result<VanishingReport> {
    let r = a.at_phi(p, gamma)?;
    let e = a.expand();
    Ok(VanishingReport {
        vanishes: r.is_zero(),
        degree: e.degree_t().unwrap_or(0),
        monic: e.is_monic(),
        lower_bound: degree_lower_bound(p, gamma),
        residual_terms: r.terms().len() + usize::from(!r.free.is_zero()),
    })
}

/// The candidates t^p−t+z (γ=1), its k-th powers (γ=k ≤ p) and
/// (t^p−t+z)^p − p^{p−1}(t²−t+z) (γ=p+1), with their moduli.
pub fn power_family(p: u64) -> Vec<(Tree, u32)> {
    let g = Tree::Poly(BivarPoly::artin_schreier(p));
    let mut out = vec![(g.clone(), 1)];
    for k in 2..=p as u32 {
        out.push((g.clone().pow(k), k));
    }
    let quad = BivarPoly::parse("t^2 - t + z").expect("literal");
    let c = BigInt::from(p).pow(p as u32 - 1);
    out.push((g.pow(p as u32).minus(Tree::Poly(quad.scale(&c))), p as u32 + 1));
    out
}

/// Product ∏ A_δ^{d_δ} over the p-ary digits of d = degree_lower_bound(p, γ),
/// where family[δ−1] vanishes modulo p^{(p^δ−1)/(p−1)}.
pub fn compose_min_poly(family: &[Tree], p: u64, gamma: u32) -> Result<Tree> {
    let d = degree_lower_bound(p, gamma);
    let m = family.len();
    let mut digits = Vec::new();
    let mut x = d;
    while x > 0 {
        digits.push(x % p);
        x /= p;
    }
    assert_eq!(digits[0], 0, "the degree bound is divisible by p");
    let level = |delta: usize| ((p.pow(delta as u32) - 1) / (p - 1)) as u32;
    let out = if digits.len() - 1 <= m {
        let mut acc: Option<Tree> = None;
        for (delta, &k) in digits.iter().enumerate().skip(1) {
            if k == 0 {
                continue;
            }
            let f = family[delta - 1].clone();
            let f = if k == 1 { f } else { f.pow(k as u32) };
            acc = Some(match acc {
                None => f,
                Some(a) => Tree::Mul(Box::new(f), Box::new(a)),
            });
        }
        acc.expect("d > 0")
    } else if m > 0 && d == p.pow(m as u32 + 1) && gamma <= p as u32 * level(m) {
        family[m - 1].clone().pow(p as u32)
    } else {
        let needed = digits.len() - 1;
        return Err(Error::OutOfRange(format!(
            "modulus {p}^{gamma} needs a degree-{d} polynomial; the family stops at δ={m}, next needed δ={}",
            (m + 1).min(needed)
        )));
    };
    if !verify_vanishing(&out, p, gamma)? {
        return Err(Error::Precondition("a family member does not vanish at its modulus".into()));
    }
    Ok(out)
}

/// Dense elimination over F_p; returns one solution with free variables 0.
fn solve_fp(p: u64, rows: &mut [Vec<u64>], ncols: usize) -> Option<Vec<u64>> {
    let inv = |a: u64| {
        let ctx = Context::new(p, 1, 1).expect("prime");
        ctx.inv(a).expect("unit")
    };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(i) = (r..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
        rows.swap(r, i);
        let f = inv(rows[r][c]);
        for x in rows[r].iter_mut() {
            *x = *x * f % p;
        }
        let pivot = rows[r].clone();
        for (j, row) in rows.iter_mut().enumerate() {
            if j != r && row[c] != 0 {
                let f = row[c];
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x = (*x + (p - f) * y) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if rows[r..].iter().any(|row| row[ncols] != 0) {
        return None;
    }
    let mut x = vec![0; ncols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = rows[i][ncols];
    }
    Some(x)
}

/// Solve Σ_j X_j(z)·gens[j] ≡ target (mod p) with deg_z X_j ≤ z_bound.
fn fit_mod_p(p: u64, gens: &[HCombo], target: &HCombo, z_bound: u32) -> Result<Option<Vec<BivarPoly>>> {
    let ctx = Context::new(p, 1, 1)?;
    let width = z_bound as usize + 1;
    let ncols = gens.len() * width;
    let mut index: BTreeMap<(Option<Composition>, i64), usize> = BTreeMap::new();
    let mut entries: Vec<Vec<(usize, u64)>> = vec![Vec::new(); ncols + 1];
    let mut push = |col: usize, combo: &HCombo, shift: i64| {
        let combo = combo.with_ctx(ctx);
        let parts = std::iter::once((None, &combo.free)).chain(combo.terms().iter().map(|(k, v)| (Some(k.clone()), v)));
        for (key, poly) in parts {
            for &(e, c) in poly.terms() {
                let n = index.len();
                let row = *index.entry((key.clone(), e + shift)).or_insert(n);
                entries[col].push((row, c));
            }
        }
    };
    for (j, g) in gens.iter().enumerate() {
        for a in 0..width {
            push(j * width + a, g, a as i64);
        }
    }
    push(ncols, target, 0);
    let mut rows = vec![vec![0u64; ncols + 1]; index.len()];
    for (col, es) in entries.iter().enumerate() {
        for &(row, c) in es {
            rows[row][col] = (rows[row][col] + c) % p;
        }
    }
    let Some(x) = solve_fp(p, &mut rows, ncols) else { return Ok(None) };
    Ok(Some(
        x.chunks(width)
            .map(|c| {
                BivarPoly::from_terms(c.iter().enumerate().filter(|(_, &v)| v != 0).map(|(a, &v)| {
                    let s = if v > p / 2 { v as i64 - p as i64 } else { v as i64 };
                    (BigInt::from(s), a as u32, 0)
                }))
            })
            .collect(),
    ))
}

/// g_δ = (p^δ − 1)/(p − 1), the modulus exponent of level δ.
pub fn level_exponent(p: u64, delta: u32) -> u32 {
    ((p.pow(delta) - 1) / (p - 1)) as u32
}

/// E_δ = A_δ(Φ)/p^{g_δ} mod p, after checking degree and vanishing.
fn level_part(a: &Tree, p: u64, delta: u32) -> Result<HCombo> {
    let g = level_exponent(p, delta);
    let e = a.expand();
    if !e.is_monic() || e.degree_t() != Some(p.pow(delta) as u32) {
        return Err(Error::Precondition(format!("A_{delta} must be monic of degree {}", p.pow(delta))));
    }
    let x = a.at_phi(p, g + 1)?;
    if x.is_zero() {
        return Ok(HCombo::zero(Context::new(p, 1, 1)?));
    }
    if x.valuation() < g {
        return Err(Error::Precondition(format!("A_{delta} does not vanish modulo {p}^{g}")));
    }
    unit_part(&x, g, 1)
}

/// Slack added to the z-degree support of A_{δ−1}^p for the unknowns.
pub const Z_SLACK: u32 = 2;

fn z_bound(prev: &Tree, p: u64) -> u32 {
    prev.expand().max_z() * p as u32 + Z_SLACK
}

/// Perturb every coefficient of A_{δ−1}^p by p^{(p^δ−p)/(p−1)}·x and solve
/// for x over F_p. Ok(None) when that system is inconsistent.
pub fn search_min_poly_literal(prev: &Tree, p: u64, delta: u32) -> Result<Option<Tree>> {
    if delta < 2 {
        return Err(Error::BadInput("search starts at δ = 2".into()));
    }
    let ctx1 = Context::new(p, 1, 1)?;
    let e = level_part(prev, p, delta - 1)?;
    let gens: Vec<HCombo> = (0..p.pow(delta)).map(|b| normal_form_phi_power(ctx1, b)).collect();
    let Some(xs) = fit_mod_p(p, &gens, &e.frobenius_twist().neg(), z_bound(prev, p))? else { return Ok(None) };
    let x = xs
        .iter()
        .enumerate()
        .fold(BivarPoly::default(), |acc, (b, c)| acc.add(&c.mul(&BivarPoly::from_terms([(BigInt::one(), 0, b as u32)]))));
    let g = level_exponent(p, delta - 1);
    let c = BigInt::from(p).pow(p as u32 * g);
    verified(prev.clone().pow(p as u32).plus(Tree::Poly(x.scale(&c))), p, p as u32 * g + 1)
}

/// Level δ = family.len() + 1 from A_1 … A_{δ−1}:
/// A_δ = A_{δ−1}^p + Σ_e p^{pg−v(e)} X_e(z) ∏_{i<δ} A_i^{e_i}, with A_0 = t,
/// digits 0 ≤ e_i < p, v(e) = Σ e_i g_i and g = g_{δ−1}. Modulo p^{pg+1}
/// this is Σ X_e ∏ E_i^{e_i} ≡ −E_{δ−1}(z^p) over F_p.
pub fn search_min_poly(family: &[Tree], p: u64) -> Result<Option<Tree>> {
    if family.is_empty() {
        return Err(Error::BadInput("search needs A_1".into()));
    }
    let parts =
        family.iter().enumerate().map(|(i, a)| level_part(a, p, i as u32 + 1)).collect::<Result<Vec<_>>>()?;
    let delta = family.len() as u32 + 1;
    let g = level_exponent(p, delta - 1);
    let gamma = p as u32 * g + 1;
    // fails early when p^γ leaves the machine-word range
    Context::new(p, gamma, 1)?;
    let ctx1 = Context::new(p, 1, 1)?;
    let expanded: Vec<BivarPoly> = family.iter().map(Tree::expand).collect();

    // digit vectors e with ∏ E_i^{e_i} mod p, from the expanded product
    let mut digits: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..delta {
        digits = digits.iter().flat_map(|d| (0..p as u32).map(move |k| [d.as_slice(), &[k]].concat())).collect();
    }
    let weight = |e: &[u32]| -> u32 { e.iter().enumerate().skip(1).map(|(i, &k)| k * level_exponent(p, i as u32)).sum() };
    digits.sort_by_key(|e| weight(e));
    let generator = |e: &[u32]| -> Result<HCombo> {
        let mut b = BivarPoly::from_terms([(BigInt::one(), 0, e[0])]);
        for (i, &k) in e.iter().enumerate().skip(1) {
            b = b.mul(&expanded[i - 1].pow(k));
        }
        let v = weight(e);
        let x = b.at_phi(Context::new(p, v + 1, 1)?);
        if x.is_zero() {
            Ok(HCombo::zero(ctx1))
        } else {
            unit_part(&x, v, 1)
        }
    };
    let target = parts.last().expect("non-empty").frobenius_twist().neg();
    let zb = z_bound(family.last().unwrap(), p);

    // widen the basis by valuation: cheap low-valuation columns first
    let mut gens = Vec::new();
    let mut found = None;
    let mut i = 0;
    while i < digits.len() {
        let v = weight(&digits[i]);
        while i < digits.len() && weight(&digits[i]) == v {
            gens.push(generator(&digits[i])?);
            i += 1;
        }
        if let Some(xs) = fit_mod_p(p, &gens, &target, zb)? {
            found = Some(xs);
            break;
        }
    }
    let Some(xs) = found else { return Ok(None) };

    let pp = BigInt::from(p);
    let mut groups: BTreeMap<Vec<u32>, BivarPoly> = BTreeMap::new();
    for (e, x) in digits.iter().zip(&xs) {
        if x.is_zero() {
            continue;
        }
        let v = weight(e);
        let leaf = x.mul(&BivarPoly::from_terms([(BigInt::one(), 0, e[0])])).scale(&pp.pow(p as u32 * g - v));
        let g = groups.entry(e[1..].to_vec()).or_default();
        *g = g.add(&leaf);
    }
    let mut out = family.last().unwrap().clone().pow(p as u32);
    for (e, leaf) in groups {
        let mut term: Option<Tree> = None;
        for (i, &k) in e.iter().enumerate().rev() {
            if k == 0 {
                continue;
            }
            let f = family[i].clone();
            let f = if k == 1 { f } else { f.pow(k) };
            term = Some(match term {
                None => f,
                Some(t) => Tree::Mul(Box::new(t), Box::new(f)),
            });
        }
        out = match term {
            None => out.plus(Tree::Poly(leaf)),
            Some(t) => {
                let c = leaf.content();
                let unit = leaf.terms.len() == 1 && leaf.terms.contains_key(&(0, 0));
                if unit && c.is_negative() {
                    out.minus(t.scaled(&-c))
                } else if unit {
                    out.plus(t.scaled(&c))
                } else if c.is_negative() {
                    out.minus(Tree::Mul(Box::new(Tree::Poly(leaf.neg())), Box::new(t)))
                } else {
                    out.plus(Tree::Mul(Box::new(Tree::Poly(leaf)), Box::new(t)))
                }
            }
        };
    }
    verified(out, p, gamma)
}

fn verified(t: Tree, p: u64, gamma: u32) -> Result<Option<Tree>> {
    if verify_vanishing(&t, p, gamma)? {
        Ok(Some(t))
    } else {
        Err(Error::Precondition(format!("solved candidate fails to vanish modulo {p}^{gamma}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tree(s: &str) -> Tree {
        Tree::parse(s).unwrap()
    }

    #[test]
    fn parse_and_print() {
        let a = tree("(t^3-t+z)^3 - 9*(t^2-t+z)");
        assert_eq!(a.to_string(), "(t^3 - t + z)^3 - 9*(t^2 - t + z)");
        assert_eq!(Tree::parse(&a.to_string()).unwrap(), a);
        assert_eq!(a.expand().degree_t(), Some(9));
        assert!(a.expand().is_monic());
        let b = BivarPoly::parse("3*z*t^2 - z^2*t + 7").unwrap();
        assert_eq!(b.to_string(), "3*z*t^2 - z^2*t + 7");
        assert!(!b.is_monic());
        assert_eq!(BivarPoly::from_json(&b.to_json()).unwrap(), b);
        let big = BivarPoly::constant("123456789012345678901234567890".parse::<BigInt>().unwrap());
        assert_eq!(BivarPoly::from_json(&big.to_json()).unwrap(), big);
        assert_eq!(tree("-(t^2+z)^2").to_string(), "-(t^2 + z)^2");
    }

    #[test]
    fn basic_vanishing() {
        assert!(verify_vanishing(&tree("t^3 - t + z"), 3, 1).unwrap());
        assert!(!verify_vanishing(&tree("t - z"), 3, 1).unwrap());
        assert!(!verify_vanishing(&tree("t^3 - t + z"), 3, 2).unwrap());
        assert!(!verify_vanishing_truncated(&BivarPoly::parse("t^3 - t + z").unwrap(), 3, 2, 100).unwrap());
        assert!(!verify_vanishing_truncated(&BivarPoly::parse("(t^3-t+z)^3 - 9*(t^2-t+z)").unwrap(), 3, 4, 100).unwrap());
        assert!(verify_vanishing(&tree("(t^3 - t + z)^2 + 3*(t^3 - t + z)"), 3, 2).unwrap());
    }

    #[test]
    fn structured_and_expanded_agree() {
        for (s, p, g) in [
            ("(t^3-t+z)^2", 3, 2),
            ("(t^3-t+z)^2", 3, 3),
            ("(t^3-t+z)^3", 3, 3),
            ("(t^3-t+z)^3 - 9*(t^2-t+z)", 3, 4),
            ("(t^3-t+z)^3 - 9*(t^3-t+z) + 27*(z*t^2 - z^2*t)", 3, 4),
            ("(t^3-t+z)^3 - 9*(t^3-t+z)", 3, 4),
            ("(t^5-t+z)^2", 5, 2),
            ("(t^2-t+z)^2", 2, 2),
        ] {
            let a = tree(s);
            let r = a.at_phi(p, g).unwrap();
            assert_eq!(r.is_zero(), verify_vanishing_expanded(&a.expand(), p, g).unwrap(), "{s}");
            assert_eq!(r, a.expand().at_phi(Context::new(p, g, 1).unwrap()), "{s}");
            if r.is_zero() {
                assert!(verify_vanishing_truncated(&a.expand(), p, g, 2000).unwrap(), "{s}");
            }
        }
    }

    #[test]
    fn lower_bounds() {
        assert_eq!(degree_lower_bound(3, 1), 3);
        assert_eq!(degree_lower_bound(3, 4), 9);
        assert_eq!(degree_lower_bound(2, 1), 2);
        assert_eq!(degree_lower_bound(3, 3), 9);
        assert_eq!(degree_lower_bound(5, 3), 15);
        assert_eq!(degree_lower_bound(5, 6), 25);
    }

    #[test]
    fn family_at_p3() {
        let fam = power_family(3);
        for (a, g) in &fam[..fam.len() - 1] {
            assert!(verify_vanishing(a, 3, *g).unwrap(), "{a}");
            assert_eq!(degree_lower_bound(3, *g), a.expand().degree_t().unwrap() as u64);
        }
        // the top member fails modulo 81, and already modulo 27
        let (top, g) = fam.last().unwrap();
        assert_eq!(*g, 4);
        assert!(!verify_vanishing(top, 3, 4).unwrap());
        assert!(!verify_vanishing(top, 3, 3).unwrap());
    }

    #[test]
    fn searches_at_p3() {
        let a1 = tree("t^3 - t + z");
        assert_eq!(search_min_poly_literal(&a1, 3, 2).unwrap(), None);
        let a2 = search_min_poly(std::slice::from_ref(&a1), 3).unwrap().unwrap();
        let r = vanishing_report(&a2, 3, 4).unwrap();
        assert!(r.vanishes && r.monic);
        assert_eq!((r.degree as u64, r.lower_bound), (9, 9));
        assert!(!verify_vanishing(&a2, 3, 5).unwrap());
        let a3 = search_min_poly(&[a1, a2], 3).unwrap().unwrap();
        let r = vanishing_report(&a3, 3, 13).unwrap();
        assert!(r.vanishes && r.monic);
        assert_eq!((r.degree as u64, r.lower_bound), (27, 27));
        assert!(!a3.to_string().contains("+ (-"));
        assert_eq!(Tree::parse(&a3.to_string()).unwrap().expand(), a3.expand());
    }

    #[test]
    fn searches_at_p5() {
        let a1 = tree("t^5 - t + z");
        for g in 1..=5 {
            assert!(verify_vanishing(&a1.clone().pow(g), 5, g).unwrap());
        }
        assert!(!verify_vanishing(&power_family(5).last().unwrap().0, 5, 6).unwrap());
        assert_eq!(search_min_poly_literal(&a1, 5, 2).unwrap(), None);
        let a2 = search_min_poly(std::slice::from_ref(&a1), 5).unwrap().unwrap();
        let r = vanishing_report(&a2, 5, 6).unwrap();
        assert!(r.vanishes && r.monic);
        assert_eq!((r.degree as u64, r.lower_bound), (25, 25));
    }

    #[test]
    fn composition() {
        let a1 = tree("t^3 - t + z");
        let c = compose_min_poly(std::slice::from_ref(&a1), 3, 2).unwrap();
        assert_eq!(c.expand().degree_t(), Some(6));
        let c = compose_min_poly(std::slice::from_ref(&a1), 3, 3).unwrap();
        assert_eq!(c.to_string(), "(t^3 - t + z)^3");
        let err = compose_min_poly(std::slice::from_ref(&a1), 3, 4).unwrap_err();
        assert!(err.to_string().contains("next needed δ=2"), "{err}");
        let a2 = search_min_poly(std::slice::from_ref(&a1), 3).unwrap().unwrap();
        let fam = [a1.clone(), a2.clone()];
        assert_eq!(compose_min_poly(&fam, 3, 4).unwrap(), a2);
        let c = compose_min_poly(&fam, 3, 6).unwrap();
        assert_eq!(c.expand().degree_t(), Some(15));
        let a5 = tree("t^5 - t + z");
        let c = compose_min_poly(std::slice::from_ref(&a5), 5, 3).unwrap();
        assert_eq!(c.to_string(), "(t^5 - t + z)^3");
    }

    #[test]
    fn bad_precondition() {
        assert!(matches!(search_min_poly(&[tree("t^3 - t")], 3), Err(Error::Precondition(_))));
    }

    #[test]
    fn leading_h_coefficient_is_factorial() {
        for (p, g) in [(3u64, 4u32), (5, 3), (2, 5)] {
            let ctx = Context::new(p, g, 1).unwrap();
            for d in 1..=9u64 {
                let nf = normal_form_phi_power(ctx, d);
                let fact = (1..=d).product::<u64>() % ctx.modulus();
                let c = nf.coeff_of(&vec![1; d as usize]);
                assert_eq!(c.coeff(0), fact, "p={p} d={d}");
                assert_eq!(c.len() <= 1, true);
            }
        }
    }
}
