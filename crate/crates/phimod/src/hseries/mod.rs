//! H-series calculus: expansion of Φ^K, Hou reduction to coprime indices,
//! greedy coefficient extraction.
//!
//! All series live in w = z^{1/D} and use the base q = p^h of the context,
//! i.e. H_b(w) = Σ_{n_1>…>n_r≥0} w^{b_1 q^{n_1}+…+b_r q^{n_r}}.

mod normal_form;

pub use normal_form::{normal_form_phi_power, phi_power_entries};

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::laurent::{LaurentJson, LaurentPoly, TruncSeries};
use crate::modarith::{multinomial_mod, vp_biguint, vp_u128, Context, Residue};

/// Enumeration of all compositions of K is refused above this size.
pub const EXPAND_CAP: u64 = 64;

/// Index tuple of an H-series. Ordered by weight, then length, then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Composition(pub Vec<u64>);

impl Composition {
    pub fn new(parts: Vec<u64>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::BadInput(format!("composition parts must be positive and nonempty: {parts:?}")));
        }
        Ok(Composition(parts))
    }

    pub fn parts(&self) -> &[u64] {
        &self.0
    }

    pub fn weight(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_normalized(&self, q: u64) -> bool {
        self.0.iter().all(|b| b % q != 0)
    }
}

impl Ord for Composition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight()
            .cmp(&other.weight())
            .then(self.0.len().cmp(&other.0.len()))
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Composition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 && self.0[0] < 10 {
            write!(f, "H_{}", self.0[0])
        } else {
            let s: Vec<String> = self.0.iter().map(|b| b.to_string()).collect();
            write!(f, "H_{{{}}}", s.join(","))
        }
    }
}

/// Z/p^γ[w, w^{-1}]-linear combination of 1 and H-series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HCombo {
    ctx: Context,
    pub free: LaurentPoly,
    hterms: BTreeMap<Composition, LaurentPoly>,
}

impl HCombo {
    pub fn zero(ctx: Context) -> Self {
        HCombo { ctx, free: LaurentPoly::zero(ctx), hterms: BTreeMap::new() }
    }

    pub fn from_free(free: LaurentPoly) -> Self {
        HCombo { ctx: *free.ctx(), free, hterms: BTreeMap::new() }
    }

    pub fn single(comp: Composition, coeff: LaurentPoly) -> Self {
        let mut c = HCombo::zero(*coeff.ctx());
        c.add_term(comp, &coeff);
        c
    }

    /// H_b with coefficient 1.
    pub fn h(ctx: Context, parts: &[u64]) -> Result<Self> {
        Ok(Self::single(Composition::new(parts.to_vec())?, LaurentPoly::one(ctx)))
    }

    pub fn ctx(&self) -> &Context {
        &self.ctx
    }

    pub fn terms(&self) -> &BTreeMap<Composition, LaurentPoly> {
        &self.hterms
    }

    pub fn coeff_of(&self, parts: &[u64]) -> LaurentPoly {
        self.hterms.get(&Composition(parts.to_vec())).cloned().unwrap_or_else(|| LaurentPoly::zero(self.ctx))
    }

    /// True iff every part of every stored composition is coprime to q.
    pub fn is_normalized(&self) -> bool {
        let q = self.ctx.q();
        self.hterms.keys().all(|c| c.is_normalized(q))
    }

    pub fn is_zero(&self) -> bool {
        self.free.is_zero() && self.hterms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.hterms.len() + usize::from(!self.free.is_zero())
    }

    pub fn add_term(&mut self, comp: Composition, coeff: &LaurentPoly) {
        if coeff.is_zero() {
            return;
        }
        match self.hterms.get_mut(&comp) {
            Some(c) => {
                *c = &*c + coeff;
                if c.is_zero() {
                    self.hterms.remove(&comp);
                }
            }
            None => {
                self.hterms.insert(comp, coeff.clone());
            }
        }
    }

    pub fn add(&self, other: &HCombo) -> HCombo {
        let mut out = self.clone();
        out.free = &out.free + &other.free;
        for (k, v) in &other.hterms {
            out.add_term(k.clone(), v);
        }
        out
    }

    pub fn neg(&self) -> HCombo {
        self.scale(self.ctx.neg(1))
    }

    pub fn sub(&self, other: &HCombo) -> HCombo {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: u64) -> HCombo {
        self.mul_laurent(&LaurentPoly::constant(self.ctx, c))
    }

    pub fn mul_laurent(&self, a: &LaurentPoly) -> HCombo {
        let mut out = HCombo::zero(self.ctx);
        out.free = &self.free * a;
        for (k, v) in &self.hterms {
            out.add_term(k.clone(), &(v * a));
        }
        out
    }

    /// Change modulus (reduce) keeping representatives.
    pub fn with_ctx(&self, ctx: Context) -> HCombo {
        let mut out = HCombo::zero(ctx);
        out.free = self.free.with_ctx(ctx);
        for (k, v) in &self.hterms {
            out.add_term(k.clone(), &v.with_ctx(ctx));
        }
        out
    }

    /// Smallest p-adic valuation among all coefficients.
    pub fn valuation(&self) -> u32 {
        self.hterms.values().map(|v| v.valuation()).fold(self.free.valuation(), u32::min)
    }

    /// Divide every coefficient by p^k into the context `target` (used after a
    /// valuation check).
    pub fn div_p_power(&self, k: u32, target: Context) -> Option<HCombo> {
        let d = self.ctx.p.pow(k);
        let mut out = HCombo::zero(target);
        out.free = self.free.div_exact(d, target)?;
        for (c, v) in &self.hterms {
            out.add_term(c.clone(), &v.div_exact(d, target)?);
        }
        Some(out)
    }

    /// Product of two combos via the quasi-shuffle (stuffle) rule; the result
    /// is reduced to normal form.
    pub fn mul(&self, other: &HCombo) -> HCombo {
        let mut out = HCombo::zero(self.ctx);
        out.free = &self.free * &other.free;
        for (k, v) in &self.hterms {
            out.add_term(k.clone(), &(v * &other.free));
        }
        for (k, v) in &other.hterms {
            out.add_term(k.clone(), &(v * &self.free));
        }
        let mut memo = HashMap::new();
        for (ka, va) in &self.hterms {
            for (kb, vb) in &other.hterms {
                let prod = va * vb;
                if prod.is_zero() {
                    continue;
                }
                for (comp, mult) in stuffle(&ka.0, &kb.0, &mut memo) {
                    out.add_term(Composition(comp), &prod.scale(mult));
                }
            }
        }
        out.reduce()
    }

    /// The substitution w → w^q applied to a normalized combo:
    /// H_b(w^q) = Σ_j (−1)^j w^{b_r+…+b_{r−j+1}} H_{b_1..b_{r−j}}.
    /// Modulo p with q = p this is the p-th power of the combo.
    pub fn frobenius_twist(&self) -> HCombo {
        let q = self.ctx.q() as i64;
        let mut out = HCombo::from_free(self.free.dilate(q));
        for (comp, coeff) in &self.hterms {
            let c = coeff.dilate(q);
            let parts = &comp.0;
            let mut tail = 0i64;
            for j in 0..=parts.len() {
                if j > 0 {
                    tail += parts[parts.len() - j] as i64;
                }
                let mut term = c.shift(tail);
                if j % 2 == 1 {
                    term = term.neg_ref();
                }
                let prefix = &parts[..parts.len() - j];
                if prefix.is_empty() {
                    out.free = &out.free + &term;
                } else {
                    out.add_term(Composition(prefix.to_vec()), &term);
                }
            }
        }
        out
    }

    /// Rewrite every p-divisible part away (Hou's identities).
    pub fn reduce(&self) -> HCombo {
        reduce_impl(self, None)
    }

    /// As `reduce`, also recording every single rewrite as (input, outputs).
    pub fn reduce_traced(&self) -> (HCombo, Vec<(Composition, Vec<Composition>)>) {
        let mut trace = Vec::new();
        let out = reduce_impl(self, Some(&mut trace));
        (out, trace)
    }

    /// Coefficient of w^M (w-units).
    pub fn coeff_at(&self, m: &BigInt) -> Result<Residue> {
        if !self.is_normalized() {
            let bad = self.hterms.keys().find(|c| !c.is_normalized(self.ctx.q())).unwrap();
            return Err(Error::NotNormalized(bad.0.clone()));
        }
        let ctx = self.ctx;
        let mut acc = 0u64;
        if let Some(mi) = m.to_i64() {
            acc = self.free.coeff(mi);
        }
        let q = ctx.q();
        let small = m.to_i128();
        for (comp, poly) in &self.hterms {
            for &(e, a) in poly.terms() {
                let hit = match small {
                    Some(mi) if mi < i128::MAX / 2 => {
                        let r = mi - e as i128;
                        r > 0 && hterm_coeff_u128(&comp.0, r as u128, q as u128)
                    }
                    _ => {
                        let r = m - BigInt::from(e);
                        r > BigInt::zero() && hterm_coeff_big(&comp.0, &r.to_biguint().unwrap(), q)
                    }
                };
                if hit {
                    acc = ctx.add(acc, a);
                }
            }
        }
        Ok(Residue::new(acc, ctx.modulus()))
    }

    /// Coefficient of z^n, i.e. w^{n·D}.
    pub fn coeff_at_z(&self, n: &BigInt) -> Result<Residue> {
        self.coeff_at(&(n * BigInt::from(self.ctx.scale_d)))
    }

    /// Coefficient query in w-units that reports whether the exponent is z-integral.
    pub fn extract_w(&self, m: &BigInt) -> Result<Extracted> {
        let v = self.coeff_at(m)?;
        let d = BigInt::from(self.ctx.scale_d);
        if (m % &d).is_zero() {
            Ok(Extracted::Value(v))
        } else {
            Ok(Extracted::NotZIntegral(v))
        }
    }

    /// Direct enumeration of exponent tuples below `order` (test oracle).
    pub fn to_series(&self, order: i64) -> TruncSeries {
        let mut s = self.free.to_series(order);
        let q = self.ctx.q() as i64;
        for (comp, poly) in &self.hterms {
            let mut exps = Vec::new();
            let lo = poly.min_exp().unwrap_or(0);
            enumerate_exponents(&comp.0, q, order - lo, &mut exps);
            for &(e, a) in poly.terms() {
                for &x in &exps {
                    if x + e < order {
                        s.add_at(x + e, a);
                    }
                }
            }
        }
        s
    }

    pub fn to_json(&self) -> HComboJson {
        HComboJson {
            free: self.free.to_json(),
            terms: self.hterms.iter().map(|(c, v)| HTermJson { comp: c.0.clone(), coeff: v.to_json() }).collect(),
        }
    }

    pub fn from_json(ctx: Context, j: &HComboJson) -> Result<Self> {
        let mut out = HCombo::from_free(LaurentPoly::from_json(ctx, &j.free)?);
        for t in &j.terms {
            out.add_term(Composition::new(t.comp.clone())?, &LaurentPoly::from_json(ctx, &t.coeff)?);
        }
        Ok(out)
    }

    /// Text rendering, highest compositions first, free part last.
    pub fn display(&self, signed: bool) -> String {
        let suffix = if self.ctx.scale_d > 1 { format!("(z^(1/{}))", self.ctx.scale_d) } else { String::new() };
        let mut pieces: Vec<(bool, String)> = Vec::new();
        for (comp, poly) in self.hterms.iter().rev() {
            let (neg, c) = render_coeff(poly, signed);
            let body = if c.is_empty() { format!("{comp}{suffix}") } else { format!("{c} {comp}{suffix}") };
            pieces.push((neg, body));
        }
        if !self.free.is_zero() {
            let (neg, c) = render_coeff(&self.free, signed);
            pieces.push((neg, if c.is_empty() { "1".into() } else { c }));
        }
        if pieces.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (neg, body)) in pieces.into_iter().enumerate() {
            match (i, neg) {
                (0, true) => s.push('-'),
                (0, false) => {}
                (_, true) => s.push_str(" - "),
                (_, false) => s.push_str(" + "),
            }
            s.push_str(&body);
        }
        s
    }
}

/// Split a coefficient into (is_negative, text). A bare coefficient 1 renders
/// empty; multi-term coefficients are parenthesized.
fn render_coeff(poly: &LaurentPoly, signed: bool) -> (bool, String) {
    let ctx = poly.ctx();
    if poly.len() == 1 {
        let (e, c) = poly.terms()[0];
        let v = if signed { ctx.symmetric(c) } else { c as i64 };
        let mono = crate::laurent::zpow(e, ctx.scale_d as i64);
        let mag = v.unsigned_abs();
        let text = match (mag, mono.is_empty()) {
            (1, true) => String::new(),
            (_, true) => mag.to_string(),
            (1, false) => mono,
            _ => format!("{mag} {mono}"),
        };
        return (v < 0, text);
    }
    (false, format!("({})", poly.display(signed)))
}

impl fmt::Display for HCombo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display(false))
    }
}

/// Result of a w-unit coefficient query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extracted {
    Value(Residue),
    /// The exponent is not an integer power of z; the w-coefficient is attached.
    NotZIntegral(Residue),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HTermJson {
    pub comp: Vec<u64>,
    pub coeff: LaurentJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HComboJson {
    pub free: LaurentJson,
    pub terms: Vec<HTermJson>,
}

fn reduce_impl(c: &HCombo, mut trace: Option<&mut Vec<(Composition, Vec<Composition>)>>) -> HCombo {
    let ctx = c.ctx;
    let q = ctx.q();
    let mut out = HCombo::from_free(c.free.clone());
    let mut pending: BTreeMap<Composition, LaurentPoly> = c.hterms.clone();
    let mut steps: u64 = 0;
    let bound = 50_000_000u64;
    while let Some((comp, coeff)) = pending.pop_last() {
        steps += 1;
        assert!(steps < bound, "Hou reduction exceeded its step bound");
        if coeff.is_zero() {
            continue;
        }
        let b = &comp.0;
        let Some(h) = b.iter().rposition(|x| x % q == 0) else {
            out.add_term(comp, &coeff);
            continue;
        };
        let r = b.len();
        let bp = b[h] / q;
        let mut outputs: Vec<(Option<Composition>, LaurentPoly)> = Vec::with_capacity(3);
        // H_{.., b', ..}
        let mut v = b.clone();
        v[h] = bp;
        outputs.push((Some(Composition(v)), coeff.clone()));
        if h > 0 {
            // H_{.., b_{h-1}+b', ..} with position h removed
            let mut v = b.clone();
            v[h - 1] += bp;
            v.remove(h);
            outputs.push((Some(Composition(v)), coeff.clone()));
        }
        if h + 1 < r {
            // −H_{.., b_{h-1}, q b' + b_{h+1}, ..}
            let mut v = b.clone();
            v[h + 1] += b[h];
            v.remove(h);
            outputs.push((Some(Composition(v)), coeff.neg_ref()));
        } else {
            // −w^{b'} H_{b_1..b_{h-1}} (or −w^{b'} when h = r = 1)
            let t = coeff.shift(bp as i64).neg_ref();
            if h == 0 {
                outputs.push((None, t));
            } else {
                outputs.push((Some(Composition(b[..h].to_vec())), t));
            }
        }
        if let Some(tr) = trace.as_deref_mut() {
            tr.push((comp.clone(), outputs.iter().filter_map(|o| o.0.clone()).collect()));
        }
        for (oc, t) in outputs {
            match oc {
                None => out.free = &out.free + &t,
                Some(k) => match pending.get_mut(&k) {
                    Some(e) => *e = &*e + &t,
                    None => {
                        pending.insert(k, t);
                    }
                },
            }
        }
    }
    out
}

/// Quasi-shuffle product of two index words, with multiplicities.
pub fn stuffle(a: &[u64], b: &[u64], memo: &mut HashMap<(Vec<u64>, Vec<u64>), Vec<(Vec<u64>, u64)>>) -> Vec<(Vec<u64>, u64)> {
    if a.is_empty() {
        return vec![(b.to_vec(), 1)];
    }
    if b.is_empty() {
        return vec![(a.to_vec(), 1)];
    }
    let key = (a.to_vec(), b.to_vec());
    if let Some(v) = memo.get(&key) {
        return v.clone();
    }
    let mut acc: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
    let mut push = |head: u64, tail: Vec<(Vec<u64>, u64)>| {
        for (w, m) in tail {
            let mut v = Vec::with_capacity(w.len() + 1);
            v.push(head);
            v.extend(w);
            *acc.entry(v).or_insert(0) += m;
        }
    };
    push(a[0], stuffle(&a[1..], b, memo));
    push(b[0], stuffle(a, &b[1..], memo));
    push(a[0] + b[0], stuffle(&a[1..], &b[1..], memo));
    let v: Vec<(Vec<u64>, u64)> = acc.into_iter().collect();
    memo.insert(key, v.clone());
    v
}

fn enumerate_exponents(parts: &[u64], q: i64, limit: i64, out: &mut Vec<i64>) {
    // choose n_r < n_{r-1} < … from the right
    fn go(parts: &[u64], q: i64, limit: i64, min_n: u32, acc: i64, out: &mut Vec<i64>) {
        let Some((&last, rest)) = parts.split_last() else {
            out.push(acc);
            return;
        };
        let mut n = min_n;
        loop {
            let Some(qn) = q.checked_pow(n) else { break };
            let Some(term) = (last as i64).checked_mul(qn) else { break };
            let total = acc + term;
            if total >= limit {
                break;
            }
            go(rest, q, limit, n + 1, total, out);
            n += 1;
        }
    }
    go(parts, q, limit, 0, 0, out);
}

/// Every composition of K with its multinomial coefficient (unnormalized Φ^K).
pub fn expand_phi_power(ctx: Context, k: u64) -> Result<HCombo> {
    if k == 0 {
        return Ok(HCombo::from_free(LaurentPoly::one(ctx)));
    }
    if k > EXPAND_CAP {
        return Err(Error::OutOfRange(format!("K={k} exceeds the expansion cap {EXPAND_CAP}")));
    }
    let mut out = HCombo::zero(ctx);
    let mut parts = Vec::new();
    fn go(rem: u64, k: u64, parts: &mut Vec<u64>, ctx: Context, out: &mut HCombo) {
        if rem == 0 {
            let c = multinomial_mod(k, parts, ctx.modulus()).expect("parts sum to K");
            out.add_term(Composition(parts.clone()), &LaurentPoly::constant(ctx, c));
            return;
        }
        for b in 1..=rem {
            parts.push(b);
            go(rem - b, k, parts, ctx, out);
            parts.pop();
        }
    }
    go(k, k, &mut parts, ctx, &mut out);
    Ok(out)
}

/// 1 iff M = b_1 q^{n_1}+…+b_r q^{n_r} for some n_1>…>n_r≥0 (greedy from the right).
pub fn hterm_coeff(parts: &[u64], m: &BigUint, q: u64) -> Result<bool> {
    if let Some(bad) = parts.iter().find(|b| *b % q == 0) {
        let _ = bad;
        return Err(Error::NotNormalized(parts.to_vec()));
    }
    if m.is_zero() {
        return Ok(false);
    }
    Ok(match m.to_u128() {
        Some(x) if x < u128::MAX / 2 => hterm_coeff_u128(parts, x, q as u128),
        _ => hterm_coeff_big(parts, m, q),
    })
}

pub(crate) fn hterm_coeff_u128(parts: &[u64], mut m: u128, q: u128) -> bool {
    let mut prev: i64 = -1;
    for &b in parts.iter().rev() {
        if m == 0 {
            return false;
        }
        let n = vp_u128(m, q) as i64;
        if n <= prev {
            return false;
        }
        let Some(sub) = q.checked_pow(n as u32).and_then(|qn| qn.checked_mul(b as u128)) else {
            return false;
        };
        if sub > m {
            return false;
        }
        m -= sub;
        prev = n;
    }
    m == 0
}

pub(crate) fn hterm_coeff_big(parts: &[u64], m: &BigUint, q: u64) -> bool {
    let mut m = m.clone();
    let mut prev: i64 = -1;
    let qb = BigUint::from(q);
    for &b in parts.iter().rev() {
        if m.is_zero() {
            return false;
        }
        let n = vp_biguint(&m, q) as i64;
        if n <= prev {
            return false;
        }
        let sub = qb.pow(n as u32) * b;
        if sub > m {
            return false;
        }
        m -= sub;
        prev = n;
    }
    m.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64, g: u32) -> Context {
        Context::new(p, g, 1).unwrap()
    }

    fn h(c: Context, parts: &[u64]) -> HCombo {
        HCombo::h(c, parts).unwrap()
    }

    fn z(c: Context, e: i64, k: i64) -> LaurentPoly {
        LaurentPoly::from_signed(c, [(e, k)])
    }

    #[test]
    fn hou_examples() {
        let c = ctx(3, 3);
        let r = h(c, &[3]).reduce();
        assert_eq!(r, h(c, &[1]).add(&HCombo::from_free(z(c, 1, -1))));
        let r = h(c, &[1, 3]).reduce();
        let want = h(c, &[1, 1]).add(&h(c, &[2])).sub(&h(c, &[1]).mul_laurent(&z(c, 1, 1)));
        assert_eq!(r, want);
        let r = h(c, &[9]).reduce();
        let want = h(c, &[1]).add(&HCombo::from_free(LaurentPoly::from_signed(c, [(1, -1), (3, -1)])));
        assert_eq!(r, want);
        assert_eq!(r.to_series(100), h(c, &[9]).to_series(100));
    }

    #[test]
    fn phi_powers_small() {
        let c = ctx(3, 5);
        assert_eq!(expand_phi_power(c, 1).unwrap(), h(c, &[1]));
        let two = expand_phi_power(c, 2).unwrap();
        assert_eq!(two, h(c, &[1, 1]).scale(2).add(&h(c, &[2])));
        assert_eq!(two.display(false), "2 H_{1,1} + H_2");
    }

    #[test]
    fn phi_fifth_power_display() {
        let c = ctx(3, 3);
        let r = expand_phi_power(c, 5).unwrap().reduce();
        assert_eq!(r.coeff_of(&[1, 1, 1]), LaurentPoly::constant(c, 60));
        assert_eq!(r.coeff_of(&[5]), LaurentPoly::constant(c, 18));
        assert_eq!(r.num_terms(), 18);
    }

    #[test]
    fn extraction_examples() {
        let m = BigUint::from(3u32).pow(30) + BigUint::from(3u32).pow(29) + BigUint::from(3u32).pow(28);
        assert_eq!(m, BigUint::from(297398301914493u64));
        assert!(hterm_coeff(&[1, 1, 1], &m, 3).unwrap());
        assert!(!hterm_coeff(&[1, 1, 1, 1, 1], &m, 3).unwrap());
        for k in 0..60 {
            assert!(hterm_coeff(&[1], &BigUint::from(3u32).pow(k), 3).unwrap());
        }
        assert!(matches!(hterm_coeff(&[3], &m, 3), Err(Error::NotNormalized(_))));
        let c = ctx(3, 3);
        assert_eq!(h(c, &[1]).coeff_at(&BigInt::from(1)).unwrap().value, 1);
        let sq = h(c, &[1, 1]).scale(2).add(&h(c, &[2]));
        assert_eq!(sq.coeff_at(&BigInt::from(4)).unwrap().value, 2);
    }

    #[test]
    fn coefficient_thirty() {
        let wide = Context::wide(3, 1).unwrap();
        let r = expand_phi_power(wide, 5).unwrap().reduce();
        let m = BigInt::from(297398301914493u64);
        assert_eq!(r.coeff_at(&m).unwrap().signed(), 30);
        let c = ctx(3, 3);
        let r = expand_phi_power(c, 5).unwrap().reduce();
        assert_eq!(r.coeff_at(&m).unwrap().value, 3);
    }

    #[test]
    fn huge_exponent_uses_big_path() {
        let c = ctx(3, 2);
        let m = BigInt::from(BigUint::from(3u32).pow(100) + BigUint::from(3u32).pow(40));
        assert_eq!(h(c, &[1, 1]).coeff_at(&m).unwrap().value, 1);
        assert_eq!(h(c, &[1]).coeff_at(&m).unwrap().value, 0);
    }

    #[test]
    fn series_enumeration() {
        let c = ctx(3, 1);
        assert_eq!(h(c, &[1]).to_series(10).nonzero(), vec![(1, 1), (3, 1), (9, 1)]);
        let x = h(c, &[1]).add(&HCombo::from_free(z(c, 1, -1)));
        assert_eq!(x.to_series(4).nonzero(), vec![(3, 1)]);
    }

    #[test]
    fn stuffle_small() {
        let mut memo = HashMap::new();
        let mut s = stuffle(&[1], &[1], &mut memo);
        s.sort();
        assert_eq!(s, vec![(vec![1, 1], 2), (vec![2], 1)]);
        // H_1^2 as a product equals the expansion of Φ^2
        let c = ctx(5, 3);
        assert_eq!(h(c, &[1]).mul(&h(c, &[1])), expand_phi_power(c, 2).unwrap().reduce());
    }

    #[test]
    fn frobenius_twist_is_pth_power_mod_p() {
        let c = ctx(3, 1);
        let x = h(c, &[2, 1]).add(&h(c, &[1]).mul_laurent(&z(c, 1, 1))).add(&HCombo::from_free(z(c, 0, 2)));
        let cube = x.mul(&x).mul(&x);
        assert_eq!(cube, x.frobenius_twist());
    }

    #[test]
    fn reduce_trace_respects_weight_bound() {
        let c = ctx(3, 4);
        let (_, trace) = h(c, &[3, 6, 1, 9]).reduce_traced();
        assert!(!trace.is_empty());
        for (input, outs) in trace {
            for o in outs {
                assert!(o.len() <= input.len() && o.weight() <= input.weight());
            }
        }
    }

    #[test]
    fn json_shape() {
        let c = ctx(3, 3);
        let x = h(c, &[2, 1]).add(&HCombo::from_free(z(c, 1, 5)));
        let j = serde_json::to_string(&x.to_json()).unwrap();
        assert_eq!(j, r#"{"free":{"scaleD":1,"terms":[[1,5]]},"terms":[{"comp":[2,1],"coeff":{"scaleD":1,"terms":[[0,1]]}}]}"#);
        let back = HCombo::from_json(c, &serde_json::from_str(&j).unwrap()).unwrap();
        assert_eq!(back, x);
    }
}
