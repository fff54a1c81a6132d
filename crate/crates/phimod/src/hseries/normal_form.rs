//! Normal form of Φ^K without enumerating all 2^{K−1} compositions first.
//!
//! Compositions are generated right to left. The multinomial K!/∏b_j! is the
//! product of C(W_j, b_j) with W_j the weight from b_j to the right end, so
//! each part contributes its factor the moment it is chosen. Hou's rewrite of
//! the rightmost q-divisible part only touches that part, its left neighbour
//! (still unchosen) and its right neighbour (the first finished output part),
//! so the left portion can be solved independently of the finished suffix and
//! memoized on (remaining weight, pending part, has-right-neighbour). Each
//! memo entry lists (output prefix, amount added to the right neighbour,
//! w-exponent) with its coefficient; zero coefficients are dropped as soon as
//! they appear.

use std::collections::HashMap;
use std::rc::Rc;
use std::sync::{Arc, Mutex, OnceLock};

use super::{Composition, HCombo};
use crate::laurent::LaurentPoly;
use crate::modarith::{BinomTable, Context};

type Key = (Vec<u64>, u64, u64);
type Table = HashMap<Key, u64>;

/// (composition, w-exponent, coefficient); an empty composition is the free part.
pub type Entries = Arc<Vec<(Vec<u64>, i64, u64)>>;

struct Dp {
    k: u64,
    q: u64,
    m: u64,
    binom: BinomTable,
    pending: HashMap<(u64, u64, bool), Rc<Table>>,
    next: HashMap<(u64, bool), Rc<Table>>,
}

impl Dp {
    fn addmul(&self, dst: &mut Table, key: Key, c: u64, f: u64) {
        let v = ((c as u128 * f as u128) % self.m as u128) as u64;
        if v == 0 {
            return;
        }
        let e = dst.entry(key).or_insert(0);
        *e = ((*e as u128 + v as u128) % self.m as u128) as u64;
    }

    /// Choose the next original part to the left of the finished region.
    fn next(&mut self, rem: u64, right: bool) -> Rc<Table> {
        if let Some(t) = self.next.get(&(rem, right)) {
            return t.clone();
        }
        let mut out = Table::new();
        if rem == 0 {
            out.insert((Vec::new(), 0, 0), 1 % self.m);
        } else {
            let w = self.k - rem;
            for y in 1..=rem {
                let f = self.binom.get(w + y, y);
                if f == 0 {
                    continue;
                }
                let sub = self.part(rem - y, y, right);
                for (key, &c) in sub.iter() {
                    self.addmul(&mut out, key.clone(), c, f);
                }
            }
        }
        out.retain(|_, c| *c != 0);
        let rc = Rc::new(out);
        self.next.insert((rem, right), rc.clone());
        rc
    }

    /// Process the pending part x with `rem` weight still unchosen to its left.
    fn part(&mut self, rem: u64, x: u64, right: bool) -> Rc<Table> {
        if let Some(t) = self.pending.get(&(rem, x, right)) {
            return t.clone();
        }
        let mut out = Table::new();
        let m = self.m;
        if x % self.q != 0 {
            let sub = self.next(rem, true);
            for ((prefix, delta, e), &c) in sub.iter() {
                let mut v = prefix.clone();
                v.push(x + delta);
                self.addmul(&mut out, (v, 0, *e), c, 1);
            }
        } else {
            let b = x / self.q;
            let same = self.part(rem, b, right);
            for (key, &c) in same.iter() {
                self.addmul(&mut out, key.clone(), c, 1);
            }
            let w = self.k - rem;
            for y in 1..=rem {
                let f = self.binom.get(w + y, y);
                if f == 0 {
                    continue;
                }
                let merged = self.part(rem - y, y + b, right);
                for (key, &c) in merged.iter() {
                    self.addmul(&mut out, key.clone(), c, f);
                }
            }
            let minus = m - 1 % m;
            let sub = self.next(rem, right);
            for ((prefix, delta, e), &c) in sub.iter() {
                let key = if right { (prefix.clone(), delta + x, *e) } else { (prefix.clone(), 0, e + b) };
                self.addmul(&mut out, key, c, minus);
            }
        }
        out.retain(|_, c| *c != 0);
        let rc = Rc::new(out);
        self.pending.insert((rem, x, right), rc.clone());
        rc
    }
}

fn compute(q: u64, m: u64, k: u64) -> Vec<(Vec<u64>, i64, u64)> {
    if k == 0 {
        return vec![(Vec::new(), 0, 1 % m)];
    }
    let mut dp = Dp {
        k,
        q,
        m,
        binom: BinomTable::new(k as usize, m),
        pending: HashMap::new(),
        next: HashMap::new(),
    };
    let top = dp.next(k, false);
    let mut v: Vec<(Vec<u64>, i64, u64)> =
        top.iter().map(|((prefix, _, e), &c)| (prefix.clone(), *e as i64, c)).collect();
    v.sort();
    v
}

type CacheKey = (u64, u64, u64);

fn cache() -> &'static Mutex<HashMap<CacheKey, Entries>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Entries>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Normal-form entries of Φ^K for base q modulo m, memoized process-wide.
pub fn phi_power_entries(q: u64, m: u64, k: u64) -> Entries {
    let key = (q, m, k);
    if let Some(e) = cache().lock().unwrap().get(&key) {
        return e.clone();
    }
    let e = Arc::new(compute(q, m, k));
    cache().lock().unwrap().insert(key, e.clone());
    e
}

/// reduce(expand_phi_power(K)) computed by the memoized right-to-left DP.
pub fn normal_form_phi_power(ctx: Context, k: u64) -> HCombo {
    let entries = phi_power_entries(ctx.q(), ctx.modulus(), k);
    let mut out = HCombo::zero(ctx);
    let mut free = Vec::new();
    let mut merged: HashMap<&[u64], Vec<(i64, u64)>> = HashMap::new();
    for (comp, e, c) in entries.iter() {
        if comp.is_empty() {
            free.push((*e, *c));
        } else {
            merged.entry(comp.as_slice()).or_default().push((*e, *c));
        }
    }
    for (comp, terms) in merged {
        out.hterms.insert(Composition(comp.to_vec()), LaurentPoly::from_terms(ctx, terms));
    }
    out.free = LaurentPoly::from_terms(ctx, free);
    out
}

#[cfg(test)]
mod tests {
    use super::super::expand_phi_power;
    use super::*;

    #[test]
    fn dp_matches_enumeration() {
        for (p, g, h) in [(2u64, 5u32, 1u32), (3, 3, 1), (3, 6, 1), (5, 2, 1), (5, 4, 1), (3, 4, 2), (7, 2, 1)] {
            let ctx = Context::with_step(p, g, 1, h).unwrap();
            for k in 1..=13 {
                let slow = expand_phi_power(ctx, k).unwrap().reduce();
                let fast = normal_form_phi_power(ctx, k);
                assert_eq!(fast, slow, "p={p} gamma={g} h={h} K={k}");
            }
        }
    }

    #[test]
    fn zeroth_power_is_one() {
        let ctx = Context::new(3, 2, 1).unwrap();
        assert_eq!(normal_form_phi_power(ctx, 0), HCombo::from_free(LaurentPoly::one(ctx)));
    }
}
