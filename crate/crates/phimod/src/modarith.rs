//! p-adic and modular integer utilities.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// Largest modulus we accept; keeps every product below 2^126.
const MAX_MODULUS: u64 = 1 << 63;

/// Ambient ring data: work modulo `p^gamma` in the variable `w = z^{1/scale_d}`.
///
/// `step_h` selects the Φ-series base `q = p^h`; it is 1 everywhere except the
/// Fuß–Catalan family with h > 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Context {
    pub p: u64,
    pub gamma: u32,
    pub scale_d: u32,
    pub step_h: u32,
    modulus: u64,
}

impl Context {
    pub fn new(p: u64, gamma: u32, scale_d: u32) -> Result<Self> {
        Self::with_step(p, gamma, scale_d, 1)
    }

    pub fn with_step(p: u64, gamma: u32, scale_d: u32, step_h: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::BadInput(format!("{p} is not prime")));
        }
        if gamma == 0 || scale_d == 0 || step_h == 0 {
            return Err(Error::BadInput("gamma, scaleD and step h must be positive".into()));
        }
        let modulus = checked_pow(p, gamma)
            .filter(|&m| m < MAX_MODULUS)
            .ok_or_else(|| Error::OutOfRange(format!("{p}^{gamma} exceeds the 63-bit modulus limit")))?;
        checked_pow(p, step_h).ok_or_else(|| Error::OutOfRange("p^h overflows".into()))?;
        Ok(Context { p, gamma, scale_d, step_h, modulus })
    }

    /// The widest context that still fits a machine word (p^gamma < 2^62).
    /// Used to display "unreduced" integer values through a symmetric lift.
    pub fn wide(p: u64, scale_d: u32) -> Result<Self> {
        let mut gamma = 1;
        while checked_pow(p, gamma + 1).is_some_and(|m| m < (1 << 62)) {
            gamma += 1;
        }
        Self::new(p, gamma, scale_d)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Base of the Φ-series, `q = p^h`.
    pub fn q(&self) -> u64 {
        self.p.pow(self.step_h)
    }

    pub fn with_gamma(&self, gamma: u32) -> Result<Self> {
        Self::with_step(self.p, gamma, self.scale_d, self.step_h)
    }

    pub fn with_scale(&self, scale_d: u32) -> Result<Self> {
        Self::with_step(self.p, self.gamma, scale_d, self.step_h)
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a as u128 + b as u128;
        (s % self.modulus as u128) as u64
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.modulus - (b - a)
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1 % self.modulus;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    pub fn from_i64(&self, x: i64) -> u64 {
        (x as i128).rem_euclid(self.modulus as i128) as u64
    }

    pub fn from_i128(&self, x: i128) -> u64 {
        x.rem_euclid(self.modulus as i128) as u64
    }

    pub fn from_bigint(&self, x: &BigInt) -> u64 {
        let m = BigInt::from(self.modulus);
        x.mod_floor(&m).to_u64().expect("reduced value fits")
    }

    /// Inverse of a unit; `None` when `a` is divisible by p.
    pub fn inv(&self, a: u64) -> Option<u64> {
        let (g, x, _) = ext_gcd(a as i128, self.modulus as i128);
        if g != 1 {
            return None;
        }
        Some(self.from_i128(x))
    }

    /// Representative in (−m/2, m/2].
    pub fn symmetric(&self, a: u64) -> i64 {
        if a > self.modulus / 2 {
            -((self.modulus - a) as i64)
        } else {
            a as i64
        }
    }

    /// p-adic valuation of a residue, capped at gamma for zero.
    pub fn val(&self, a: u64) -> u32 {
        if a == 0 {
            return self.gamma;
        }
        vp_u64(a, self.p)
    }
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

pub fn checked_pow(b: u64, e: u32) -> Option<u64> {
    b.checked_pow(e)
}

/// A residue modulo `modulus`, value in `[0, modulus)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Residue {
    pub value: u64,
    pub modulus: u64,
}

impl Residue {
    pub fn new(value: u64, modulus: u64) -> Self {
        Residue { value: value % modulus, modulus }
    }

    pub fn signed(&self) -> i64 {
        if self.value > self.modulus / 2 {
            -((self.modulus - self.value) as i64)
        } else {
            self.value as i64
        }
    }

    /// Reduce to a smaller modulus dividing this one.
    pub fn reduce_to(&self, m: u64) -> Result<Residue> {
        if m == 0 || self.modulus % m != 0 {
            return Err(Error::BadInput(format!("{m} does not divide {}", self.modulus)));
        }
        Ok(Residue::new(self.value % m, m))
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Deterministic primality for u64 (trial division then Miller–Rabin with a
/// base set known to be exact below 2^64).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % small == 0 {
            return n == small;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mulm = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powm = |mut a: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mulm(r, a);
            }
            a = mulm(a, a);
            e >>= 1;
        }
        r
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powm(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulm(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// p-adic valuation of a nonzero big integer.
pub fn vp(n: &BigInt, p: u64) -> Result<u32> {
    if n.is_zero() {
        return Err(Error::ValuationOfZero);
    }
    Ok(vp_biguint(n.magnitude(), p))
}

pub fn vp_biguint(n: &BigUint, p: u64) -> u32 {
    debug_assert!(!n.is_zero());
    if let Some(x) = n.to_u128() {
        return vp_u128(x, p as u128);
    }
    let pb = BigUint::from(p);
    let mut n = n.clone();
    let mut e = 0;
    loop {
        let (q, r) = n.div_rem(&pb);
        if !r.is_zero() {
            return e;
        }
        n = q;
        e += 1;
    }
}

pub fn vp_u64(mut n: u64, p: u64) -> u32 {
    debug_assert!(n != 0);
    let mut e = 0;
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    e
}

pub fn vp_u128(mut n: u128, p: u128) -> u32 {
    debug_assert!(n != 0);
    let mut e = 0;
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    e
}

pub fn digit_sum(mut d: u64, p: u64) -> u64 {
    let mut s = 0;
    while d > 0 {
        s += d % p;
        d /= p;
    }
    s
}

/// Legendre: v_p(d!) = (d − s_p(d)) / (p − 1).
pub fn vp_factorial(d: u64, p: u64) -> u64 {
    (d - digit_sum(d, p)) / (p - 1)
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut r = BigUint::one();
    for i in 0..k {
        r *= n - i;
        r /= i + 1;
    }
    r
}

pub fn binomial_int(n: &BigInt, k: u64) -> BigInt {
    // generalized binomial with integer top, used by the oracles
    if n.is_negative() {
        let top = BigInt::from(k) - n - 1u32;
        let b = binomial_int(&top, k);
        return if k % 2 == 0 { b } else { -b };
    }
    let n = n.to_u64().expect("binomial top fits u64");
    BigInt::from(binomial(n, k))
}

/// K!/(b_1!⋯b_r!) reduced mod `modulus`, as a product of binomials
/// C(W_j, b_j) with W_j the running weight from the right.
pub fn multinomial_mod(k: u64, parts: &[u64], modulus: u64) -> Result<u64> {
    if parts.iter().sum::<u64>() != k {
        return Err(Error::BadInput(format!("parts {parts:?} do not sum to {k}")));
    }
    let m = BigUint::from(modulus);
    let mut acc = BigUint::one() % &m;
    let mut w = 0;
    for &b in parts.iter().rev() {
        w += b;
        acc = (acc * binomial(w, b)) % &m;
    }
    Ok(acc.to_u64().unwrap())
}

/// Pascal triangle mod m up to row `n`.
#[derive(Clone, Debug)]
pub struct BinomTable {
    rows: Vec<Vec<u64>>,
}

impl BinomTable {
    pub fn new(n: usize, m: u64) -> Self {
        let mut rows: Vec<Vec<u64>> = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let mut row = vec![0u64; i + 1];
            row[0] = 1 % m;
            row[i] = 1 % m;
            for j in 1..i {
                row[j] = ((rows[i - 1][j - 1] as u128 + rows[i - 1][j] as u128) % m as u128) as u64;
            }
            rows.push(row);
        }
        BinomTable { rows }
    }

    #[inline]
    pub fn get(&self, n: u64, k: u64) -> u64 {
        self.rows[n as usize][k as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial_val(d: u64, p: u64) -> u64 {
        let mut f = BigUint::one();
        for i in 2..=d {
            f *= i;
        }
        vp_biguint(&f, p) as u64
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(vp(&BigInt::from(297398301914493u64), 3).unwrap(), 28);
        assert_eq!(vp(&BigInt::from(7), 3).unwrap(), 0);
        assert_eq!(vp(&BigInt::from(54), 3).unwrap(), 3);
        assert_eq!(vp(&BigInt::from(-54), 3).unwrap(), 3);
        assert_eq!(vp(&BigInt::zero(), 3), Err(Error::ValuationOfZero));
        let big = BigUint::from(3u32).pow(80) * 7u32;
        assert_eq!(vp_biguint(&big, 3), 80);
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(vp_factorial(6, 3), 2);
        assert_eq!(vp_factorial(0, 5), 0);
        assert_eq!(vp_factorial(9, 3), 4);
        assert_eq!(digit_sum(8, 3), 4);
        assert_eq!(digit_sum(0, 7), 0);
        for k in 0..10 {
            assert_eq!(digit_sum(5u64.pow(k), 5), 1);
        }
    }

    #[test]
    fn legendre_matches_direct_factorial() {
        for p in [2u64, 3, 5, 7] {
            for d in 0..300 {
                let floor_sum: u64 = (1..).map(|l| d / p.pow(l)).take_while(|&x| x > 0).sum();
                assert_eq!(vp_factorial(d, p), factorial_val(d, p), "d={d} p={p}");
                assert_eq!(vp_factorial(d, p), floor_sum);
            }
        }
    }

    #[test]
    fn multinomials() {
        assert_eq!(multinomial_mod(5, &[2, 1, 1, 1], 27).unwrap(), 6);
        assert_eq!(multinomial_mod(5, &[2, 1, 1, 1], 1_000_000_000).unwrap(), 60);
        assert_eq!(multinomial_mod(5, &[5], 1_000_000_000).unwrap(), 1);
        assert_eq!(multinomial_mod(5, &[1, 1, 1, 1, 1], 1_000_000_000).unwrap(), 120);
        assert!(multinomial_mod(5, &[1, 1], 7).is_err());
        assert_eq!(multinomial_mod(7, &[3, 4], 1000).unwrap(), multinomial_mod(7, &[4, 3], 1000).unwrap());
    }

    #[test]
    fn primes_and_context() {
        let primes: Vec<u64> = (0..40).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(1_000_000_007 * 3));
        assert!(Context::new(4, 1, 1).is_err());
        assert!(Context::new(3, 0, 1).is_err());
        assert!(Context::new(3, 60, 1).is_err());
        let c = Context::new(3, 3, 1).unwrap();
        assert_eq!(c.modulus(), 27);
        assert_eq!(c.inv(2), Some(14));
        assert_eq!(c.inv(3), None);
        assert_eq!(c.symmetric(26), -1);
        let w = Context::wide(3, 1).unwrap();
        assert!(w.modulus() < 1 << 62 && w.modulus() as u128 * 3 >= 1 << 62);
    }

    #[test]
    fn binom_table_matches_biguint() {
        let t = BinomTable::new(40, 1 << 40);
        for n in 0..=40u64 {
            for k in 0..=n {
                let b = binomial(n, k) % BigUint::from(1u64 << 40);
                assert_eq!(BigUint::from(t.get(n, k)), b);
            }
        }
    }

    #[test]
    fn generalized_binomial() {
        assert_eq!(binomial_int(&BigInt::from(-1), 3), BigInt::from(-1));
        assert_eq!(binomial_int(&BigInt::from(-2), 2), BigInt::from(3));
        assert_eq!(binomial_int(&BigInt::from(6), 2), BigInt::from(15));
    }
}
