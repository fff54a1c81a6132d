//! Dense polynomials over F_p, used by the fraction-free elimination.

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpPoly {
    pub c: Vec<u64>,
}

impl FpPoly {
    pub fn zero() -> Self {
        FpPoly { c: Vec::new() }
    }

    pub fn constant(a: u64, p: u64) -> Self {
        Self::from_vec(vec![a % p])
    }

    pub fn from_vec(mut c: Vec<u64>) -> Self {
        while c.last() == Some(&0) {
            c.pop();
        }
        FpPoly { c }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lead(&self) -> u64 {
        *self.c.last().unwrap_or(&0)
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn low(&self) -> Option<usize> {
        self.c.iter().position(|&x| x != 0)
    }

    /// c·w^k?
    pub fn as_monomial(&self) -> Option<(usize, u64)> {
        let lo = self.low()?;
        (lo + 1 == self.c.len()).then(|| (lo, self.c[lo]))
    }

    pub fn sub(&self, o: &Self, p: u64) -> Self {
        let n = self.c.len().max(o.c.len());
        let mut v = vec![0; n];
        for (i, x) in v.iter_mut().enumerate() {
            let a = self.c.get(i).copied().unwrap_or(0);
            let b = o.c.get(i).copied().unwrap_or(0);
            *x = (a + p - b) % p;
        }
        Self::from_vec(v)
    }

    pub fn mul(&self, o: &Self, p: u64) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut acc = vec![0u128; self.c.len() + o.c.len() - 1];
        let pp = p as u128;
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                acc[i + j] += a as u128 * b as u128;
                if acc[i + j] > u128::MAX / 2 {
                    acc[i + j] %= pp;
                }
            }
        }
        Self::from_vec(acc.into_iter().map(|x| (x % pp) as u64).collect())
    }

    pub fn scale(&self, s: u64, p: u64) -> Self {
        Self::from_vec(self.c.iter().map(|&x| ((x as u128 * s as u128) % p as u128) as u64).collect())
    }

    /// (quotient, remainder)
    pub fn divrem(&self, d: &Self, p: u64) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut r = self.c.clone();
        let dl = d.c.len();
        if r.len() < dl {
            return (Self::zero(), self.clone());
        }
        let inv = inv_mod(d.lead(), p);
        let mut q = vec![0u64; r.len() - dl + 1];
        for k in (0..q.len()).rev() {
            let coef = ((r[k + dl - 1] as u128 * inv as u128) % p as u128) as u64;
            q[k] = coef;
            if coef == 0 {
                continue;
            }
            for (j, &dj) in d.c.iter().enumerate() {
                let t = ((coef as u128 * dj as u128) % p as u128) as u64;
                r[k + j] = (r[k + j] + p - t) % p;
            }
        }
        (Self::from_vec(q), Self::from_vec(r))
    }

    pub fn div_exact(&self, d: &Self, p: u64) -> Self {
        let (q, r) = self.divrem(d, p);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn gcd(&self, o: &Self, p: u64) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b, p);
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let inv = inv_mod(a.lead(), p);
        a.scale(inv, p)
    }
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    // p prime
    let mut r = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % p as u128) as u64;
        }
        b = ((b as u128 * b as u128) % p as u128) as u64;
        e >>= 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divrem_and_gcd() {
        let p = 7;
        let a = FpPoly::from_vec(vec![1, 1]); // 1 + w
        let b = FpPoly::from_vec(vec![6, 0, 1]); // w^2 − 1
        let (q, r) = b.divrem(&a, p);
        assert_eq!(q, FpPoly::from_vec(vec![6, 1]));
        assert!(r.is_zero());
        assert_eq!(a.gcd(&b, p), a);
        assert_eq!(FpPoly::from_vec(vec![0, 0, 3]).as_monomial(), Some((2, 3)));
        assert_eq!(b.as_monomial(), None);
    }
}
