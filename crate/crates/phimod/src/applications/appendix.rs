//! Blossom generating function through the Fuß–Catalan series
//! T = z(1+T)^k, checked over the integers.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use super::builtins::blossom_terms;
use super::oracles::{blossom, fuss_catalan};

fn mul(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn pow(a: &[BigInt], e: u64, len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    out[0] = BigInt::one();
    for _ in 0..e {
        out = mul(&out, a, len);
    }
    out
}

/// T_0 … T_{len−1} from the fixed point of T = z(1+T)^k.
pub fn fuss_series(k: u64, len: usize) -> Vec<BigInt> {
    let mut t = vec![BigInt::zero(); len];
    // coefficient n is fixed once T is known below n
    for n in 1..len {
        let mut one_t = t[..n].to_vec();
        one_t[0] += 1;
        let p = pow(&one_t, k, n);
        t[n] = p[n - 1].clone();
    }
    t
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AppendixReport {
    pub k: u64,
    pub order: usize,
    /// T_n = F(n;k) for 1 ≤ n < order.
    pub fuss_ok: bool,
    /// (1+T)(k − (k−1)/2 (1+T)) matches B(n;k) including the constant (k+1)/2.
    pub lemma_ok: bool,
    /// The blossom polynomial vanishes at that series below `order`.
    pub equation_ok: bool,
    pub first_nonzero_residual: Option<usize>,
}

impl AppendixReport {
    pub fn passed(&self) -> bool {
        self.fuss_ok && self.lemma_ok && self.equation_ok
    }
}

pub fn verify_appendix(k: u64, order: usize) -> AppendixReport {
    assert!(k >= 3 && k % 2 == 1, "k must be odd and at least 3");
    let t = fuss_series(k, order);
    let fuss_ok = (1..order).all(|n| t[n] == fuss_catalan(n as u64, k));

    let mut one_t = t.clone();
    one_t[0] += 1;
    let half = BigInt::from((k - 1) / 2);
    let inner: Vec<BigInt> = one_t
        .iter()
        .enumerate()
        .map(|(i, x)| if i == 0 { BigInt::from(k) - &half * x } else { -(&half * x) })
        .collect();
    let b = mul(&one_t, &inner, order);
    let lemma_ok = (0..order).all(|n| b[n] == blossom(n as u64, k));

    let terms = blossom_terms(k).expect("odd k");
    let mut residual = vec![BigInt::zero(); order];
    let mut powers: Vec<Vec<BigInt>> = vec![pow(&b, 0, order)];
    let top = terms.iter().map(|t| t.2).max().unwrap_or(0);
    for _ in 0..top {
        let next = mul(powers.last().unwrap(), &b, order);
        powers.push(next);
    }
    for (c, e, m) in &terms {
        let e = *e as usize;
        for (i, x) in powers[*m as usize].iter().enumerate() {
            if i + e < order {
                residual[i + e] += c * x;
            }
        }
    }
    let first_nonzero_residual = residual.iter().position(|x| !x.is_zero());
    AppendixReport {
        k,
        order,
        fuss_ok,
        lemma_ok,
        equation_ok: first_nonzero_residual.is_none(),
        first_nonzero_residual,
    }
}
