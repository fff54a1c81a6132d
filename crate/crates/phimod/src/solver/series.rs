//! Undetermined-coefficient recursion for the series solution.
//!
//! With F = F_init + G, val(G) ≥ k (k = number of initial terms) and
//! s = val(∂P/∂F(F_init)) < k, the coefficient of z^{n+s} in P(F) is
//! c·F_n + (terms in F_0..F_{n−1}), c the leading coefficient of ∂P/∂F(F_init).
//! Everything runs in z-units; all w-exponents of the equation are multiples of D.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::equation::FunctionalEquation;
use crate::error::{Error, Result};
use crate::laurent::TruncSeries;
use crate::modarith::{binomial, Context};

/// The coefficient ring of the recursion.
trait Ring: Clone {
    type T: Clone + PartialEq;
    fn zero(&self) -> Self::T;
    fn from_big(&self, x: &BigInt) -> Self::T;
    fn add(&self, a: &Self::T, b: &Self::T) -> Self::T;
    fn mul(&self, a: &Self::T, b: &Self::T) -> Self::T;
    fn neg(&self, a: &Self::T) -> Self::T;
    fn is_zero(&self, a: &Self::T) -> bool;
    /// a / c when c is invertible (or divides a exactly over Z).
    fn div(&self, a: &Self::T, c: &Self::T) -> Option<Self::T>;
    fn invertible(&self, c: &Self::T) -> bool;
}

#[derive(Clone)]
struct ModRing(Context);

impl Ring for ModRing {
    type T = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn from_big(&self, x: &BigInt) -> u64 {
        self.0.from_bigint(x)
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        self.0.add(*a, *b)
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        self.0.mul(*a, *b)
    }
    fn neg(&self, a: &u64) -> u64 {
        self.0.neg(*a)
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn div(&self, a: &u64, c: &u64) -> Option<u64> {
        self.0.inv(*c).map(|i| self.0.mul(*a, i))
    }
    fn invertible(&self, c: &u64) -> bool {
        self.0.inv(*c).is_some()
    }
}

#[derive(Clone)]
struct IntRing;

impl Ring for IntRing {
    type T = BigInt;
    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn from_big(&self, x: &BigInt) -> BigInt {
        x.clone()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn div(&self, a: &BigInt, c: &BigInt) -> Option<BigInt> {
        let (q, r) = a.div_rem(c);
        r.is_zero().then_some(q)
    }
    fn invertible(&self, c: &BigInt) -> bool {
        !c.is_zero()
    }
}

/// Equation rows in z-units: (coefficient, z-exponent) per F-degree.
fn z_rows<R: Ring>(eq: &FunctionalEquation, ring: &R) -> Result<Vec<Vec<(usize, R::T)>>> {
    let d = eq.scale_d as i64;
    let mut rows: Vec<Vec<(usize, R::T)>> = vec![Vec::new(); eq.degree() as usize + 1];
    for t in &eq.terms {
        if t.exp < 0 || t.exp % d != 0 {
            return Err(Error::BadInput("equation exponents must be nonnegative integers in z".into()));
        }
        let c = ring.from_big(&t.coeff);
        if !ring.is_zero(&c) {
            rows[t.deg as usize].push(((t.exp / d) as usize, c));
        }
    }
    Ok(rows)
}

/// Coefficient of z^n in Σ_m rows[m](z)·powers[m].
fn coeff_of<R: Ring>(ring: &R, rows: &[Vec<(usize, R::T)>], powers: &[Vec<R::T>], n: usize) -> R::T {
    let mut acc = ring.zero();
    for (m, row) in rows.iter().enumerate() {
        for (a, c) in row {
            if *a <= n {
                acc = ring.add(&acc, &ring.mul(c, &powers[m][n - a]));
            }
        }
    }
    acc
}

fn solve_generic<R: Ring>(eq: &FunctionalEquation, ring: &R, len: usize) -> Result<Vec<R::T>> {
    let rows = z_rows(eq, ring)?;
    let deg = rows.len() - 1;
    let k = eq.initial.len();
    if k == 0 {
        return Err(Error::BadInput("at least one initial term is required".into()));
    }
    // s and c from ∂P/∂F at the initial polynomial, computed exactly over Z
    // so that a unit leading coefficient is recognised before reduction.
    let int_rows = z_rows(eq, &IntRing)?;
    let width = len.max(k) + k + 2;
    let init_poly: Vec<BigInt> = eq.initial.clone();
    let int_powers = dense_powers(&IntRing, &init_poly, deg, width);
    let mut s = None;
    for n in 0..width {
        let mut acc = BigInt::zero();
        for (m, row) in int_rows.iter().enumerate().skip(1) {
            for (a, c) in row {
                if *a <= n {
                    acc += c * BigInt::from(m) * &int_powers[m - 1][n - a];
                }
            }
        }
        let r = ring.from_big(&acc);
        if !ring.is_zero(&r) {
            s = Some((n, r));
            break;
        }
    }
    let Some((s, c)) = s else {
        return Err(Error::NotUnique);
    };
    if s >= k || !ring.invertible(&c) {
        return Err(Error::NotUnique);
    }
    let total = len.max(k);
    let mut f: Vec<R::T> = eq.initial.iter().map(|x| ring.from_big(x)).collect();
    f.resize(total, ring.zero());
    // powers[m] = (F_{<n})^m truncated at total + s
    let cap = total + s;
    let mut powers: Vec<Vec<R::T>> = dense_powers(ring, &f[..k], deg, cap);
    for n in 0..(k + s).min(cap) {
        if !ring.is_zero(&coeff_of(ring, &rows, &powers, n)) {
            return Err(Error::BadInput(format!("initial terms are inconsistent with the equation at z^{n}")));
        }
    }
    for n in k..total {
        let r = coeff_of(ring, &rows, &powers, n + s);
        let fn_ = ring.div(&ring.neg(&r), &c).ok_or(Error::NotUnique)?;
        if ring.is_zero(&fn_) {
            continue;
        }
        f[n] = fn_.clone();
        add_monomial(ring, &mut powers, &fn_, n, cap);
    }
    for n in 0..cap {
        if !ring.is_zero(&coeff_of(ring, &rows, &powers, n)) {
            return Err(Error::NotUnique);
        }
    }
    f.truncate(len);
    Ok(f)
}

/// Q_m = f^m for m ≤ deg, dense to `cap`.
fn dense_powers<R: Ring>(ring: &R, f: &[R::T], deg: usize, cap: usize) -> Vec<Vec<R::T>> {
    let mut one = vec![ring.zero(); cap];
    if cap > 0 {
        one[0] = ring.from_big(&BigInt::one());
    }
    let mut out = vec![one];
    for m in 1..=deg {
        let prev = &out[m - 1];
        let mut next = vec![ring.zero(); cap];
        for (i, a) in prev.iter().enumerate() {
            if ring.is_zero(a) {
                continue;
            }
            for (j, b) in f.iter().enumerate() {
                if i + j >= cap {
                    break;
                }
                if !ring.is_zero(b) {
                    next[i + j] = ring.add(&next[i + j], &ring.mul(a, b));
                }
            }
        }
        out.push(next);
    }
    out
}

/// Replace F by F + b·z^n in every stored power:
/// (F + b z^n)^m = Σ_j C(m, j) b^j z^{nj} F^{m−j}.
fn add_monomial<R: Ring>(ring: &R, powers: &mut [Vec<R::T>], b: &R::T, n: usize, cap: usize) {
    let old: Vec<Vec<R::T>> = powers.to_vec();
    let deg = powers.len() - 1;
    let mut bpow = vec![ring.from_big(&BigInt::one())];
    for j in 1..=deg {
        bpow.push(ring.mul(&bpow[j - 1], b));
    }
    for m in 1..=deg {
        for j in 1..=m {
            let shift = n * j;
            if shift >= cap {
                break;
            }
            let factor = ring.mul(&ring.from_big(&BigInt::from(binomial(m as u64, j as u64))), &bpow[j]);
            if ring.is_zero(&factor) {
                continue;
            }
            for (i, a) in old[m - j].iter().enumerate().take(cap - shift) {
                if !ring.is_zero(a) {
                    powers[m][i + shift] = ring.add(&powers[m][i + shift], &ring.mul(&factor, a));
                }
            }
        }
    }
}

/// The unique solution in Z/p^γ as a truncated series in w, up to w-order `order`.
pub fn series_solution(eq: &FunctionalEquation, order: i64, ctx: Context) -> Result<TruncSeries> {
    let d = eq.scale_d as i64;
    let len = ((order.max(0) + d - 1) / d) as usize;
    let f = solve_generic(eq, &ModRing(ctx), len)?;
    let terms = f.into_iter().enumerate().map(|(n, c)| (n as i64 * d, c));
    Ok(TruncSeries::from_sparse(ctx, order, terms))
}

/// Exact integer coefficients F_0 … F_{len−1} (z-units). Oracle mode.
pub fn series_solution_exact(eq: &FunctionalEquation, len: usize) -> Result<Vec<BigInt>> {
    solve_generic(eq, &IntRing, len)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nc() -> FunctionalEquation {
        FunctionalEquation::parse("nc", 3, "F^3 + F^2 - 3*z*F + 2*z^2", 1, 1, &[0.into(), 1.into()]).unwrap()
    }

    #[test]
    fn exact_examples() {
        let v = series_solution_exact(&nc(), 5).unwrap();
        assert_eq!(v, [0, 1, 1, 4, 23].map(BigInt::from));
        let k = FunctionalEquation::parse("k", 3, "64*z^2*F^3 + 16*z*F^2 - (72*z-1)*F + 54*z - 1", 2, 1, &[1.into()])
            .unwrap();
        assert_eq!(series_solution_exact(&k, 4).unwrap(), [1, 2, 16, 192].map(BigInt::from));
        let f = FunctionalEquation::parse("f", 3, "z*F^3 - F + 1", 2, 1, &[1.into()]).unwrap();
        assert_eq!(series_solution_exact(&f, 5).unwrap(), [1, 1, 3, 12, 55].map(BigInt::from));
    }

    #[test]
    fn modular_matches_exact() {
        let eq = nc();
        let exact = series_solution_exact(&eq, 40).unwrap();
        let ctx = Context::new(3, 3, 1).unwrap();
        let s = series_solution(&eq, 40, ctx).unwrap();
        for (n, c) in exact.iter().enumerate() {
            assert_eq!(s.coeff(n as i64), ctx.from_bigint(c));
        }
        // scaled: the same numbers sit at w^{2n}
        let k = FunctionalEquation::parse("k", 3, "64*z^2*F^3 + 16*z*F^2 - (72*z-1)*F + 54*z - 1", 2, 1, &[1.into()])
            .unwrap();
        let s = series_solution(&k, 7, Context::new(3, 3, 2).unwrap()).unwrap();
        assert_eq!(s.nonzero(), vec![(0, 1), (2, 2), (4, 16), (6, 192 % 27)]);
    }

    #[test]
    fn bad_initial_terms() {
        let eq = FunctionalEquation::parse("nc", 3, "F^3 + F^2 - 3*z*F + 2*z^2", 1, 1, &[0.into(), 1.into(), 5.into()])
            .unwrap();
        assert!(series_solution_exact(&eq, 5).is_err());
        // F^2 - z has no power series solution pinned by F_0 = 0
        let eq = FunctionalEquation::parse("sq", 3, "F^2 - z", 1, 1, &[0.into()]).unwrap();
        assert_eq!(series_solution_exact(&eq, 5), Err(Error::NotUnique));
    }
}
