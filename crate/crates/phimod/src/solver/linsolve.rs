//! Square linear systems over F_p[w, 1/w] by fraction-free Gauss–Jordan
//! elimination (Bareiss). Every intermediate entry is a minor of the shifted
//! matrix, so each division is exact; the only true denominator left at the
//! end is the determinant.

use super::fpoly::{inv_mod, FpPoly};
use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::modarith::Context;

/// Laurent polynomial mod p → (shift, polynomial) with a(w) = w^shift · poly(w).
fn to_fp(a: &LaurentPoly, shift: i64, p: u64) -> FpPoly {
    let Some(hi) = a.max_exp() else {
        return FpPoly::zero();
    };
    let mut v = vec![0u64; (hi - shift + 1) as usize];
    for &(e, c) in a.terms() {
        v[(e - shift) as usize] = c % p;
    }
    FpPoly::from_vec(v)
}

fn from_fp(ctx: Context, f: &FpPoly, shift: i64) -> LaurentPoly {
    LaurentPoly::from_terms(ctx, f.c.iter().enumerate().map(|(i, &c)| (i as i64 + shift, c)))
}

struct Eliminated {
    /// Reduced augmented matrix (diagonal = ±det' on every row).
    aug: Vec<Vec<FpPoly>>,
    det: FpPoly,
    shifts: Vec<i64>,
}

fn eliminate(m: &[Vec<LaurentPoly>], rhs: &[LaurentPoly], p: u64) -> Result<Eliminated> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) || rhs.len() != n {
        return Err(Error::BadInput("linear_solve needs a square system".into()));
    }
    let mut shifts = Vec::with_capacity(n);
    let mut aug: Vec<Vec<FpPoly>> = Vec::with_capacity(n);
    for (row, c) in m.iter().zip(rhs) {
        let lo = row.iter().chain(std::iter::once(c)).filter_map(|a| a.min_exp()).min().unwrap_or(0);
        shifts.push(lo);
        aug.push(row.iter().chain(std::iter::once(c)).map(|a| to_fp(a, lo, p)).collect());
    }
    let mut prev = FpPoly::constant(1, p);
    let mut sign_flip = false;
    for k in 0..n {
        // smallest-degree nonzero pivot keeps the intermediate degrees low
        let piv = (k..n)
            .filter(|&i| !aug[i][k].is_zero())
            .min_by_key(|&i| aug[i][k].degree())
            .ok_or(Error::Singular)?;
        if piv != k {
            aug.swap(piv, k);
            shifts.swap(piv, k);
            sign_flip = !sign_flip;
        }
        let pivot_row = aug[k].clone();
        let akk = pivot_row[k].clone();
        for (i, row) in aug.iter_mut().enumerate() {
            if i == k {
                continue;
            }
            let aik = row[k].clone();
            for j in 0..=n {
                if j == k {
                    continue;
                }
                let num = akk.mul(&row[j], p).sub(&aik.mul(&pivot_row[j], p), p);
                row[j] = num.div_exact(&prev, p);
            }
            row[k] = FpPoly::zero();
        }
        // rows above k had diagonal prev; they now hold akk
        prev = akk;
    }
    let mut det = prev;
    if sign_flip {
        det = det.scale(p - 1, p);
    }
    Ok(Eliminated { aug, det, shifts })
}

/// det(M) as a Laurent polynomial mod p.
pub fn determinant(ctx: Context, m: &[Vec<LaurentPoly>]) -> Result<LaurentPoly> {
    let p = ctx.p;
    let zero = vec![LaurentPoly::zero(ctx); m.len()];
    match eliminate(m, &zero, p) {
        Ok(e) => Ok(from_fp(ctx, &e.det, e.shifts.iter().sum())),
        Err(Error::Singular) => Ok(LaurentPoly::zero(ctx)),
        Err(e) => Err(e),
    }
}

/// Solve M·x = c over F_p(w), accepting only Laurent-polynomial solutions.
/// `ctx` must have gamma = 1.
pub fn linear_solve(ctx: Context, m: &[Vec<LaurentPoly>], c: &[LaurentPoly]) -> Result<Vec<LaurentPoly>> {
    solve_with_det(ctx, m, c).map(|r| r.0)
}

/// As [`linear_solve`], also returning det(M).
pub fn solve_with_det(
    ctx: Context,
    m: &[Vec<LaurentPoly>],
    c: &[LaurentPoly],
) -> Result<(Vec<LaurentPoly>, LaurentPoly)> {
    let p = ctx.p;
    let e = eliminate(m, c, p)?;
    let det = from_fp(ctx, &e.det, e.shifts.iter().sum());
    let n = m.len();
    let mut x = Vec::with_capacity(n);
    for i in 0..n {
        let d = &e.aug[i][i];
        let num = &e.aug[i][n];
        if num.is_zero() {
            x.push(LaurentPoly::zero(ctx));
            continue;
        }
        let g = num.gcd(d, p);
        let num = num.div_exact(&g, p);
        let den = d.div_exact(&g, p);
        let (k, lead) = den.as_monomial().ok_or(Error::NonLaurent)?;
        let num = num.scale(inv_mod(lead, p), p);
        x.push(from_fp(ctx, &num, -(k as i64)));
    }
    // the elimination is exact, but a cheap residual check guards the shifts
    for (row, ci) in m.iter().zip(c) {
        let mut acc = LaurentPoly::zero(ctx);
        for (a, xi) in row.iter().zip(&x) {
            acc = &acc + &(a * xi);
        }
        if &acc != ci {
            return Err(Error::Singular);
        }
    }
    Ok((x, det))
}

/// M = u·w^k·I for a unit u: solve directly.
pub fn diagonal_monomial(m: &[Vec<LaurentPoly>]) -> Option<LaurentPoly> {
    let first = m.first()?.first()?.clone();
    if first.len() != 1 {
        return None;
    }
    for (i, row) in m.iter().enumerate() {
        for (j, a) in row.iter().enumerate() {
            if (i == j && *a != first) || (i != j && !a.is_zero()) {
                return None;
            }
        }
    }
    Some(first)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Context {
        Context::new(3, 1, 1).unwrap()
    }

    fn lp(terms: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_signed(ctx(), terms.iter().copied())
    }

    #[test]
    fn one_by_one() {
        let x = linear_solve(ctx(), &[vec![lp(&[(1, 1)])]], &[lp(&[(2, 1)])]).unwrap();
        assert_eq!(x, vec![lp(&[(1, 1)])]);
        let x = linear_solve(ctx(), &[vec![lp(&[(3, 2)])]], &[lp(&[(1, 1)])]).unwrap();
        assert_eq!(x, vec![lp(&[(-2, 2)])]);
        assert_eq!(
            linear_solve(ctx(), &[vec![lp(&[(0, 1), (1, 1)])]], &[lp(&[(0, 1)])]),
            Err(Error::NonLaurent)
        );
        assert_eq!(linear_solve(ctx(), &[vec![lp(&[])]], &[lp(&[(0, 1)])]), Err(Error::Singular));
    }

    #[test]
    fn three_by_three() {
        // multiplication by 2t + 2t^2 on F_3(w)[t]/(t^3 − t + w)
        let m = vec![
            vec![lp(&[]), lp(&[(1, -2)]), lp(&[(1, -2)])],
            vec![lp(&[(0, 2)]), lp(&[(0, 2)]), lp(&[(0, 2), (1, -2)])],
            vec![lp(&[(0, 2)]), lp(&[(0, 2)]), lp(&[(0, 2)])],
        ];
        let det = determinant(ctx(), &m).unwrap();
        assert_eq!(det, lp(&[(2, 2)]));
        let want = vec![lp(&[(-1, 1), (0, 1)]), lp(&[(3, 1)]), lp(&[(0, 2)])];
        let c: Vec<LaurentPoly> = m
            .iter()
            .map(|row| row.iter().zip(&want).fold(lp(&[]), |acc, (a, x)| &acc + &(a * x)))
            .collect();
        assert_eq!(linear_solve(ctx(), &m, &c).unwrap(), want);
    }

    #[test]
    fn singular_matrix() {
        let m = vec![vec![lp(&[(0, 1)]), lp(&[(1, 1)])], vec![lp(&[(0, 2)]), lp(&[(1, 2)])]];
        assert_eq!(determinant(ctx(), &m).unwrap(), lp(&[]));
        assert!(linear_solve(ctx(), &m, &[lp(&[(0, 1)]), lp(&[])]).is_err());
    }
}
