//! Fitting a mod-p base solution Σ a_j(w) Ψ^j, Ψ = Φ^{q^α}, from the series.
//!
//! Modulo p, Ψ = Φ − s_α has degree q over F_p(w), so the coefficients a_j
//! (j < q) are unique; the window only has to be wide enough to hold them.

use super::equation::FunctionalEquation;
use super::lift::verify_base;
use super::series::series_solution;
use crate::laurent::{LaurentPoly, TruncSeries};
use crate::modarith::Context;
use crate::phipoly::PhiPoly;

/// Default exponent window [−2D, q^{α+1}·D] in w-units.
pub fn default_window(eq: &FunctionalEquation, alpha: u32) -> (i64, i64) {
    let d = eq.scale_d as i64;
    (-2 * d, (eq.q() as i64).pow(alpha + 1) * d)
}

/// Row-reduce the augmented system over F_p; returns one solution
/// (free variables at zero) or None if inconsistent.
fn solve_fp(mut rows: Vec<Vec<u64>>, ncols: usize, ctx: &Context) -> Option<Vec<u64>> {
    let p = ctx.p;
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(pr) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = ctx.inv(rows[r][c]).expect("field");
        for x in rows[r].iter_mut() {
            *x = *x * inv % p;
        }
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let f = row[c];
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x = (*x + p * p - f * y % p) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
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

/// Search for a base solution on the given window; `None` if none fits
/// or the fitted candidate fails [`verify_base`].
pub fn find_base(eq: &FunctionalEquation, alpha: u32, window: Option<(i64, i64)>) -> Option<PhiPoly> {
    let ctx = eq.ctx(1).ok()?;
    let (lo, hi) = window.unwrap_or_else(|| default_window(eq, alpha));
    if hi < lo {
        return None;
    }
    let q = eq.q() as usize;
    let qa = (eq.q() as i64).checked_pow(alpha)?;
    let width = (hi - lo + 1) as usize;
    let unknowns = q * width;
    let t_fit = (hi + (eq.q() as i64).pow(alpha + 2) * eq.scale_d as i64).max(3 * unknowns as i64 + lo);
    let target = series_solution(eq, t_fit, ctx).ok()?;

    // Ψ^j to the order needed after shifting by w^lo
    let inner = t_fit - lo;
    let psi = TruncSeries::from_sparse(
        ctx,
        inner,
        std::iter::successors(Some(qa), |&e| e.checked_mul(eq.q() as i64)).take_while(|&e| e < inner).map(|e| (e, 1)),
    );
    let mut powers = vec![LaurentPoly::one(ctx).to_series(inner)];
    for j in 1..q {
        let next = powers[j - 1].mul(&psi);
        powers.push(next);
    }

    let nrows = (t_fit - lo) as usize;
    let mut rows = vec![vec![0u64; unknowns + 1]; nrows];
    for (j, pw) in powers.iter().enumerate() {
        for (e, c) in pw.nonzero() {
            for k in 0..width {
                let t = e + lo + k as i64;
                if t < t_fit {
                    rows[(t - lo) as usize][j * width + k] = c;
                }
            }
        }
    }
    for (i, row) in rows.iter_mut().enumerate() {
        let t = lo + i as i64;
        row[unknowns] = if t < target.low() { 0 } else { target.coeff(t) };
    }
    let x = solve_fp(rows, unknowns, &ctx)?;
    let mut coeffs = vec![LaurentPoly::zero(ctx); (q - 1) * qa as usize + 1];
    for j in 0..q {
        let terms = (0..width).map(|k| (lo + k as i64, x[j * width + k]));
        coeffs[j * qa as usize] = LaurentPoly::from_terms(ctx, terms);
    }
    let base = PhiPoly::from_coeffs(ctx, alpha, coeffs);
    verify_base(eq, &base).then_some(base)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_noncrossing_base() {
        let eq = FunctionalEquation::parse("nc", 3, "F^3 + F^2 - 3*z*F + 2*z^2", 1, 1, &[0.into(), 1.into()]).unwrap();
        let b = find_base(&eq, 1, None).expect("base");
        let ctx = Context::new(3, 1, 1).unwrap();
        // a_0 = s^2 + s = w + w^2, a_3 = 1 − w, a_6 = 1
        assert_eq!(b.coeff(0), LaurentPoly::from_signed(ctx, [(1, 1), (2, 1)]));
        assert_eq!(b.coeff(3), LaurentPoly::from_signed(ctx, [(0, 1), (1, -1)]));
        assert_eq!(b.coeff(6), LaurentPoly::one(ctx));
    }

    #[test]
    fn narrow_window_fails() {
        let eq = FunctionalEquation::parse("nc", 3, "F^3 + F^2 - 3*z*F + 2*z^2", 1, 1, &[0.into(), 1.into()]).unwrap();
        assert!(find_base(&eq, 1, Some((3, 4))).is_none());
    }
}
