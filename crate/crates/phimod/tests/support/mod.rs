//! Property checks shared by the `properties` test target and the acceptance runner.

use num_bigint::{BigInt, BigUint};
use proptest::prelude::*;
use proptest::sample::select;
use proptest::test_runner::{Config, TestRunner};

use phimod::hseries::{hterm_coeff, HCombo};
use phimod::laurent::{frobenius_sum, LaurentPoly};
use phimod::minpoly::{degree_lower_bound, verify_vanishing, verify_vanishing_expanded, BivarPoly, Tree};
use phimod::modarith::{vp_biguint, vp_factorial, Context};
use phimod::PhiPoly;

pub const CASES: u32 = 256;

pub type Check = fn() -> Result<(), String>;

/// Every property, with a short label.
pub const ALL: [(&str, Check); 9] = [
    ("H-reduction preserves the series", h_reduction_preserves_series),
    ("extraction matches enumeration, M ≤ 3^9", extraction_matches_enumeration),
    ("phi_reduce preserves the series", phi_reduce_preserves_series),
    ("Φ^p − Φ + z in the H-basis", power_minus_phi_identity),
    ("Frobenius sum, p ∈ {3,5,7}", frobenius_sum_identity),
    ("Legendre formula, d ≤ 5000", legendre_formula),
    ("degree bound is least", degree_bound_is_least),
    ("structured and expanded vanishing agree", structured_and_expanded_agree),
    ("short monic polynomials never vanish", short_monic_polynomials_never_vanish),
];

fn run<S: Strategy>(strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String> {
    let mut runner = TestRunner::new(Config { cases: CASES, failure_persistence: None, ..Config::default() });
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

fn laurent(ctx: Context, terms: &[(i64, i64)]) -> LaurentPoly {
    LaurentPoly::from_signed(ctx, terms.iter().copied())
}

fn coeffs() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((0i64..6, -40i64..40), 1..4)
}

/// Number of n_1 > … > n_r ≥ 0 with Σ b_i p^{n_i} = m, by brute force over exponents.
fn count_reps(parts: &[u64], m: u64, p: u64) -> u64 {
    // the last part takes the smallest exponent, at least `from`
    fn go(parts: &[u64], m: u64, p: u64, from: u32) -> u64 {
        let Some((&last, rest)) = parts.split_last() else {
            return (m == 0) as u64;
        };
        let mut n = 0;
        for e in from..64 {
            let v = last.saturating_mul(p.saturating_pow(e));
            if v > m {
                break;
            }
            n += go(rest, m - v, p, e + 1);
        }
        n
    }
    go(parts, m, p, 0)
}

fn compositions(n: u64) -> Vec<Vec<u64>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for b in 1..=n {
        for mut rest in compositions(n - b) {
            rest.insert(0, b);
            out.push(rest);
        }
    }
    out
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

pub fn h_reduction_preserves_series() -> Result<(), String> {
    let terms = prop::collection::vec((prop::collection::vec(1u64..=12, 1..=3), coeffs()), 1..=3);
    run((select(vec![2u64, 3, 5]), 1u32..=3, terms), |(p, gamma, terms)| {
        let ctx = Context::new(p, gamma, 1).unwrap();
        let mut c = HCombo::zero(ctx);
        for (parts, co) in &terms {
            c = c.add(&HCombo::h(ctx, parts).unwrap().mul_laurent(&laurent(ctx, co)));
        }
        let r = c.reduce();
        prop_assert!(r.is_normalized());
        let order = 500;
        prop_assert_eq!(r.to_series(order).first_difference(&c.to_series(order)), None);
        Ok(())
    })
}

pub fn extraction_matches_enumeration() -> Result<(), String> {
    let parts = prop::collection::vec(select(vec![1u64, 2, 4, 5, 7, 8, 10, 11]), 1..=4);
    let terms = prop::collection::vec((parts, coeffs()), 1..=3);
    run((1u32..=3, terms, 1u64..=3u64.pow(9)), |(gamma, terms, m)| {
        let p = 3;
        let ctx = Context::new(p, gamma, 1).unwrap();
        let mut c = HCombo::zero(ctx);
        let mut want = 0u64;
        for (parts, co) in &terms {
            let lp = laurent(ctx, co);
            c = c.add(&HCombo::h(ctx, parts).unwrap().mul_laurent(&lp));
            for &(e, a) in lp.terms() {
                if (e as u64) < m {
                    let k = count_reps(parts, m - e as u64, p);
                    want = ctx.add(want, ctx.mul(a, k % ctx.modulus()));
                }
            }
        }
        prop_assert_eq!(c.coeff_at(&BigInt::from(m)).unwrap().value, want);
        for (parts, _) in &terms {
            let single = hterm_coeff(parts, &BigUint::from(m), p).unwrap();
            prop_assert_eq!(single as u64, count_reps(parts, m, p));
        }
        Ok(())
    })
}

pub fn phi_reduce_preserves_series() -> Result<(), String> {
    let seed = prop::collection::vec(coeffs(), 1..=4);
    run((select(vec![2u64, 3, 5]), 0u32..=1, 0usize..=12, seed), |(p, alpha, extra, seed)| {
        let gamma = p.pow(alpha) as u32;
        let ctx = Context::new(p, gamma, 1).unwrap();
        let top = p.pow(alpha + 1) as usize + extra;
        // spread the random coefficients over degrees up to `top`
        let mut cs = vec![LaurentPoly::zero(ctx); top + 1];
        for (i, co) in seed.iter().enumerate() {
            cs[(i * 7919 + extra) % (top + 1)] = laurent(ctx, co);
        }
        cs[top] = laurent(ctx, &seed[0]);
        let f = PhiPoly::from_coeffs(ctx, alpha, cs);
        let r = f.reduce().unwrap();
        prop_assert!(r.degree().map_or(true, |d| d < p.pow(alpha + 1) as usize));
        let order = 300;
        prop_assert_eq!(r.to_series(order).first_difference(&f.to_series(order)), None);
        Ok(())
    })
}

pub fn power_minus_phi_identity() -> Result<(), String> {
    run((select(vec![3u64, 5, 7]), 1u32..=3, coeffs()), |(p, gamma, mult)| {
        let ctx = Context::new(p, gamma, 1).unwrap();
        let c = laurent(ctx, &mult);
        let phi = PhiPoly::phi(ctx, 0);
        let z = PhiPoly::constant(LaurentPoly::monomial(ctx, 1, 1), 0);
        let lhs = phi.pow(p).sub(&phi).add(&z).mul_laurent(&c).to_hcombo();
        let mut rhs = HCombo::zero(ctx);
        for comp in compositions(p).into_iter().filter(|b| b.len() >= 2) {
            let m = factorial(p - 1) / comp.iter().map(|&b| factorial(b)).product::<u64>();
            rhs = rhs.add(&HCombo::h(ctx, &comp).unwrap().scale(ctx.from_i128((p * m) as i128)));
        }
        prop_assert_eq!(lhs, rhs.mul_laurent(&c).reduce());
        Ok(())
    })
}

pub fn frobenius_sum_identity() -> Result<(), String> {
    run((select(vec![3u64, 5, 7]), 1u32..=6, coeffs()), |(p, alpha, a)| {
        let ctx = Context::new(p, 1, 1).unwrap();
        let s = frobenius_sum(ctx, alpha);
        let z = LaurentPoly::monomial(ctx, 1, 1);
        let want = &(&s + &LaurentPoly::monomial(ctx, p.pow(alpha) as i64, 1)) - &z;
        prop_assert_eq!(s.pow(p), want);
        // the map x ↦ x^p on F_p[z] is x(z) ↦ x(z^p)
        let x = laurent(ctx, &a);
        prop_assert_eq!(x.pow(p), x.dilate(p as i64));
        Ok(())
    })
}

pub fn legendre_formula() -> Result<(), String> {
    run((select(vec![2u64, 3, 5, 7, 11, 13, 101, 4999]), 0u64..=5000), |(p, d)| {
        let mut f = BigUint::from(1u32);
        for i in 2..=d {
            f *= i;
        }
        prop_assert_eq!(vp_factorial(d, p), vp_biguint(&f, p) as u64);
        Ok(())
    })
}

pub fn degree_bound_is_least() -> Result<(), String> {
    run((select(vec![2u64, 3, 5, 7]), 1u32..=40), |(p, gamma)| {
        let d = degree_lower_bound(p, gamma);
        prop_assert!(vp_factorial(d, p) >= gamma as u64);
        prop_assert!(vp_factorial(d - 1, p) < gamma as u64);
        Ok(())
    })
}

pub fn structured_and_expanded_agree() -> Result<(), String> {
    let leaf = || prop::collection::vec((-3i64..=3, 0u32..=2, 0u32..=2), 1..=3);
    run((select(vec![2u64, 3]), 1u32..=3, 0u32..=1, leaf(), leaf()), |(p, k, bump, x, y)| {
        // G^k · X + p^k · Y vanishes mod p^k; one more power is a genuine question
        let gamma = k + bump;
        let poly = |v: &[(i64, u32, u32)]| BivarPoly::from_terms(v.iter().map(|&(c, a, b)| (BigInt::from(c), a, b)));
        let g = Tree::parse(&format!("t^{p} - t + z")).unwrap();
        let tree = Tree::Mul(Box::new(g.pow(k)), Box::new(Tree::Poly(poly(&x))))
            .plus(Tree::Poly(poly(&y)).scaled(&BigInt::from(p.pow(k))));
        let structured = verify_vanishing(&tree, p, gamma).unwrap();
        prop_assert_eq!(structured, verify_vanishing_expanded(&tree.expand(), p, gamma).unwrap());
        if bump == 0 {
            prop_assert!(structured);
        }
        Ok(())
    })
}

pub fn short_monic_polynomials_never_vanish() -> Result<(), String> {
    let lower = prop::collection::vec((-9i64..=9, 0u32..=3, 0u32..=5), 0..=4);
    run((select(vec![2u64, 3]), 1u32..=3, lower), |(p, k, lower)| {
        // degree p·k with one more power of p than G^k supplies
        let gamma = k + 1;
        prop_assume!((p * k as u64) < degree_lower_bound(p, gamma));
        let g = BivarPoly::artin_schreier(p).pow(k);
        let top = p as u32 * k;
        let rest = BivarPoly::from_terms(lower.iter().filter(|t| t.2 < top).map(|&(c, a, b)| (BigInt::from(c), a, b)));
        let a = g.add(&rest);
        prop_assert!(a.is_monic());
        prop_assert!(!verify_vanishing_expanded(&a, p, gamma).unwrap());
        Ok(())
    })
}
