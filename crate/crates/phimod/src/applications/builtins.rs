//! Built-in equations with their base-solution families.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::oracles::{self, SequenceOracle, GESSEL_PARAMS};
use crate::error::{Error, Result};
use crate::laurent::{frobenius_sum_w, LaurentPoly};
use crate::modarith::{binomial, Context};
use crate::phipoly::PhiPoly;
use crate::solver::{EqTerm, FunctionalEquation};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BuiltinKind {
    Noncrossing,
    Kreweras,
    FussCatalan { h: u32 },
    Blossom { k: u64 },
    Gessel(u8),
}

/// Optional parameters; defaults are p = 3, h = 1 and k = p.
#[derive(Clone, Copy, Debug, Default)]
pub struct BuiltinParams {
    pub p: Option<u64>,
    pub h: Option<u32>,
    pub k: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct Builtin {
    pub kind: BuiltinKind,
    pub equation: FunctionalEquation,
}

pub const BUILTIN_NAMES: [&str; 9] = [
    "noncrossing",
    "kreweras",
    "fusscatalan",
    "blossom",
    "gessel_f1",
    "gessel_f2",
    "gessel_f3",
    "gessel_f4",
    "gessel_f5",
];

/// Terms (coefficient, z-exponent, F-degree) → equation with w-exponents.
fn equation(name: &str, p: u64, d: u32, h: u32, terms: &[(BigInt, i64, u32)], init: &[i64]) -> FunctionalEquation {
    FunctionalEquation {
        name: name.into(),
        p,
        scale_d: d,
        step_h: h,
        terms: terms
            .iter()
            .filter(|t| !t.0.is_zero())
            .map(|(c, e, m)| EqTerm { coeff: c.clone(), exp: e * d as i64, deg: *m })
            .collect(),
        initial: init.iter().map(|&x| BigInt::from(x)).collect(),
    }
}

fn t(c: i64, e: i64, m: u32) -> (BigInt, i64, u32) {
    (BigInt::from(c), e, m)
}

/// Coefficients of the blossom equation
/// z²B^k + Σ_s c_s z B^s − (−1)^k m^{k−1} B + (−1)^k (k+1)/2 m^{k−1} = 0, m = (k−1)/2,
/// with c_s = (−1)^s (k+1)/((k−s+1)(k−s)) C(k−s+1, s) k^{k−2s+1} m^s.
pub fn blossom_terms(k: u64) -> Result<Vec<(BigInt, i64, u32)>> {
    if k < 3 || k % 2 == 0 {
        return Err(Error::BadInput(format!("blossom needs an odd k ≥ 3, got {k}")));
    }
    let m = BigInt::from((k - 1) / 2);
    let kk = BigInt::from(k);
    let sign = |e: u64| if e % 2 == 0 { BigInt::one() } else { -BigInt::one() };
    let mut out = vec![(BigInt::one(), 2, k as u32)];
    for s in 0..=(k + 1) / 2 {
        let num = sign(s)
            * BigInt::from(k + 1)
            * BigInt::from(binomial(k - s + 1, s))
            * num_traits::pow(kk.clone(), (k + 1 - 2 * s) as usize)
            * num_traits::pow(m.clone(), s as usize);
        let den = BigInt::from((k - s + 1) * (k - s));
        let (c, r) = num.div_rem(&den);
        assert!(r.is_zero(), "blossom coefficient s={s} not integral");
        out.push((c, 1, s as u32));
    }
    let mk = num_traits::pow(m, (k - 1) as usize);
    // k is odd, so (−1)^k = −1
    out.push((mk.clone(), 0, 1));
    out.push((-(BigInt::from((k + 1) / 2) * mk), 0, 0));
    Ok(out)
}

const GESSEL_CUBIC: [(i64, i64); 2] = [(1, 0), (-108, 2)];

fn gessel_equation(i: u8) -> FunctionalEquation {
    let mut terms: Vec<(BigInt, i64, u32)> = GESSEL_CUBIC.iter().map(|&(c, e)| t(c, e, 3)).collect();
    let (extra, init): (Vec<_>, &[i64]) = match i {
        1 => (vec![t(-3, 0, 1), t(2, 0, 0)], &[1, 6]),
        2 => (vec![t(-1, 0, 1), t(-9, 1, 1), t(1, 1, 0)], &[0]),
        3 => (vec![t(-1, 0, 1), t(-9, 1, 1), t(-1, 1, 0)], &[1]),
        4 => (
            vec![t(1, 0, 2), t(-108, 2, 2), t(3, 1, 1), t(-36, 2, 1), t(-4, 2, 0)],
            &[0, 1],
        ),
        _ => (vec![t(-1, 0, 1), t(-8, 1, 0)], &[1]),
    };
    terms.extend(extra);
    equation(&format!("gessel_f{i}"), 3, 1, 1, &terms, init)
}

pub fn builtin(name: &str, params: BuiltinParams) -> Result<Builtin> {
    let p = params.p.unwrap_or(3);
    let h = params.h.unwrap_or(1);
    if !crate::modarith::is_prime(p) {
        return Err(Error::BadInput(format!("{p} is not prime")));
    }
    let (kind, eq) = match name {
        "noncrossing" => (
            BuiltinKind::Noncrossing,
            equation(name, p, 1, 1, &[t(1, 0, 3), t(1, 0, 2), t(-3, 1, 1), t(2, 2, 0)], &[0, 1]),
        ),
        "kreweras" => (
            BuiltinKind::Kreweras,
            equation(
                name,
                p,
                2,
                1,
                &[t(64, 2, 3), t(16, 1, 2), t(-72, 1, 1), t(1, 0, 1), t(54, 1, 0), t(-1, 0, 0)],
                &[1],
            ),
        ),
        "fusscatalan" => {
            let q = crate::modarith::checked_pow(p, h).ok_or_else(|| Error::OutOfRange("p^h overflows".into()))?;
            let d = u32::try_from(q - 1).map_err(|_| Error::OutOfRange("p^h too large".into()))?;
            (
                BuiltinKind::FussCatalan { h },
                equation(name, p, d, h, &[t(1, 1, q as u32), t(-1, 0, 1), t(1, 0, 0)], &[1]),
            )
        }
        "blossom" => {
            let k = params.k.unwrap_or(p);
            if p == 2 || k % p == 1 {
                return Err(Error::BadInput(format!(
                    "blossom k={k} is not uniquely determined modulo {p} (needs k ≢ 1 mod p, p odd)"
                )));
            }
            let terms = blossom_terms(k)?;
            let d = (p - 1) as u32;
            (BuiltinKind::Blossom { k }, equation(name, p, d, 1, &terms, &[((k + 1) / 2) as i64]))
        }
        g if g.starts_with("gessel_f") => {
            let i: u8 = g[8..]
                .parse()
                .ok()
                .filter(|i| (1..=5).contains(i))
                .ok_or_else(|| Error::BadInput(format!("unknown builtin {name}")))?;
            if p != 3 {
                return Err(Error::BadInput("the Gessel-sum equations are set up for p = 3".into()));
            }
            (BuiltinKind::Gessel(i), gessel_equation(i))
        }
        _ => {
            return Err(Error::BadInput(format!(
                "unknown builtin {name}; expected one of {}",
                BUILTIN_NAMES.join(", ")
            )))
        }
    };
    Ok(Builtin { kind, equation: eq })
}

impl Builtin {
    fn ctx(&self) -> Context {
        self.equation.ctx(1).expect("builtin context")
    }

    /// Three-term base a_0 + a_1 Ψ + a_2 Ψ², Ψ = Φ^{q^α}.
    fn quadratic(&self, alpha: u32, a: [LaurentPoly; 3]) -> PhiPoly {
        let qa = (self.equation.q() as usize).pow(alpha);
        let ctx = self.ctx();
        let mut c = vec![LaurentPoly::zero(ctx); 2 * qa + 1];
        let [a0, a1, a2] = a;
        c[0] = a0;
        c[qa] = a1;
        c[2 * qa] = a2;
        PhiPoly::from_coeffs(ctx, alpha, c)
    }

    /// The known mod-p base solution for this α, when one is tabulated.
    /// Returns None for parameter choices without a closed-form base
    /// (use [`crate::solver::find_base`] there).
    pub fn base(&self, alpha: u32) -> Option<PhiPoly> {
        let ctx = self.ctx();
        let p = ctx.p;
        let s = frobenius_sum_w(ctx, alpha);
        let one = LaurentPoly::one(ctx);
        let zero = LaurentPoly::zero(ctx);
        let wm2 = LaurentPoly::monomial(ctx, -2, 1);
        let nc = |b: &Builtin| b.quadratic(alpha, [&(&s * &s) + &s, &one - &s, one.clone()]);
        Some(match self.kind {
            BuiltinKind::Noncrossing if p == 3 => nc(self),
            BuiltinKind::Kreweras if p == 3 => {
                self.quadratic(alpha, [&(&s * &s) * &wm2, -&(&s * &wm2), wm2.clone()])
            }
            BuiltinKind::FussCatalan { .. } => {
                let q = ctx.q() as i64;
                let a0 = LaurentPoly::from_terms(ctx, (0..alpha).map(|k| (q.pow(k) - 1, 1)));
                let qa = (q as usize).pow(alpha);
                let mut c = vec![zero; qa + 1];
                c[0] = a0;
                c[qa] = LaurentPoly::monomial(ctx, -1, 1);
                PhiPoly::from_coeffs(ctx, alpha, c)
            }
            BuiltinKind::Blossom { k } if k == p => {
                let half = ctx.inv(2)?;
                self.quadratic(alpha, [(&(&s * &s) * &wm2).scale(half), &s * &wm2, wm2.scale(half)])
            }
            BuiltinKind::Gessel(i) => {
                let psi = |sign: u64, constant: u64| {
                    let a0 = &s.scale(sign) + &LaurentPoly::constant(ctx, constant);
                    let qa = 3usize.pow(alpha);
                    let mut c = vec![LaurentPoly::zero(ctx); qa + 1];
                    c[0] = a0;
                    c[qa] = LaurentPoly::constant(ctx, sign);
                    PhiPoly::from_coeffs(ctx, alpha, c)
                };
                match i {
                    1 => PhiPoly::constant(one.clone(), alpha),
                    2 => psi(1, 0),
                    3 => psi(2, 1),
                    4 => nc(self),
                    _ => psi(1, 1),
                }
            }
            _ => return None,
        })
    }

    /// Ground truth for the coefficients of this equation's solution.
    pub fn oracle(&self) -> SequenceOracle {
        match self.kind {
            BuiltinKind::Noncrossing => SequenceOracle::closed("noncrossing", 0, oracles::noncrossing_sum),
            BuiltinKind::Kreweras => SequenceOracle::closed("kreweras", 0, oracles::kreweras),
            BuiltinKind::FussCatalan { .. } => {
                let k = self.equation.q();
                SequenceOracle::closed("fusscatalan", 0, move |n| oracles::fuss_catalan(n, k))
            }
            BuiltinKind::Blossom { k } => SequenceOracle::closed("blossom", 0, move |n| oracles::blossom(n, k)),
            BuiltinKind::Gessel(i) => {
                let (a, b, c) = GESSEL_PARAMS[i as usize - 1];
                let name = format!("gessel_f{i}");
                match i {
                    // the printed f2 equation is solved by −H(−z)
                    2 => SequenceOracle::closed(&name, 0, move |n| {
                        let v = oracles::gessel_h(a, b, c, n);
                        if n % 2 == 1 {
                            v
                        } else {
                            -v
                        }
                    }),
                    5 => SequenceOracle::closed(&name, 1, move |n| oracles::gessel_h(a, b, c, n)),
                    _ => SequenceOracle::closed(&name, 0, move |n| oracles::gessel_h(a, b, c, n)),
                }
            }
        }
    }

    /// Exact integer recursion of the equation itself.
    pub fn series_oracle(&self) -> SequenceOracle {
        SequenceOracle::series(&format!("{} (series)", self.equation.name), self.equation.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{series_solution_exact, verify_base};

    fn b(name: &str) -> Builtin {
        builtin(name, BuiltinParams::default()).unwrap()
    }

    #[test]
    fn blossom_three() {
        let terms = blossom_terms(3).unwrap();
        let mut got: Vec<(i64, i64, u32)> =
            terms.iter().filter(|t| !t.0.is_zero()).map(|(c, e, m)| (c.try_into().unwrap(), *e, *m)).collect();
        got.sort();
        let mut want = vec![(1, 2, 3), (2, 1, 2), (-18, 1, 1), (27, 1, 0), (1, 0, 1), (-2, 0, 0)];
        want.sort();
        assert_eq!(got, want);
        assert!(blossom_terms(4).is_err());
        assert!(builtin("blossom", BuiltinParams { p: Some(3), k: Some(7), h: None }).is_err());
    }

    #[test]
    fn bases_verify() {
        for name in BUILTIN_NAMES {
            let bi = b(name);
            for alpha in 0..3 {
                let base = bi.base(alpha).unwrap();
                assert!(verify_base(&bi.equation, &base), "{name} alpha={alpha}");
            }
        }
        for p in [5u64, 7] {
            for name in ["fusscatalan", "blossom"] {
                let bi = builtin(name, BuiltinParams { p: Some(p), ..Default::default() }).unwrap();
                for alpha in 0..2 {
                    assert!(verify_base(&bi.equation, &bi.base(alpha).unwrap()), "{name} p={p} alpha={alpha}");
                }
            }
        }
        let fc = builtin("fusscatalan", BuiltinParams { p: Some(3), h: Some(2), k: None }).unwrap();
        for alpha in 0..2 {
            assert!(verify_base(&fc.equation, &fc.base(alpha).unwrap()), "h=2 alpha={alpha}");
        }
    }

    #[test]
    fn series_match_oracles() {
        let mut names: Vec<(Builtin, usize)> = BUILTIN_NAMES.iter().map(|n| (b(n), 60)).collect();
        names.push((builtin("blossom", BuiltinParams { p: Some(3), k: Some(5), h: None }).unwrap(), 60));
        names.push((builtin("fusscatalan", BuiltinParams { p: Some(2), h: Some(2), k: None }).unwrap(), 60));
        for (bi, len) in names {
            let s = series_solution_exact(&bi.equation, len).unwrap();
            let o = bi.oracle();
            let want = o.terms(len as u64 - 1).unwrap();
            for n in o.start as usize..len {
                assert_eq!(s[n], want[n], "{} n={n}", bi.equation.name);
            }
        }
    }

    #[test]
    fn gessel_f5_constant_differs() {
        let bi = b("gessel_f5");
        let s = series_solution_exact(&bi.equation, 2).unwrap();
        assert_eq!(s[0], BigInt::one());
        assert_eq!(oracles::gessel_h(0, 1, 1, 0), BigInt::zero());
    }

    #[test]
    fn blossom_constant_term() {
        let bi = b("blossom");
        assert_eq!(series_solution_exact(&bi.equation, 1).unwrap()[0], BigInt::from(2));
    }
}
