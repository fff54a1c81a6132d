//! Exact integer sequences used as ground truth.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::Result;
use crate::modarith::binomial;
use crate::solver::{series_solution_exact, FunctionalEquation};

fn binom(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        BigInt::zero()
    } else {
        BigInt::from(binomial(n as u64, k as u64))
    }
}

fn exact_div(num: BigInt, den: BigInt, what: &str) -> BigInt {
    let (q, r) = num.div_rem(&den);
    assert!(r.is_zero(), "{what}: non-integral term");
    q
}

/// N_n = (1/(n−1)) Σ_{i=n−2}^{2n−4} C(3n−3, n+i+1) C(i, n−2), with N_0 = 0, N_1 = 1.
pub fn noncrossing_sum(n: u64) -> BigInt {
    match n {
        0 => BigInt::zero(),
        1 => BigInt::one(),
        _ => {
            let n = n as i64;
            let s: BigInt = (n - 2..=2 * n - 4).map(|i| binom(3 * n - 3, n + i + 1) * binom(i, n - 2)).sum();
            exact_div(s, BigInt::from(n - 1), "N_n")
        }
    }
}

/// K_n = 4^n / ((n+1)(2n+1)) · C(3n, n).
pub fn kreweras(n: u64) -> BigInt {
    let num = (BigInt::one() << (2 * n)) * BigInt::from(binomial(3 * n, n));
    exact_div(num, BigInt::from((n + 1) * (2 * n + 1)), "K_n")
}

/// F(n;k) = (1/n) C(kn, n−1), with F(0;k) = 1 (the constant of the
/// generating function solving z f^k − f + 1 = 0).
pub fn fuss_catalan(n: u64, k: u64) -> BigInt {
    if n == 0 {
        return BigInt::one();
    }
    exact_div(BigInt::from(binomial(k * n, n - 1)), BigInt::from(n), "F(n;k)")
}

/// B(n;k) = (k+1) C(kn, n−1) / (n((k−1)n+2)), with B(0;k) = (k+1)/2.
pub fn blossom(n: u64, k: u64) -> BigInt {
    if n == 0 {
        return exact_div(BigInt::from(k + 1), BigInt::from(2), "B(0;k)");
    }
    let num = BigInt::from(k + 1) * BigInt::from(binomial(k * n, n - 1));
    exact_div(num, BigInt::from(n) * BigInt::from((k - 1) * n + 2), "B(n;k)")
}

/// B(n;k) = (1/n)(C(kn, n−1) − (k−1) C(kn, n−2)), n ≥ 1.
pub fn blossom_difference_form(n: u64, k: u64) -> BigInt {
    if n == 0 {
        return blossom(0, k);
    }
    let kn = (k * n) as i64;
    let n = n as i64;
    let num = binom(kn, n - 1) - BigInt::from(k - 1) * binom(kn, n - 2);
    exact_div(num, BigInt::from(n), "B(n;k)")
}

/// h_{j,k,l}(n) = Σ_{i=n−l}^{2n+j−k} C(3n+j, n+i+k) C(i, n−l).
pub fn gessel_h(j: i64, k: i64, l: i64, n: u64) -> BigInt {
    let n = n as i64;
    (n - l..=2 * n + j - k).map(|i| binom(3 * n + j, n + i + k) * binom(i, n - l)).sum()
}

/// (j, k, l) for f_1 … f_5.
pub const GESSEL_PARAMS: [(i64, i64, i64); 5] = [(1, 1, 0), (0, 1, 0), (0, 0, 0), (-1, 1, 1), (0, 1, 1)];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    SeriesRecursion,
}

type TermFn = Arc<dyn Fn(u64) -> BigInt + Send + Sync>;

#[derive(Clone)]
enum Source {
    Closed(TermFn),
    Series(Box<FunctionalEquation>),
}

/// A named exact sequence. Comparisons start at index `start`.
#[derive(Clone)]
pub struct SequenceOracle {
    pub name: String,
    pub provenance: Provenance,
    pub start: u64,
    source: Source,
}

impl std::fmt::Debug for SequenceOracle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SequenceOracle")
            .field("name", &self.name)
            .field("provenance", &self.provenance)
            .field("start", &self.start)
            .finish()
    }
}

impl SequenceOracle {
    pub fn closed(name: &str, start: u64, f: impl Fn(u64) -> BigInt + Send + Sync + 'static) -> Self {
        SequenceOracle { name: name.into(), provenance: Provenance::ClosedForm, start, source: Source::Closed(Arc::new(f)) }
    }

    /// Exact integer series recursion of an equation.
    pub fn series(name: &str, eq: FunctionalEquation) -> Self {
        SequenceOracle {
            name: name.into(),
            provenance: Provenance::SeriesRecursion,
            start: 0,
            source: Source::Series(Box::new(eq)),
        }
    }

    pub fn starting_at(mut self, start: u64) -> Self {
        self.start = start;
        self
    }

    /// Terms 0..=n_max (entries below `start` are whatever the source gives).
    pub fn terms(&self, n_max: u64) -> Result<Vec<BigInt>> {
        match &self.source {
            Source::Closed(f) => Ok((0..=n_max).into_par_iter().map(|n| f(n)).collect()),
            Source::Series(eq) => series_solution_exact(eq, n_max as usize + 1),
        }
    }
}

/// Terms of a named sequence: noncrossing, kreweras, fusscatalan (k = p^h),
/// blossom (k), gessel_f1 … gessel_f5 (the sums h_{j,k,l}).
pub fn oracle_terms(name: &str, k: u64, n_max: u64) -> Result<Vec<BigInt>> {
    let f: Box<dyn Fn(u64) -> BigInt + Sync> = match name {
        "noncrossing" => Box::new(noncrossing_sum),
        "kreweras" => Box::new(kreweras),
        "fusscatalan" => Box::new(move |n| fuss_catalan(n, k)),
        "blossom" => Box::new(move |n| blossom(n, k)),
        g if g.starts_with("gessel_f") => {
            let i: usize = g[8..].parse().ok().filter(|i| (1..=5).contains(i)).ok_or_else(|| {
                crate::error::Error::BadInput(format!("unknown sequence {name}"))
            })?;
            let (a, b, c) = GESSEL_PARAMS[i - 1];
            Box::new(move |n| gessel_h(a, b, c, n))
        }
        _ => return Err(crate::error::Error::BadInput(format!("unknown sequence {name}"))),
    };
    Ok((0..=n_max).into_par_iter().map(|n| f(n)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn small_values() {
        assert_eq!((0..6).map(noncrossing_sum).collect::<Vec<_>>(), ints(&[0, 1, 1, 4, 23, 156]));
        assert_eq!((0..4).map(kreweras).collect::<Vec<_>>(), ints(&[1, 2, 16, 192]));
        assert_eq!((1..4).map(|n| fuss_catalan(n, 3)).collect::<Vec<_>>(), ints(&[1, 3, 12]));
        // B(1;k) = (k+1)/(k+1) = 1; the value 2 is B(2;3) and the constant B(0;3)
        assert_eq!((0..4).map(|n| blossom(n, 3)).collect::<Vec<_>>(), ints(&[2, 1, 2, 6]));
        assert_eq!((0..5).map(|n| gessel_h(1, 1, 0, n)).collect::<Vec<_>>(), ints(&[1, 6, 48, 420, 3840]));
        assert_eq!((0..5).map(|n| gessel_h(0, 1, 0, n)).collect::<Vec<_>>(), ints(&[0, 1, 9, 82, 765]));
    }

    #[test]
    fn blossom_forms_agree() {
        for k in [3u64, 5, 7, 9] {
            for n in 0..120 {
                assert_eq!(blossom(n, k), blossom_difference_form(n, k), "k={k} n={n}");
            }
        }
    }

    #[test]
    fn noncrossing_sum_matches_recursion() {
        let eq = FunctionalEquation::parse("nc", 3, "F^3 + F^2 - 3*z*F + 2*z^2", 1, 1, &[0.into(), 1.into()]).unwrap();
        let s = SequenceOracle::series("N", eq).terms(150).unwrap();
        let c = oracle_terms("noncrossing", 0, 150).unwrap();
        assert_eq!(s, c);
    }
}
