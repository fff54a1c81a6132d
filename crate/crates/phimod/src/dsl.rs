//! Tiny polynomial expression language: integers, two variables, + − * ^ and
//! parentheses. Shared by the equation parser (z, F) and the minimal
//! polynomial tools (z, t).

use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    /// Variable by position in the parser's variable list.
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
}

/// Bivariate integer polynomial: (exp of var 0, exp of var 1) → coefficient.
pub type Poly2 = BTreeMap<(u32, u32), BigInt>;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            out.push(Tok::Num(digits.parse().unwrap()));
        } else if c.is_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if c == '*' && chars.get(i + 1) == Some(&'*') {
            out.push(Tok::Op('^'));
            i += 2;
        } else if "+-*^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else if c == '−' {
            out.push(Tok::Op('-'));
            i += 1;
        } else if c == '\'' || c == '′' {
            return Err(Error::BadInput("derivative terms (F', F'', ...) are not supported; only algebraic equations".into()));
        } else {
            return Err(Error::BadInput(format!("unexpected character '{c}' in polynomial")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    vars: &'a [&'a str],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if c == '+' { Expr::Add(lhs.into(), rhs.into()) } else { Expr::Sub(lhs.into(), rhs.into()) };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Op('*')) => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    lhs = Expr::Mul(lhs.into(), rhs.into());
                }
                // implicit multiplication: "3z", "2(F+1)", "z F"
                Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::Op('(')) => {
                    let rhs = self.power()?;
                    lhs = Expr::Mul(lhs.into(), rhs.into());
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(Expr::Neg(self.unary()?.into()))
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            let e = match self.toks.get(self.pos).cloned() {
                Some(Tok::Num(n)) => n,
                Some(Tok::Op('(')) => {
                    // allow ^(3)
                    self.pos += 1;
                    let n = match self.toks.get(self.pos).cloned() {
                        Some(Tok::Num(n)) => n,
                        _ => return Err(Error::BadInput("exponent must be a nonnegative integer".into())),
                    };
                    self.pos += 1;
                    if self.peek() != Some(&Tok::Op(')')) {
                        return Err(Error::BadInput("expected ')' after exponent".into()));
                    }
                    n
                }
                _ => return Err(Error::BadInput("exponent must be a nonnegative integer".into())),
            };
            self.pos += 1;
            let e: u32 = e.try_into().map_err(|_| Error::BadInput("exponent too large".into()))?;
            return Ok(Expr::Pow(base.into(), e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Expr::Int(n))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if let Some(i) = self.vars.iter().position(|v| *v == name) {
                    return Ok(Expr::Var(i));
                }
                if matches!(name.as_str(), "D" | "d" | "diff" | "deriv") || name.starts_with('d') {
                    return Err(Error::BadInput(format!(
                        "'{name}': derivative terms are not supported; only algebraic equations"
                    )));
                }
                Err(Error::BadInput(format!("unknown symbol '{name}' (expected one of {:?})", self.vars)))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(&Tok::Op(')')) {
                    return Err(Error::BadInput("missing ')'".into()));
                }
                self.pos += 1;
                Ok(e)
            }
            other => Err(Error::BadInput(format!("unexpected token {other:?}"))),
        }
    }
}

/// Parse an expression over the given variable names.
pub fn parse(s: &str, vars: &[&str]) -> Result<Expr> {
    let toks = lex(s)?;
    if toks.is_empty() {
        return Err(Error::BadInput("empty polynomial".into()));
    }
    let mut p = Parser { toks, pos: 0, vars };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::BadInput(format!("trailing input at token {:?}", p.toks[p.pos])));
    }
    Ok(e)
}

fn mul2(a: &Poly2, b: &Poly2) -> Poly2 {
    let mut out = Poly2::new();
    for (&(i, j), x) in a {
        for (&(k, l), y) in b {
            *out.entry((i + k, j + l)).or_insert_with(BigInt::zero) += x * y;
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// Fully expand an expression in two variables.
pub fn expand(e: &Expr) -> Poly2 {
    let mut out = match e {
        Expr::Int(n) => Poly2::from([((0, 0), n.clone())]),
        Expr::Var(0) => Poly2::from([((1, 0), BigInt::one())]),
        Expr::Var(_) => Poly2::from([((0, 1), BigInt::one())]),
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            let mut x = expand(a);
            let sign = matches!(e, Expr::Sub(..));
            for (k, v) in expand(b) {
                let t = x.entry(k).or_insert_with(BigInt::zero);
                if sign {
                    *t -= v;
                } else {
                    *t += v;
                }
            }
            x
        }
        Expr::Mul(a, b) => mul2(&expand(a), &expand(b)),
        Expr::Neg(a) => expand(a).into_iter().map(|(k, v)| (k, -v)).collect(),
        Expr::Pow(a, n) => {
            let base = expand(a);
            let mut acc = Poly2::from([((0, 0), BigInt::one())]);
            for _ in 0..*n {
                acc = mul2(&acc, &base);
            }
            acc
        }
    };
    out.retain(|_, v| !v.is_zero());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expands_equations() {
        let e = parse("F^3 + F^2 - 3*z*F + 2*z^2", &["z", "F"]).unwrap();
        let p = expand(&e);
        assert_eq!(p.len(), 4);
        assert_eq!(p[&(1, 1)], BigInt::from(-3));
        assert_eq!(p[&(2, 0)], BigInt::from(2));
        let e = parse("(t^3-t+z)^3 - 9*(t^2-t+z)", &["z", "t"]).unwrap();
        let p = expand(&e);
        assert_eq!(p[&(0, 9)], BigInt::from(1));
        assert_eq!(p[&(1, 0)], BigInt::from(-9));
        let e = parse("64z^2F^3 + 16 z F^2 -(72z-1)F + 54z - 1", &["z", "F"]).unwrap();
        let p = expand(&e);
        assert_eq!(p[&(1, 1)], BigInt::from(-72));
        assert_eq!(p[&(0, 1)], BigInt::from(1));
    }

    #[test]
    fn rejects_derivatives_and_garbage() {
        for bad in ["F' + z", "D(F) + z", "F + y", "F^", "(F + 1", ""] {
            assert!(parse(bad, &["z", "F"]).is_err(), "{bad}");
        }
        let msg = parse("F'' - z", &["z", "F"]).unwrap_err().to_string();
        assert!(msg.contains("derivative"));
    }
}
