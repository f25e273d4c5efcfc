//! Parser for the textual operator syntax, e.g. `L1*L2-q*M2*L2-1`,
//! `(q^2-1)/(q+1)*M^-1*L`, or classical `(m+1)*l-1`.
//!
//! The printer lives with the types (`Display`); everything it prints parses
//! back to the same value.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::coeff::{BaseField, RatFunc, Scalar};
use crate::error::{Error, Result};
use crate::weyl::{ClassicalOperator, MPoly, Monomial, Operator, Var, Variant};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let mut out = vec![];
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let t: String = cs[st..i].iter().collect();
            out.push(Tok::Num(t.parse().unwrap()));
        } else if c.is_ascii_alphabetic() {
            let st = i;
            i += 1;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
enum Expr {
    Num(BigInt),
    Ident(String),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, i64),
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = if self.eat('-') {
            Expr::Neg(Box::new(self.term()?))
        } else {
            self.eat('+');
            self.term()?
        };
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            let neg = self.eat('-');
            match self.peek().cloned() {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    let e: i64 = n
                        .try_into()
                        .map_err(|_| Error::Parse("exponent too large".into()))?;
                    Ok(Expr::Pow(Box::new(base), if neg { -e } else { e }))
                }
                _ => Err(Error::Parse("expected an integer exponent".into())),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Expr::Num(n))
            }
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(Expr::Ident(s))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing `)`".into()));
                }
                Ok(e)
            }
            // a unary minus directly inside a product, as in `2*-q`
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.factor()?)))
            }
            None => Err(Error::Parse("unexpected end of input".into())),
            Some(other) => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

fn parse_expr(s: &str) -> Result<Expr> {
    let mut p = Parser {
        toks: lex(s)?,
        pos: 0,
    };
    if p.toks.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!(
            "trailing input at token {:?}",
            p.toks[p.pos]
        )));
    }
    Ok(e)
}

fn collect_idents(e: &Expr, out: &mut Vec<String>) {
    match e {
        Expr::Num(_) => {}
        Expr::Ident(s) => out.push(s.clone()),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
            collect_idents(a, out);
            collect_idents(b, out);
        }
        Expr::Neg(a) | Expr::Pow(a, _) => collect_idents(a, out),
    }
}

/// Smallest arity consistent with the generator names in `text`.
pub fn infer_arity(text: &str) -> Result<usize> {
    let mut ids = vec![];
    collect_idents(&parse_expr(text)?, &mut ids);
    let mut r = 1;
    for id in ids {
        let head = id.chars().next().unwrap();
        if "LMlm".contains(head) && id.len() > 1 {
            let i: usize = id[1..]
                .parse()
                .map_err(|_| Error::Parse(format!("bad name `{id}`")))?;
            r = r.max(i);
        }
    }
    Ok(r)
}

/// Central constants shared by both evaluators.
fn constant_ident(name: &str, field: BaseField) -> Result<Option<RatFunc>> {
    Ok(match name {
        "q" => Some(RatFunc::q_pow(field, 1)),
        "u" if field.split > 1 => Some(RatFunc::var_pow(field, 1)),
        "u" => return Err(Error::Parse("`u` needs a field with q = u^k, k > 1".into())),
        "z" if field.order() > 1 => Some(RatFunc::constant(field, Scalar::zeta(field.order()))),
        "z" => return Err(Error::Parse("`z` needs a cyclotomic field".into())),
        _ => None,
    })
}

struct QuantumEval {
    r: usize,
    field: BaseField,
}

impl QuantumEval {
    fn scalar(&self, c: RatFunc) -> Operator {
        let mut op = Operator::scalar(self.r, Variant::WrPlus, c);
        op.set_field(self.field);
        op
    }

    fn as_coefficient(op: &Operator) -> Option<RatFunc> {
        if op.is_zero() {
            return Some(RatFunc::zero());
        }
        match op.terms().collect::<Vec<_>>().as_slice() {
            [(m, c)] if m.is_one() => Some((*c).clone()),
            _ => None,
        }
    }

    fn eval(&self, e: &Expr) -> Result<Operator> {
        Ok(match e {
            Expr::Num(n) => self.scalar(RatFunc::from(BigRational::from_integer(n.clone()))),
            Expr::Ident(s) => {
                if let Some(c) = constant_ident(s, self.field)? {
                    self.scalar(c)
                } else {
                    let v = Var::parse(s, self.r)?;
                    if matches!(s.chars().next(), Some('l' | 'm')) {
                        return Err(Error::Parse(format!(
                            "`{s}` is a classical generator; use `{}`",
                            s.to_uppercase()
                        )));
                    }
                    let mut op = Operator::generator(self.r, v, 1);
                    op.set_field(self.field);
                    op
                }
            }
            Expr::Add(a, b) => self.eval(a)?.add(&self.eval(b)?)?,
            Expr::Sub(a, b) => self.eval(a)?.sub(&self.eval(b)?)?,
            Expr::Mul(a, b) => self.eval(a)?.mul(&self.eval(b)?)?,
            Expr::Neg(a) => self.eval(a)?.neg(),
            Expr::Div(a, b) => {
                let d = self.eval(b)?;
                let c = Self::as_coefficient(&d)
                    .ok_or_else(|| Error::Parse("can only divide by coefficients".into()))?;
                let inv = c.inv().ok_or(Error::ZeroDenominator)?;
                self.eval(a)?.scale(&inv)
            }
            Expr::Pow(a, k) => {
                let base = self.eval(a)?;
                if *k >= 0 {
                    base.pow(*k as u32)?
                } else {
                    self.inverse(&base)?.pow(k.unsigned_abs() as u32)?
                }
            }
        })
    }

    /// Inverse of a single term `c M^b L^a`: `c^-1 q^(a.b) M^-b L^-a`.
    fn inverse(&self, op: &Operator) -> Result<Operator> {
        let terms: Vec<_> = op.terms().collect();
        let [(m, c)] = terms.as_slice() else {
            return Err(Error::Parse("only single terms can be inverted".into()));
        };
        let inv = c.inv().ok_or(Error::ZeroDenominator)?;
        let e = m.commutation_exponent(m);
        let coeff = &inv * &RatFunc::q_pow(self.field, e);
        let mono = Monomial::one(self.r).minus(m);
        let mut out = Operator::monomial(mono, coeff);
        out.set_field(self.field);
        Ok(out)
    }
}

/// Parse a quantum operator of arity `r` with coefficients in `field`.
pub fn parse_operator(text: &str, r: usize, field: BaseField) -> Result<Operator> {
    let e = parse_expr(text)?;
    QuantumEval { r, field }.eval(&e)
}

/// Parse a rational function in `q` (or `u`) over `field`.
pub fn parse_ratfunc(text: &str, field: BaseField) -> Result<RatFunc> {
    let op = parse_operator(text, 1, field)?;
    QuantumEval::as_coefficient(&op)
        .ok_or_else(|| Error::Parse(format!("`{text}` is not a coefficient")))
}

struct ClassicalEval {
    r: usize,
    order: u32,
}

impl ClassicalEval {
    fn as_scalar(op: &ClassicalOperator) -> Option<Scalar> {
        if op.is_zero() {
            return Some(Scalar::zero());
        }
        let terms: Vec<_> = op.terms().collect();
        match terms.as_slice() {
            [(a, p)] if a.iter().all(|&x| x == 0) => {
                let c = p.constant_term();
                (p.terms().count() == 1 && !c.is_zero()).then_some(c)
            }
            _ => None,
        }
    }

    fn eval(&self, e: &Expr) -> Result<ClassicalOperator> {
        let r = self.r;
        Ok(match e {
            Expr::Num(n) => ClassicalOperator::scalar(
                r,
                Scalar::from_rational(BigRational::from_integer(n.clone())),
            ),
            Expr::Ident(s) if s == "z" => {
                if self.order == 1 {
                    return Err(Error::Parse("`z` needs a cyclotomic field".into()));
                }
                ClassicalOperator::scalar(r, Scalar::zeta(self.order))
            }
            Expr::Ident(s) => match Var::parse(s, r)? {
                _ if s.starts_with(['L', 'M']) => {
                    return Err(Error::Parse(format!(
                        "`{s}` is a quantum generator; use `{}`",
                        s.to_lowercase()
                    )))
                }
                Var::L(i) => ClassicalOperator::l(r, i),
                Var::M(i) => ClassicalOperator::m(r, i),
            },
            Expr::Add(a, b) => self.eval(a)?.add(&self.eval(b)?)?,
            Expr::Sub(a, b) => self.eval(a)?.sub(&self.eval(b)?)?,
            Expr::Mul(a, b) => self.eval(a)?.mul(&self.eval(b)?)?,
            Expr::Neg(a) => self.eval(a)?.neg(),
            Expr::Div(a, b) => {
                let d = self.eval(b)?;
                let c = Self::as_scalar(&d)
                    .ok_or_else(|| Error::Parse("can only divide by nonzero constants".into()))?;
                self.eval(a)?.scale(&c.inv().unwrap())
            }
            Expr::Pow(a, k) => {
                let base = self.eval(a)?;
                let base = if *k < 0 {
                    // only pure shifts are invertible
                    let terms: Vec<_> = base.terms().collect();
                    match terms.as_slice() {
                        [(alpha, p)] if p.terms().count() == 1 && p.constant_term().is_one() => {
                            ClassicalOperator::term(
                                alpha.iter().map(|x| -x).collect(),
                                MPoly::constant(r, Scalar::one()),
                            )
                        }
                        _ => return Err(Error::Parse("only shifts can be inverted".into())),
                    }
                } else {
                    base
                };
                let mut acc = ClassicalOperator::one(r);
                for _ in 0..k.unsigned_abs() {
                    acc = acc.mul(&base)?;
                }
                acc
            }
        })
    }
}

/// Parse a classical operator in `l_i`, `m_i`; `z` denotes `zeta_order`.
pub fn parse_classical(text: &str, r: usize, order: u32) -> Result<ClassicalOperator> {
    ClassicalEval { r, order }.eval(&parse_expr(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q1() -> BaseField {
        BaseField::rationals()
    }

    #[test]
    fn round_trip_examples() {
        for (text, r) in [
            ("-q*M^2+L", 1),
            ("L1*L2-q*M2*L2-1", 2),
            ("(q^2+1)/(q-1)*M^-1*L+1/q", 1),
            ("q*M1*M2-q*M1*L1+M2*L1-M2", 2),
        ] {
            let op = parse_operator(text, r, q1()).unwrap();
            let again = parse_operator(&op.to_string(), r, q1()).unwrap();
            assert_eq!(op, again, "{text} -> {op}");
        }
        let op = parse_operator("L-q*M^2", 1, q1()).unwrap();
        assert_eq!(op.to_string(), "-q*M^2+L");
    }

    #[test]
    fn commutation_in_text() {
        let a = parse_operator("L*M", 1, q1()).unwrap();
        let b = parse_operator("q*M*L", 1, q1()).unwrap();
        assert_eq!(a, b);
        let inv = parse_operator("(M*L)^-1*M*L", 1, q1()).unwrap();
        assert_eq!(inv, Operator::one(1, Variant::Wr));
    }

    #[test]
    fn cyclotomic_and_split() {
        let f = BaseField::cyclotomic(3);
        let op = parse_operator("z*q*M^3+L", 1, f).unwrap();
        assert_eq!(parse_operator(&op.to_string(), 1, f).unwrap(), op);
        let f2 = BaseField::rationals().with_split(2);
        let op = parse_operator("L^2-u^4*M^2", 1, f2).unwrap();
        assert_eq!(op, parse_operator("L^2-q^2*M^2", 1, f2).unwrap());
        assert!(parse_operator("u*L", 1, q1()).is_err());
    }

    #[test]
    fn classical() {
        let c = parse_classical("(m2-1-m1)*l1+(1+m1)", 2, 1).unwrap();
        assert_eq!(c.to_string(), "(-m1+m2-1)*l1+m1+1");
        assert_eq!(parse_classical(&c.to_string(), 2, 1).unwrap(), c);
        assert_eq!(infer_arity("L1*M3").unwrap(), 3);
        assert!(parse_classical("L", 1, 1).is_err());
    }

    #[test]
    fn errors() {
        assert!(parse_operator("L+", 1, q1()).is_err());
        assert!(parse_operator("1/L", 1, q1()).is_err());
        assert!(parse_operator("L3", 2, q1()).is_err());
        assert!(parse_operator("(L", 1, q1()).is_err());
    }
}
