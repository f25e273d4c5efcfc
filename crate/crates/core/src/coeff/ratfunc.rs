use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use super::poly::Poly;
use super::scalar::{fmt_rational, scalar_terms, Scalar};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarField {
    Rationals,
    Cyclotomic(u32),
}

impl ScalarField {
    pub fn order(self) -> u32 {
        match self {
            ScalarField::Rationals => 1,
            ScalarField::Cyclotomic(p) => p,
        }
    }
}

/// Coefficient field of a rational function: scalars plus the power split `k`,
/// meaning the stored variable is `u` with `q = u^k` (`k = 1` means `u = q`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BaseField {
    pub scalars: ScalarField,
    pub split: u32,
}

impl Default for BaseField {
    fn default() -> Self {
        BaseField::rationals()
    }
}

impl BaseField {
    pub fn rationals() -> Self {
        BaseField {
            scalars: ScalarField::Rationals,
            split: 1,
        }
    }

    pub fn cyclotomic(p: u32) -> Self {
        assert!(p >= 1, "cyclotomic order must be positive");
        BaseField {
            scalars: if p == 1 {
                ScalarField::Rationals
            } else {
                ScalarField::Cyclotomic(p)
            },
            split: 1,
        }
    }

    pub fn with_split(self, k: u32) -> Self {
        assert!(k >= 1, "power split must be positive");
        BaseField { split: k, ..self }
    }

    pub fn order(&self) -> u32 {
        self.scalars.order()
    }

    pub fn variable(&self) -> &'static str {
        if self.split == 1 {
            "q"
        } else {
            "u"
        }
    }

    fn join_scalars(a: ScalarField, b: ScalarField) -> ScalarField {
        let l = a.order().lcm(&b.order());
        if l == 1 {
            ScalarField::Rationals
        } else {
            ScalarField::Cyclotomic(l)
        }
    }

    /// Smallest field containing both. Panics on incompatible power splits.
    pub fn join(&self, other: &BaseField) -> BaseField {
        assert_eq!(
            self.split, other.split,
            "cannot combine values with power splits {} and {}",
            self.split, other.split
        );
        BaseField {
            scalars: Self::join_scalars(self.scalars, other.scalars),
            split: self.split,
        }
    }
}

/// Reduced rational function in the central variable.
///
/// Invariants: the denominator is nonzero and monic and shares no factor with the
/// numerator; zero is stored as `0/1`.
#[derive(Clone, Debug)]
pub struct RatFunc {
    field: BaseField,
    num: Poly,
    den: Poly,
}

/// Equality of values: the declared scalar field is ignored, the power split
/// only matters for non-constants.
impl PartialEq for RatFunc {
    fn eq(&self, other: &Self) -> bool {
        self.num == other.num
            && self.den == other.den
            && (self.field.split == other.field.split || self.is_constant())
    }
}

impl Eq for RatFunc {}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc::constant(BaseField::rationals(), Scalar::zero())
    }

    pub fn one() -> Self {
        RatFunc::constant(BaseField::rationals(), Scalar::one())
    }

    pub fn from_int(n: i64) -> Self {
        RatFunc::constant(BaseField::rationals(), Scalar::from_int(n))
    }

    pub fn constant(field: BaseField, c: Scalar) -> Self {
        RatFunc {
            field,
            num: Poly::constant(c),
            den: Poly::one(),
        }
    }

    pub fn from_poly(field: BaseField, num: Poly) -> Self {
        RatFunc {
            field,
            num,
            den: Poly::one(),
        }
    }

    /// `q` over the rationals.
    pub fn q() -> Self {
        RatFunc::from_poly(BaseField::rationals(), Poly::x())
    }

    /// `u^e` in the given field (Laurent exponents allowed).
    pub fn var_pow(field: BaseField, e: i64) -> Self {
        if e >= 0 {
            RatFunc::from_poly(field, Poly::monomial(Scalar::one(), e as usize))
        } else {
            RatFunc {
                field,
                num: Poly::one(),
                den: Poly::monomial(Scalar::one(), (-e) as usize),
            }
        }
    }

    /// `q^e = u^(k e)` in the given field.
    pub fn q_pow(field: BaseField, e: i64) -> Self {
        RatFunc::var_pow(field, e * field.split as i64)
    }

    /// Normalizing constructor; fails on a zero denominator.
    pub fn new(field: BaseField, num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self::normalized(field, num, den))
    }

    pub(crate) fn normalized(field: BaseField, num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RatFunc {
                field,
                num,
                den: Poly::one(),
            };
        }
        if den.is_one() {
            return RatFunc { field, num, den };
        }
        if den.is_monomial() {
            let d = den.degree().unwrap();
            let lead = den.lead().unwrap();
            let num = if lead.is_one() {
                num
            } else {
                num.scale(&lead.inv().unwrap())
            };
            let m = num.valuation().unwrap().min(d);
            return RatFunc {
                field,
                num: num.div_xpow(m),
                den: Poly::monomial(Scalar::one(), d - m),
            };
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.exact_div(&g), den.exact_div(&g))
        };
        let (lead, den) = den.make_monic();
        let num = if lead.is_one() {
            num
        } else {
            num.scale(&lead.inv().unwrap())
        };
        RatFunc { field, num, den }
    }

    pub fn field(&self) -> BaseField {
        self.field
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.den.is_one() && self.num.degree().unwrap_or(0) == 0
    }

    pub fn as_constant(&self) -> Option<Scalar> {
        self.is_constant().then(|| self.num.coeff(0))
    }

    /// Denominator is a power of the variable.
    pub fn is_laurent(&self) -> bool {
        self.den.is_monomial()
    }

    /// Nonzero terms `(exponent, coefficient)` of a Laurent polynomial, ascending.
    pub fn laurent_terms(&self) -> Option<Vec<(i64, Scalar)>> {
        if !self.is_laurent() {
            return None;
        }
        let shift = self.den.degree().unwrap() as i64;
        Some(
            self.num
                .terms()
                .map(|(i, c)| (i as i64 - shift, c.clone()))
                .collect(),
        )
    }

    pub fn from_laurent(field: BaseField, terms: &[(i64, Scalar)]) -> Self {
        let low = terms.iter().map(|t| t.0).min().unwrap_or(0).min(0);
        let high = terms.iter().map(|t| t.0).max().unwrap_or(0);
        let mut coeffs = vec![Scalar::zero(); (high - low + 1) as usize];
        for (e, c) in terms {
            let i = (e - low) as usize;
            coeffs[i] = &coeffs[i] + c;
        }
        Self::normalized(
            field,
            Poly::from_coeffs(coeffs),
            Poly::monomial(Scalar::one(), (-low) as usize),
        )
    }

    /// Reinterpret with a different field tag (same scalars and variable).
    pub fn with_field(&self, field: BaseField) -> Self {
        RatFunc {
            field,
            ..self.clone()
        }
    }

    fn joint_field(&self, other: &RatFunc) -> BaseField {
        // constants live in every split
        let split = if self.field.split == other.field.split {
            self.field.split
        } else if self.is_constant() {
            other.field.split
        } else if other.is_constant() {
            self.field.split
        } else {
            panic!(
                "cannot combine values with power splits {} and {}",
                self.field.split, other.field.split
            )
        };
        self.field
            .with_split(split)
            .join(&other.field.with_split(split))
    }

    pub fn inv(&self) -> Option<RatFunc> {
        if self.is_zero() {
            return None;
        }
        Some(Self::normalized(
            self.field,
            self.den.clone(),
            self.num.clone(),
        ))
    }

    pub fn pow(&self, e: i64) -> RatFunc {
        if e < 0 {
            return self.inv().expect("negative power of zero").pow(-e);
        }
        let mut base = self.clone();
        let mut acc = RatFunc::one().with_field(self.field);
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn scale(&self, c: &Scalar) -> RatFunc {
        if c.is_zero() {
            return RatFunc::zero().with_field(self.field);
        }
        RatFunc {
            field: self.field,
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// Value at `point`, or a pole error.
    pub fn eval_at(&self, point: &Scalar) -> Result<Scalar> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return Err(Error::Pole {
                point: point.to_string(),
            });
        }
        Ok(&self.num.eval(point) / &d)
    }

    /// Formal derivative in `q`; only defined when `q` is the stored variable.
    pub fn d_dq(&self) -> Result<RatFunc> {
        if self.field.split != 1 {
            return Err(Error::FractionalBase(self.field.split));
        }
        if self.den.is_one() {
            return Ok(RatFunc::from_poly(self.field, self.num.derivative()));
        }
        let num = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        let den = &self.den * &self.den;
        Ok(Self::normalized(self.field, num, den))
    }

    /// `r(c q)`.
    pub fn subst_scaled(&self, c: &Scalar) -> RatFunc {
        let field = self
            .field
            .join(&BaseField::cyclotomic(c.order()).with_split(self.field.split));
        Self::normalized(field, self.num.scale_var(c), self.den.scale_var(c))
    }

    /// `r(zeta_p q)`.
    pub fn subst_q_omega(&self, p: u32) -> Result<RatFunc> {
        if self.field.split != 1 {
            return Err(Error::FractionalBase(self.field.split));
        }
        let out = self.subst_scaled(&Scalar::zeta(p));
        Ok(out.with_field(out.field.join(&BaseField::cyclotomic(p))))
    }

    /// Replace `q^(k e)` by `q^(a e)`, the result living over `u` with `q = u^k`.
    pub fn subst_q_alpha(&self, a: i64, k: u32) -> Result<RatFunc> {
        check_alpha(a, k)?;
        if self.field.split != 1 {
            return Err(Error::FractionalBase(self.field.split));
        }
        let field = self.field.with_split(k);
        // q^(k e') = u^(k a e') = u^(a * exponent)
        let map = |p: &Poly| -> Result<Vec<(i64, Scalar)>> {
            p.terms()
                .map(|(e, c)| {
                    if e as i64 % k as i64 != 0 {
                        Err(Error::NotDivisible {
                            exponent: e as i64,
                            modulus: k,
                        })
                    } else {
                        Ok((a * e as i64, c.clone()))
                    }
                })
                .collect()
        };
        let n = RatFunc::from_laurent(field, &map(&self.num)?);
        let d = RatFunc::from_laurent(field, &map(&self.den)?);
        Ok(&n / &d)
    }

    /// `r(u^a)` for an arbitrary nonzero `a`, over the field with split `k`.
    pub fn subst_var_power(&self, a: i64, k: u32) -> Result<RatFunc> {
        check_alpha(a, k)?;
        if self.field.split != 1 {
            return Err(Error::FractionalBase(self.field.split));
        }
        let field = self.field.with_split(k);
        let map = |p: &Poly| -> Vec<(i64, Scalar)> {
            p.terms().map(|(e, c)| (a * e as i64, c.clone())).collect()
        };
        let n = RatFunc::from_laurent(field, &map(&self.num));
        let d = RatFunc::from_laurent(field, &map(&self.den));
        Ok(&n / &d)
    }
}

impl RatFunc {
    /// Reinterpret a value in `q` over the field with `q = u^k` (substitute `u^k`).
    pub fn lift_split(&self, k: u32) -> RatFunc {
        if self.field.split == k || self.is_constant() {
            return self.with_field(self.field.with_split(k));
        }
        assert_eq!(self.field.split, 1, "can only lift values in q itself");
        let k = k as usize;
        Self::normalized(
            self.field.with_split(k as u32),
            self.num.subst_power(k),
            self.den.subst_power(k),
        )
    }
}

pub(crate) fn check_alpha(a: i64, k: u32) -> Result<()> {
    if k == 0 || a == 0 {
        return Err(Error::Invalid(
            "alpha must be a nonzero a/k with k >= 1".into(),
        ));
    }
    if a.unsigned_abs().gcd(&(k as u64)) != 1 {
        return Err(Error::Invalid(format!("alpha {a}/{k} is not reduced")));
    }
    Ok(())
}

/// Normalizing constructor with the error contract of the public API.
pub fn ratfunc_normalize(field: BaseField, num: Poly, den: Poly) -> Result<RatFunc> {
    RatFunc::new(field, num, den)
}

impl<'a> Add<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        let field = self.joint_field(rhs);
        if rhs.is_zero() {
            return self.with_field(field);
        }
        if self.is_zero() {
            return rhs.with_field(field);
        }
        if self.den == rhs.den {
            return RatFunc::normalized(field, &self.num + &rhs.num, self.den.clone());
        }
        if self.den.is_monomial() && rhs.den.is_monomial() {
            let (d1, d2) = (self.den.degree().unwrap(), rhs.den.degree().unwrap());
            let d = d1.max(d2);
            let num = &self.num.mul_xpow(d - d1) + &rhs.num.mul_xpow(d - d2);
            return RatFunc::normalized(field, num, Poly::monomial(Scalar::one(), d));
        }
        let g = self.den.gcd(&rhs.den);
        let a = rhs.den.exact_div(&g);
        let b = self.den.exact_div(&g);
        let num = &(&self.num * &a) + &(&rhs.num * &b);
        let den = &self.den * &a;
        RatFunc::normalized(field, num, den)
    }
}

impl<'a> Sub<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            field: self.field,
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl<'a> Mul<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        let field = self.joint_field(rhs);
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero().with_field(field);
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RatFunc::from_poly(field, &self.num * &rhs.num);
        }
        if self.den.is_monomial() && rhs.den.is_monomial() {
            return RatFunc::normalized(field, &self.num * &rhs.num, &self.den * &rhs.den);
        }
        // cross-cancel before multiplying
        let g1 = self.num.gcd(&rhs.den);
        let g2 = rhs.num.gcd(&self.den);
        let num = &self.num.exact_div(&g1) * &rhs.num.exact_div(&g2);
        let den = &self.den.exact_div(&g2) * &rhs.den.exact_div(&g1);
        RatFunc::normalized(field, num, den)
    }
}

impl<'a> Div<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn div(self, rhs: &RatFunc) -> RatFunc {
        self * &rhs.inv().expect("division by the zero rational function")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<RatFunc> for RatFunc {
            type Output = RatFunc;
            fn $m(self, rhs: RatFunc) -> RatFunc {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}

/// Canonical text of a polynomial: expanded, descending powers, explicit signs,
/// no spaces. `z` stands for the generator of the cyclotomic field of `order`.
pub fn fmt_poly(p: &Poly, var: &str, order: u32) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (e, c) in p.terms().rev() {
        for (r, j) in scalar_terms(c, order) {
            let neg = r.is_negative();
            let mag = r.abs();
            if neg {
                out.push('-');
            } else if !out.is_empty() {
                out.push('+');
            }
            let mut factors: Vec<String> = vec![];
            if !mag.is_one() || (j == 0 && e == 0) {
                factors.push(fmt_rational(&mag));
            }
            if j > 0 {
                factors.push(if j == 1 { "z".into() } else { format!("z^{j}") });
            }
            if e > 0 {
                factors.push(if e == 1 {
                    var.to_string()
                } else {
                    format!("{var}^{e}")
                });
            }
            out.push_str(&factors.join("*"));
        }
    }
    out
}

fn term_count(p: &Poly, order: u32) -> usize {
    p.terms().map(|(_, c)| scalar_terms(c, order).len()).sum()
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let var = self.field.variable();
        let order = self.field.order();
        let num = fmt_poly(&self.num, var, order);
        if self.den.is_one() {
            return write!(f, "{num}");
        }
        let den = fmt_poly(&self.den, var, order);
        let num = if term_count(&self.num, order) > 1 {
            format!("({num})")
        } else {
            num
        };
        let den = if term_count(&self.den, order) > 1 {
            format!("({den})")
        } else {
            den
        };
        write!(f, "{num}/{den}")
    }
}

impl From<BigRational> for RatFunc {
    fn from(r: BigRational) -> Self {
        RatFunc::constant(BaseField::rationals(), Scalar::from_rational(r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> RatFunc {
        RatFunc::q()
    }

    fn c(n: i64) -> RatFunc {
        RatFunc::from_int(n)
    }

    fn qp(e: i64) -> RatFunc {
        RatFunc::q_pow(BaseField::rationals(), e)
    }

    #[test]
    fn normalize_examples() {
        let f = BaseField::rationals();
        let r =
            ratfunc_normalize(f, Poly::from_ints(&[-1, 0, 1]), Poly::from_ints(&[-1, 1])).unwrap();
        assert_eq!(r, &q() + &c(1));
        let r = ratfunc_normalize(f, Poly::zero(), Poly::from_ints(&[1, 7])).unwrap();
        assert!(r.is_zero());
        assert!(r.den().is_one());
        // (q-1)(q^3+2) / ((q^3+2)(q+5))
        let a = Poly::from_ints(&[-1, 1]);
        let b = Poly::from_ints(&[2, 0, 0, 1]);
        let d = Poly::from_ints(&[5, 1]);
        let r = ratfunc_normalize(f, &a * &b, &b * &d).unwrap();
        assert_eq!(r.num(), &a);
        assert_eq!(r.den(), &d);
        // cross-multiplication check
        assert_eq!(&(r.num() * &(&b * &d)), &(&(&a * &b) * r.den()));
        assert_eq!(
            ratfunc_normalize(f, Poly::one(), Poly::zero()),
            Err(Error::ZeroDenominator)
        );
    }

    #[test]
    fn omega_substitution() {
        assert_eq!(qp(2).subst_q_omega(2).unwrap(), qp(2));
        assert_eq!(q().subst_q_omega(2).unwrap(), -&q());
        // 1/(q-1) at zeta_4 q: 1/(zeta_4 q - 1)
        let r = (&c(1) / &(&q() - &c(1))).subst_q_omega(4).unwrap();
        let zq = RatFunc::from_poly(BaseField::cyclotomic(4), Poly::monomial(Scalar::zeta(4), 1));
        let den = &zq - &c(1);
        assert_eq!(&r * &den, c(1));
        assert_eq!(r.field(), BaseField::cyclotomic(4));
    }

    #[test]
    fn alpha_substitution() {
        let k2 = BaseField::rationals().with_split(2);
        assert_eq!(qp(4).subst_q_alpha(1, 2).unwrap(), RatFunc::q_pow(k2, 2));
        let r = &qp(2) + &qp(-2);
        let out = r.subst_q_alpha(3, 2).unwrap();
        let expect = &RatFunc::q_pow(k2, 3) + &RatFunc::q_pow(k2, -3);
        assert_eq!(out, expect);
        assert_eq!(out.to_string(), "(u^12+1)/u^6");
        assert_eq!(
            q().subst_q_alpha(1, 2),
            Err(Error::NotDivisible {
                exponent: 1,
                modulus: 2
            })
        );
        let x = &(&q() * &q()) / &(&q() + &c(3));
        assert_eq!(x.subst_q_alpha(1, 1).unwrap(), x);
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(qp(2).d_dq().unwrap(), &c(2) * &q());
        let inv = &c(1) / &(&q() - &c(1));
        assert_eq!(inv.d_dq().unwrap(), -&(&inv * &inv));
        let r = &q() / &(&q() + &c(1));
        let d = r.d_dq().unwrap();
        let qp1 = &q() + &c(1);
        assert_eq!(&d * &(&qp1 * &qp1), c(1));
        let k2 = BaseField::rationals().with_split(2);
        assert_eq!(
            RatFunc::var_pow(k2, 1).d_dq(),
            Err(Error::FractionalBase(2))
        );
    }

    #[test]
    fn evaluation() {
        let r = &(&(&q() * &q()) - &c(1)) / &(&q() - &c(1));
        assert_eq!(r.eval_at(&Scalar::one()).unwrap(), Scalar::from_int(2));
        assert_eq!(qp(3).eval_at(&Scalar::one()).unwrap(), Scalar::one());
        let inv = &c(1) / &(&q() - &c(1));
        assert!(matches!(
            inv.eval_at(&Scalar::one()),
            Err(Error::Pole { .. })
        ));
    }

    #[test]
    fn text() {
        let r = &(&qp(2) - &(&c(3) * &q())) / &(&q() + &c(1));
        assert_eq!(r.to_string(), "(q^2-3*q)/(q+1)");
        assert_eq!((&c(-1) / &qp(3)).to_string(), "-1/q^3");
        assert_eq!(RatFunc::zero().to_string(), "0");
    }
}
