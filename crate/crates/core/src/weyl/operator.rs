use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::monomial::{Monomial, Var};
use crate::coeff::{BaseField, RatFunc, Scalar};
use crate::error::{Error, Result};

/// `W_r` (Laurent in `L`, `M`) or its nonnegative part `W_{r,+}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "Wr")]
    Wr,
    #[serde(rename = "Wr+")]
    WrPlus,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Wr => "Wr",
            Variant::WrPlus => "Wr+",
        })
    }
}

/// Field of a coefficient sum: constants adopt whatever split is around.
pub(crate) fn absorb_field(field: BaseField, c: &RatFunc) -> BaseField {
    let cf = c.field();
    let split = if c.is_constant() {
        field.split
    } else {
        cf.split
    };
    field.with_split(split).join(&cf.with_split(split))
}

/// Element of the quantum Weyl algebra with coefficients in `Q(q)` (or an
/// extension of it), stored in the normal form `sum c(q) M^beta L^alpha`.
#[derive(Clone, Debug)]
pub struct Operator {
    r: usize,
    variant: Variant,
    field: BaseField,
    terms: BTreeMap<Monomial, RatFunc>,
}

/// Equality of elements; the declared coefficient field is not compared.
impl PartialEq for Operator {
    fn eq(&self, other: &Self) -> bool {
        self.r == other.r && self.variant == other.variant && self.terms == other.terms
    }
}

impl Operator {
    pub fn zero(r: usize, variant: Variant) -> Self {
        Operator {
            r,
            variant,
            field: BaseField::rationals(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(r: usize, variant: Variant) -> Self {
        Self::scalar(r, variant, RatFunc::one())
    }

    pub fn scalar(r: usize, variant: Variant, c: RatFunc) -> Self {
        let mut op = Self::zero(r, variant);
        op.add_term(Monomial::one(r), c);
        op
    }

    /// `c * mono`; picks `Wr+` when the exponents allow it.
    pub fn monomial(mono: Monomial, c: RatFunc) -> Self {
        let variant = if mono.is_nonnegative() {
            Variant::WrPlus
        } else {
            Variant::Wr
        };
        let mut op = Self::zero(mono.arity(), variant);
        op.add_term(mono, c);
        op
    }

    /// The generator `var` (or its inverse when `e < 0`) raised to `e`.
    pub fn generator(r: usize, var: Var, e: i64) -> Self {
        Self::monomial(Monomial::var_pow(r, var, e), RatFunc::one())
    }

    pub fn from_terms(
        r: usize,
        variant: Variant,
        terms: impl IntoIterator<Item = (Monomial, RatFunc)>,
    ) -> Result<Self> {
        let mut op = Self::zero(r, variant);
        for (m, c) in terms {
            if m.arity() != r {
                return Err(Error::ArityMismatch(r, m.arity()));
            }
            if variant == Variant::WrPlus && !m.is_nonnegative() {
                return Err(Error::VariantMismatch);
            }
            op.add_term(m, c);
        }
        Ok(op)
    }

    pub fn arity(&self) -> usize {
        self.r
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn field(&self) -> BaseField {
        self.field
    }

    /// Declare a larger coefficient field (e.g. after reading a file).
    pub fn set_field(&mut self, field: BaseField) {
        let split = if self.terms.values().all(|c| c.is_constant()) {
            field.split
        } else {
            self.field.split
        };
        self.field = self.field.with_split(split).join(&field);
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &RatFunc)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> RatFunc {
        self.terms.get(m).cloned().unwrap_or_else(RatFunc::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: RatFunc) {
        assert_eq!(m.arity(), self.r, "monomial arity");
        if c.is_zero() {
            return;
        }
        if self.variant == Variant::WrPlus && !m.is_nonnegative() {
            self.variant = Variant::Wr;
        }
        self.field = absorb_field(self.field, &c);
        match self.terms.get_mut(&m) {
            Some(v) => {
                let s = &*v + &c;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    /// Reinterpret in the other variant; `Wr+` needs nonnegative exponents.
    pub fn with_variant(&self, variant: Variant) -> Result<Self> {
        if variant == Variant::WrPlus && self.terms.keys().any(|m| !m.is_nonnegative()) {
            return Err(Error::VariantMismatch);
        }
        Ok(Operator {
            variant,
            ..self.clone()
        })
    }

    /// Same arity required; `W_{r,+}` is promoted to `W_r` when mixed.
    fn check_compatible(&self, other: &Operator) -> Result<Variant> {
        if self.r != other.r {
            return Err(Error::ArityMismatch(self.r, other.r));
        }
        Ok(if self.variant == other.variant {
            self.variant
        } else {
            Variant::Wr
        })
    }

    /// Generators occurring with a nonzero exponent in some term.
    pub fn support(&self) -> BTreeSet<Var> {
        self.terms.keys().flat_map(|m| m.support()).collect()
    }

    pub fn leading_monomial(&self) -> Result<&Monomial> {
        self.terms.keys().next_back().ok_or(Error::ZeroOperator)
    }

    pub fn leading_term(&self) -> Result<(&Monomial, &RatFunc)> {
        self.terms.iter().next_back().ok_or(Error::ZeroOperator)
    }

    /// `q^e` in this operator's field.
    fn q_pow(&self, e: i64) -> RatFunc {
        RatFunc::q_pow(self.field, e)
    }

    pub fn neg(&self) -> Operator {
        Operator {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
            ..self.clone()
        }
    }

    pub fn scale(&self, c: &RatFunc) -> Operator {
        let mut out = Operator {
            terms: BTreeMap::new(),
            ..self.clone()
        };
        for (m, x) in &self.terms {
            out.add_term(m.clone(), x * c);
        }
        out
    }

    /// Multiply every coefficient by a scalar.
    pub fn scale_scalar(&self, c: &Scalar) -> Operator {
        self.scale(&RatFunc::constant(
            BaseField::cyclotomic(c.order()),
            c.clone(),
        ))
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        let variant = self.check_compatible(other)?;
        let mut out = self.clone();
        out.variant = variant;
        out.field = out
            .field
            .join(&other.field.with_split(out.joined_split(other)));
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        self.add(&other.neg())
    }

    fn joined_split(&self, other: &Operator) -> u32 {
        if self.field.split == other.field.split || other.terms.values().all(|c| c.is_constant()) {
            self.field.split
        } else {
            other.field.split
        }
    }

    /// Product in the algebra, using
    /// `(c1 M^b1 L^a1)(c2 M^b2 L^a2) = c1 c2 q^(a1.b2) M^(b1+b2) L^(a1+a2)`.
    pub fn mul(&self, other: &Operator) -> Result<Operator> {
        let variant = self.check_compatible(other)?;
        let split = self.joined_split(other);
        let field = self
            .field
            .with_split(split)
            .join(&other.field.with_split(split));
        let mut out = Operator {
            r: self.r,
            variant,
            field,
            terms: BTreeMap::new(),
        };
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let e = m1.commutation_exponent(m2);
                let mut c = c1 * c2;
                if e != 0 {
                    c = &c * &RatFunc::q_pow(field, e);
                }
                out.add_term(m1.shifted_by(m2), c);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Result<Operator> {
        let mut acc = Operator::one(self.r, self.variant);
        acc.field = self.field;
        for _ in 0..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// `c * M^beta L^alpha * self`.
    pub fn left_mul_monomial(&self, mono: &Monomial, c: &RatFunc) -> Operator {
        let mut out = Operator {
            terms: BTreeMap::new(),
            ..self.clone()
        };
        for (m, x) in &self.terms {
            let e = mono.commutation_exponent(m);
            let mut y = x * c;
            if e != 0 {
                y = &y * &self.q_pow(e);
            }
            out.add_term(mono.shifted_by(m), y);
        }
        out
    }

    /// Componentwise-minimal `M^b L^a` that makes every exponent nonnegative.
    pub fn clearing_monomial(&self) -> Monomial {
        let mut shift = Monomial::one(self.r);
        for m in self.terms.keys() {
            for i in 0..self.r {
                shift.alpha[i] = shift.alpha[i].max(-m.alpha[i]);
                shift.beta[i] = shift.beta[i].max(-m.beta[i]);
            }
        }
        shift
    }

    /// Left-multiply by [`Operator::clearing_monomial`]; the result lies in `W_{r,+}`
    /// and generates the same left ideal in `W_r`.
    pub fn clear_to_positive(&self) -> Operator {
        let shift = self.clearing_monomial();
        let mut out = if shift.is_one() {
            self.clone()
        } else {
            self.left_mul_monomial(&shift, &RatFunc::one())
        };
        out.variant = Variant::WrPlus;
        out
    }

    /// Multiply through by the lcm of the coefficient denominators, giving
    /// polynomial coefficients (in the stored variable).
    pub fn clear_denominators(&self) -> Operator {
        let mut den = crate::coeff::Poly::one();
        for c in self.terms.values() {
            if !c.den().is_one() {
                let g = den.gcd(c.den());
                den = (&den * c.den()).exact_div(&g);
            }
        }
        if den.is_one() {
            return self.clone();
        }
        self.scale(&RatFunc::from_poly(self.field, den))
    }

    /// `P(zeta_p q)`; every M-exponent must be divisible by `p`.
    pub fn subst_root(&self, p: u32) -> Result<Operator> {
        let mut out = Operator {
            terms: BTreeMap::new(),
            field: self.field.join(&BaseField::cyclotomic(p)),
            ..self.clone()
        };
        for (m, c) in &self.terms {
            if let Some(&b) = m.beta.iter().find(|&&b| b % p as i64 != 0) {
                return Err(Error::NotDivisible {
                    exponent: b,
                    modulus: p,
                });
            }
            out.add_term(m.clone(), c.subst_q_omega(p)?);
        }
        Ok(out)
    }

    /// Rewrite an operator that is polynomial in `q^k` and `M_i^k` for the
    /// sequence `f(q^(a/k))`: `q^(k e) -> q^(a e)` and `M^(k b) -> M^(a b)`.
    /// The result lives over `u` with `q = u^k`.
    pub fn subst_alpha(&self, a: i64, k: u32) -> Result<Operator> {
        crate::coeff::check_alpha(a, k)?;
        let field = self.field.with_split(k);
        let mut out = Operator {
            r: self.r,
            variant: self.variant,
            field,
            terms: BTreeMap::new(),
        };
        for (m, c) in &self.terms {
            let mut beta = Vec::with_capacity(self.r);
            for &b in &m.beta {
                if b % k as i64 != 0 {
                    return Err(Error::NotDivisible {
                        exponent: b,
                        modulus: k,
                    });
                }
                beta.push(b / k as i64 * a);
            }
            out.add_term(Monomial::new(m.alpha.clone(), beta), c.subst_q_alpha(a, k)?);
        }
        if a < 0 && out.variant == Variant::WrPlus && !out.terms.keys().all(|m| m.is_nonnegative())
        {
            out.variant = Variant::Wr;
        }
        Ok(out)
    }

    /// Restrict the arity-`r` operator to a single generator set by re-indexing
    /// (used for embedding univariate operators into higher arity).
    pub fn embed(&self, r: usize, positions: &[usize]) -> Operator {
        assert_eq!(positions.len(), self.r);
        let mut out = Operator {
            r,
            variant: self.variant,
            field: self.field,
            terms: BTreeMap::new(),
        };
        for (m, c) in &self.terms {
            let mut nm = Monomial::one(r);
            for (i, &p) in positions.iter().enumerate() {
                nm.alpha[p] = m.alpha[i];
                nm.beta[p] = m.beta[i];
            }
            out.add_term(nm, c.clone());
        }
        out
    }
}

/// `A + B`.
pub fn op_add(a: &Operator, b: &Operator) -> Result<Operator> {
    a.add(b)
}

/// `A * B`.
pub fn op_mul(a: &Operator, b: &Operator) -> Result<Operator> {
    a.mul(b)
}

/// `c * A`.
pub fn op_scale(c: &RatFunc, a: &Operator) -> Operator {
    a.scale(c)
}

pub fn clear_to_positive(a: &Operator) -> Operator {
    a.clear_to_positive()
}

pub fn op_subst_root(a: &Operator, p: u32) -> Result<Operator> {
    a.subst_root(p)
}

pub fn op_subst_alpha(a: &Operator, num: i64, den: u32) -> Result<Operator> {
    a.subst_alpha(num, den)
}

/// True when a canonical coefficient text has more than one summand.
pub(crate) fn is_compound(text: &str) -> bool {
    let mut depth = 0i32;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '+' | '-' if i > 0 && depth == 0 => return true,
            _ => {}
        }
    }
    false
}

/// `c*mono` with a sign handled by the caller: returns `(negative, text)`.
pub(crate) fn fmt_term(coeff: &str, mono: &str) -> (bool, String) {
    let (neg, mag) = match coeff.strip_prefix('-') {
        Some(rest) if !is_compound(coeff) => (true, rest.to_string()),
        _ => (false, coeff.to_string()),
    };
    let text = if mono == "1" {
        mag
    } else if mag == "1" {
        mono.to_string()
    } else if is_compound(&mag) {
        format!("({mag})*{mono}")
    } else {
        format!("{mag}*{mono}")
    };
    (neg, text)
}

pub(crate) fn join_terms(terms: impl IntoIterator<Item = (bool, String)>) -> String {
    let mut out = String::new();
    for (neg, t) in terms {
        if neg {
            out.push('-');
        } else if !out.is_empty() && !t.starts_with('-') {
            out.push('+');
        }
        out.push_str(&t);
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

impl fmt::Display for Operator {
    /// Canonical text: terms in descending monomial order, e.g. `-q*M^2+L`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms.iter().rev().map(|(m, c)| {
            let c = c.with_field(self.field.with_split(c.field().split));
            fmt_term(&c.to_string(), &m.to_string())
        });
        f.write_str(&join_terms(terms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l() -> Operator {
        Operator::generator(1, Var::L(0), 1)
    }

    fn m() -> Operator {
        Operator::generator(1, Var::M(0), 1)
    }

    #[test]
    fn commutation_rule() {
        // L M = q M L
        let lm = l().mul(&m()).unwrap();
        let ml = m().mul(&l()).unwrap().scale(&RatFunc::q());
        assert_eq!(lm, ml);
        assert_eq!(lm.to_string(), "q*M*L");
    }

    #[test]
    fn leading_monomial_and_support() {
        let p = l()
            .sub(&m().mul(&m()).unwrap().scale(&RatFunc::q()))
            .unwrap();
        assert_eq!(p.to_string(), "-q*M^2+L");
        assert_eq!(
            p.leading_monomial().unwrap(),
            &Monomial::new(vec![0], vec![2])
        );
        assert_eq!(p.support().len(), 2);
        assert_eq!(
            Operator::zero(1, Variant::Wr).leading_monomial(),
            Err(Error::ZeroOperator)
        );
    }

    #[test]
    fn clearing() {
        let li = Operator::generator(1, Var::L(0), -1);
        let p = l().add(&li).unwrap();
        let c = p.clear_to_positive();
        assert_eq!(c.variant(), Variant::WrPlus);
        assert_eq!(c.to_string(), "L^2+1");
        // M^-1 L: clearing by M gives L with no q factor, L M^-1 picks one up
        let p = Operator::generator(1, Var::M(0), -1).mul(&l()).unwrap();
        assert_eq!(p.clear_to_positive().to_string(), "L");
        let p = l().mul(&Operator::generator(1, Var::M(0), -1)).unwrap();
        assert_eq!(p.to_string(), "1/q*M^-1*L");
        assert_eq!(p.clear_to_positive().to_string(), "1/q*L");
    }

    #[test]
    fn substitutions() {
        let m2 = m().mul(&m()).unwrap();
        let p = l().sub(&m2.scale(&RatFunc::q())).unwrap();
        assert!(matches!(p.subst_root(3), Err(Error::NotDivisible { .. })));
        let r = p.subst_root(2).unwrap();
        assert_eq!(r.to_string(), "q*M^2+L");
        // L^2 - q^4 M^4 with alpha 1/2 becomes L^2 - q^2 M^2
        let l2 = l().mul(&l()).unwrap();
        let p = l2
            .sub(
                &m2.mul(&m2)
                    .unwrap()
                    .scale(&RatFunc::q_pow(BaseField::rationals(), 4)),
            )
            .unwrap();
        let out = p.subst_alpha(1, 2).unwrap();
        let f2 = BaseField::rationals().with_split(2);
        let expect = Operator::from_terms(
            1,
            Variant::WrPlus,
            [
                (Monomial::new(vec![2], vec![0]), RatFunc::one()),
                (Monomial::new(vec![0], vec![2]), -RatFunc::q_pow(f2, 2)),
            ],
        )
        .unwrap();
        assert_eq!(out, expect);
        assert_eq!(p.subst_alpha(1, 1).unwrap(), p);
    }
}
