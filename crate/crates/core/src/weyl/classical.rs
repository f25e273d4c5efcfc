use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::monomial::{Monomial, Var};
use super::mpoly::MPoly;
use super::operator::{fmt_term, join_terms};
use crate::coeff::Scalar;
use crate::error::{Error, Result};

/// Element of the classical Weyl algebra: `sum p_alpha(m) l^alpha`, with `m_i`
/// acting by multiplication with `n_i` and `l_i` by the shift `n_i -> n_i + 1`.
///
/// Shifts are keyed by a [`Monomial`] whose `beta` part is always zero, so the
/// usual monomial order applies to them.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalOperator {
    r: usize,
    terms: BTreeMap<Monomial, MPoly<Scalar>>,
}

impl ClassicalOperator {
    pub fn zero(r: usize) -> Self {
        ClassicalOperator {
            r,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(r: usize) -> Self {
        Self::term(vec![0; r], MPoly::constant(r, Scalar::one()))
    }

    /// `p(m) l^alpha`.
    pub fn term(alpha: Vec<i64>, p: MPoly<Scalar>) -> Self {
        let r = alpha.len();
        let mut op = Self::zero(r);
        op.add_term(alpha, p);
        op
    }

    /// `l_i`.
    pub fn l(r: usize, i: usize) -> Self {
        let mut a = vec![0; r];
        a[i] = 1;
        Self::term(a, MPoly::constant(r, Scalar::one()))
    }

    /// `m_i`.
    pub fn m(r: usize, i: usize) -> Self {
        Self::term(vec![0; r], MPoly::var(r, i))
    }

    pub fn scalar(r: usize, c: Scalar) -> Self {
        Self::term(vec![0; r], MPoly::constant(r, c))
    }

    pub fn arity(&self) -> usize {
        self.r
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `(alpha, p_alpha)` in ascending order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&[i64], &MPoly<Scalar>)> {
        self.terms.iter().map(|(k, v)| (k.alpha.as_slice(), v))
    }

    pub fn add_term(&mut self, alpha: Vec<i64>, p: MPoly<Scalar>) {
        assert_eq!(alpha.len(), self.r);
        if p.is_zero() {
            return;
        }
        let key = Monomial::new(alpha, vec![0; self.r]);
        match self.terms.get_mut(&key) {
            Some(v) => {
                let s = v.add(&p);
                if s.is_zero() {
                    self.terms.remove(&key);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(key, p);
            }
        }
    }

    /// Generators `l_i` / `m_i` that occur, reported with the quantum names'
    /// indices (`Var::L` for `l_i`, `Var::M` for `m_i`).
    pub fn support(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for (k, p) in &self.terms {
            out.extend(k.support());
            out.extend(p.used_vars().into_iter().map(Var::M));
        }
        out
    }

    pub fn neg(&self) -> Self {
        ClassicalOperator {
            r: self.r,
            terms: self
                .terms
                .iter()
                .map(|(k, p)| (k.clone(), p.neg()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut out = Self::zero(self.r);
        for (k, p) in &self.terms {
            out.add_term(k.alpha.clone(), p.scale(c));
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.r != other.r {
            return Err(Error::ArityMismatch(self.r, other.r));
        }
        let mut out = self.clone();
        for (k, p) in &other.terms {
            out.add_term(k.alpha.clone(), p.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Product using `l^alpha s(m) = s(m + alpha) l^alpha`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.r != other.r {
            return Err(Error::ArityMismatch(self.r, other.r));
        }
        let mut out = Self::zero(self.r);
        for (k1, p1) in &self.terms {
            for (k2, p2) in &other.terms {
                let shifted = p2.shift(&k1.alpha);
                let alpha = k1.alpha.iter().zip(&k2.alpha).map(|(a, b)| a + b).collect();
                out.add_term(alpha, p1.mul(&shifted));
            }
        }
        Ok(out)
    }

    /// Largest cyclotomic order among the coefficients.
    pub fn order(&self) -> u32 {
        let mut o = 1u32;
        for p in self.terms.values() {
            for (_, c) in p.terms() {
                o = num_integer::Integer::lcm(&o, &c.order());
            }
        }
        o
    }

    /// Leading shift exponent in the monomial order.
    pub fn leading_shift(&self) -> Result<&[i64]> {
        self.terms
            .keys()
            .next_back()
            .map(|k| k.alpha.as_slice())
            .ok_or(Error::ZeroOperator)
    }
}

pub fn classical_mul(a: &ClassicalOperator, b: &ClassicalOperator) -> Result<ClassicalOperator> {
    a.mul(b)
}

/// Canonical text of an `m`-polynomial with scalar coefficients.
pub(crate) fn fmt_mpoly_scalar(p: &MPoly<Scalar>, order: u32) -> String {
    let r = p.arity();
    let mut terms: Vec<(&Vec<u32>, &Scalar)> = p.terms().collect();
    // descending total degree, then lex
    terms.sort_by(|a, b| {
        let da: u32 = a.0.iter().sum();
        let db: u32 = b.0.iter().sum();
        db.cmp(&da).then_with(|| b.0.cmp(a.0))
    });
    join_terms(terms.into_iter().map(|(e, c)| {
        let mono = m_monomial_text(e, r);
        fmt_term(&scalar_text(c, order), &mono)
    }))
}

pub(crate) fn m_monomial_text(e: &[u32], r: usize) -> String {
    let mut parts = vec![];
    for (i, &k) in e.iter().enumerate() {
        let name = if r == 1 {
            "m".to_string()
        } else {
            format!("m{}", i + 1)
        };
        match k {
            0 => {}
            1 => parts.push(name),
            _ => parts.push(format!("{name}^{k}")),
        }
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

fn scalar_text(c: &Scalar, order: u32) -> String {
    crate::coeff::fmt_poly(&crate::coeff::Poly::constant(c.clone()), "q", order)
}

impl fmt::Display for ClassicalOperator {
    /// E.g. `(-m1+m2-1)*l1+m1+1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let order = self.order();
        let terms = self
            .terms
            .iter()
            .rev()
            .map(|(k, p)| fmt_term(&fmt_mpoly_scalar(p, order), &k.text(true)));
        f.write_str(&join_terms(terms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_rule() {
        // l m = (m + 1) l
        let l = ClassicalOperator::l(1, 0);
        let m = ClassicalOperator::m(1, 0);
        let lm = l.mul(&m).unwrap();
        let rhs = m.add(&ClassicalOperator::one(1)).unwrap().mul(&l).unwrap();
        assert_eq!(lm, rhs);
        assert_eq!(lm.to_string(), "(m+1)*l");
    }

    #[test]
    fn support_and_text() {
        let l1 = ClassicalOperator::l(2, 0);
        let m1 = ClassicalOperator::m(2, 0);
        let m2 = ClassicalOperator::m(2, 1);
        let one = ClassicalOperator::one(2);
        // (m2 - 1 - m1) l1 + (1 + m1)
        let coeff = m2.sub(&one).unwrap().sub(&m1).unwrap();
        let op = coeff.mul(&l1).unwrap().add(&one.add(&m1).unwrap()).unwrap();
        assert_eq!(op.to_string(), "(-m1+m2-1)*l1+m1+1");
        let s: Vec<Var> = op.support().into_iter().collect();
        assert_eq!(s, vec![Var::L(0), Var::M(0), Var::M(1)]);
    }
}
