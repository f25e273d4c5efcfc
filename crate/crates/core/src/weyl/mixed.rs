use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::classical::{m_monomial_text, ClassicalOperator};
use super::monomial::{Monomial, Var};
use super::mpoly::MPoly;
use super::operator::{absorb_field, fmt_term, join_terms, Operator};
use crate::coeff::{BaseField, RatFunc, Scalar};
use crate::error::{Error, Result};

/// Operators `sum c(q, m) M^beta L^alpha` mixing the quantum generators with the
/// classical multiplication operators `m_i` (acting by `n_i`). The `m`-part of
/// each term is written to the left of `M^beta L^alpha`.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedOperator {
    r: usize,
    field: BaseField,
    terms: BTreeMap<Monomial, MPoly<RatFunc>>,
}

impl MixedOperator {
    pub fn zero(r: usize) -> Self {
        MixedOperator {
            r,
            field: BaseField::rationals(),
            terms: BTreeMap::new(),
        }
    }

    pub fn from_operator(p: &Operator) -> Self {
        let r = p.arity();
        let mut out = MixedOperator {
            r,
            field: p.field(),
            terms: BTreeMap::new(),
        };
        for (m, c) in p.terms() {
            out.add_term(m.clone(), MPoly::constant(r, c.clone()));
        }
        out
    }

    pub fn arity(&self) -> usize {
        self.r
    }

    pub fn field(&self) -> BaseField {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &MPoly<RatFunc>)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, m: Monomial, p: MPoly<RatFunc>) {
        if p.is_zero() {
            return;
        }
        for (_, c) in p.terms() {
            self.field = absorb_field(self.field, c);
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                let s = v.add(&p);
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(m, p);
            }
        }
    }

    pub fn support(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for (m, p) in &self.terms {
            out.extend(m.support());
            out.extend(p.used_vars().into_iter().map(Var::M));
        }
        out
    }

    /// The `R` of `D_q(T f) = R f + T (D_q f)`: each term
    /// `c(q) m^g M^b L^a` contributes `(c'(q) m^g + c(q)/q (b . m) m^g) M^b L^a`.
    ///
    /// Coefficients must be Laurent polynomials in `q` (clear denominators first).
    pub fn commutator(&self) -> Result<MixedOperator> {
        if self.field.split != 1 {
            return Err(Error::FractionalBase(self.field.split));
        }
        let mut out = MixedOperator {
            r: self.r,
            field: self.field,
            terms: BTreeMap::new(),
        };
        let q_inv = RatFunc::q_pow(self.field, -1);
        for (mono, p) in &self.terms {
            let mut acc = MPoly::zero(self.r);
            for (g, c) in p.terms() {
                if !c.is_laurent() {
                    return Err(Error::NonPolynomialCoefficient(c.to_string()));
                }
                acc.add_term(g.clone(), c.d_dq()?);
                let cq = c * &q_inv;
                for (j, &b) in mono.beta.iter().enumerate() {
                    if b != 0 {
                        let mut e = g.clone();
                        e[j] += 1;
                        acc.add_term(e, cq.scale(&Scalar::from_int(b)));
                    }
                }
            }
            out.add_term(mono.clone(), acc);
        }
        Ok(out)
    }

    /// Evaluate at `q = 1`, `M_i = 1`.
    pub fn eval_q1_m1(&self) -> Result<ClassicalOperator> {
        let mut out = ClassicalOperator::zero(self.r);
        let one = Scalar::one();
        for (mono, p) in &self.terms {
            let v = p.try_map(|c| c.eval_at(&one))?;
            out.add_term(mono.alpha.clone(), v);
        }
        Ok(out)
    }
}

/// First-order `D_q` commutator of a quantum operator, see
/// [`MixedOperator::commutator`].
pub fn dq_commutator(p: &Operator) -> Result<MixedOperator> {
    MixedOperator::from_operator(p).commutator()
}

pub fn op_eval_q1_m1(p: &Operator) -> Result<ClassicalOperator> {
    MixedOperator::from_operator(p).eval_q1_m1()
}

/// Outcome of the derivative descent.
#[derive(Clone, Debug, PartialEq)]
pub struct Descent {
    pub classical: ClassicalOperator,
    /// Number of commutator rounds applied before the evaluation was nonzero.
    pub rounds: usize,
}

/// Starting from `T_0 = P`, apply `T_(j+1) = R(T_j)` until `T_j` evaluated at
/// `q = 1`, `M = 1` is a nonzero classical operator. `P` should be cleared of
/// negative exponents and denominators.
pub fn descend(p: &Operator, cap: usize) -> Result<Descent> {
    if p.is_zero() {
        return Err(Error::ZeroOperator);
    }
    let mut t = MixedOperator::from_operator(p);
    for rounds in 0..=cap {
        let e = t.eval_q1_m1()?;
        if !e.is_zero() {
            return Ok(Descent {
                classical: e,
                rounds,
            });
        }
        if rounds < cap {
            t = t.commutator()?;
        }
    }
    Err(Error::DescentCap(cap))
}

impl fmt::Display for MixedOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.r;
        let terms = self.terms.iter().rev().map(|(mono, p)| {
            let mut parts: Vec<(&Vec<u32>, &RatFunc)> = p.terms().collect();
            parts.sort_by(|a, b| {
                let da: u32 = a.0.iter().sum();
                let db: u32 = b.0.iter().sum();
                db.cmp(&da).then_with(|| b.0.cmp(a.0))
            });
            let coeff = join_terms(parts.into_iter().map(|(e, c)| {
                let c = c.with_field(self.field.with_split(c.field().split));
                fmt_term(&c.to_string(), &m_monomial_text(e, r))
            }));
            fmt_term(&coeff, &mono.to_string())
        });
        f.write_str(&join_terms(terms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::operator::Variant;

    fn q() -> RatFunc {
        RatFunc::q()
    }

    #[test]
    fn commutator_of_qm() {
        // R(qM) = (1 + m) M
        let p = Operator::generator(1, Var::M(0), 1).scale(&q());
        let r = dq_commutator(&p).unwrap();
        assert_eq!(r.to_string(), "(m+1)*M");
    }

    #[test]
    fn rejects_denominators() {
        let c = &RatFunc::one() / &(&q() + &RatFunc::one());
        let p = Operator::scalar(1, Variant::WrPlus, c);
        assert!(matches!(
            dq_commutator(&p),
            Err(Error::NonPolynomialCoefficient(_))
        ));
    }

    #[test]
    fn one_round_descent() {
        // (q-1)(L - q M^2) -> l - 1 after one round
        let l = Operator::generator(1, Var::L(0), 1);
        let m2 = Operator::generator(1, Var::M(0), 2);
        let p = l
            .sub(&m2.scale(&q()))
            .unwrap()
            .scale(&(&q() - &RatFunc::one()));
        let d = descend(&p, 25).unwrap();
        assert_eq!(d.rounds, 1);
        assert_eq!(d.classical.to_string(), "l-1");
    }
}
