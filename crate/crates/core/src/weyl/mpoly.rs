use std::collections::BTreeMap;

use crate::coeff::{RatFunc, Scalar};

/// Minimal ring interface shared by the coefficient types of [`MPoly`].
pub trait Ring: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn from_int(n: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
}

impl Ring for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn from_int(n: i64) -> Self {
        Scalar::from_int(n)
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
}

impl Ring for RatFunc {
    fn zero() -> Self {
        RatFunc::zero()
    }
    fn from_int(n: i64) -> Self {
        RatFunc::from_int(n)
    }
    fn is_zero(&self) -> bool {
        RatFunc::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
}

/// Sparse polynomial in the commuting variables `m_1..m_r`.
#[derive(Clone, Debug, PartialEq)]
pub struct MPoly<C: Ring> {
    r: usize,
    terms: BTreeMap<Vec<u32>, C>,
}

impl<C: Ring> MPoly<C> {
    pub fn zero(r: usize) -> Self {
        MPoly {
            r,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(r: usize, c: C) -> Self {
        Self::term(r, vec![0; r], c)
    }

    pub fn term(r: usize, exps: Vec<u32>, c: C) -> Self {
        assert_eq!(exps.len(), r);
        let mut p = Self::zero(r);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    /// `m_i`.
    pub fn var(r: usize, i: usize) -> Self {
        let mut e = vec![0; r];
        e[i] = 1;
        Self::term(r, e, C::from_int(1))
    }

    pub fn arity(&self) -> usize {
        self.r
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> C {
        self.terms.get(exps).cloned().unwrap_or_else(C::zero)
    }

    /// Constant term.
    pub fn constant_term(&self) -> C {
        self.coeff(&vec![0; self.r])
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Variables `m_i` that occur.
    pub fn used_vars(&self) -> Vec<usize> {
        (0..self.r)
            .filter(|&i| self.terms.keys().any(|e| e[i] > 0))
            .collect()
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(v) => {
                let s = v.add(&c);
                if s.is_zero() {
                    self.terms.remove(&exps);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(exps, c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        MPoly {
            r: self.r,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.r);
        for (e, x) in &self.terms {
            out.add_term(e.clone(), x.mul(c));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.r);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1.mul(c2));
            }
        }
        out
    }

    /// Multiply by `m_i`.
    pub fn mul_var(&self, i: usize) -> Self {
        MPoly {
            r: self.r,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e = e.clone();
                    e[i] += 1;
                    (e, c.clone())
                })
                .collect(),
        }
    }

    /// `p(m + shift)`.
    pub fn shift(&self, shift: &[i64]) -> Self {
        let mut out = self.clone();
        for (i, &s) in shift.iter().enumerate() {
            if s != 0 {
                out = out.shift_var(i, s);
            }
        }
        out
    }

    fn shift_var(&self, i: usize, s: i64) -> Self {
        let mut out = Self::zero(self.r);
        for (e, c) in &self.terms {
            let d = e[i];
            // (m + s)^d = sum_j binom(d, j) s^(d-j) m^j
            let mut binom: i128 = 1;
            for j in 0..=d {
                if j > 0 {
                    binom = binom * (d - j + 1) as i128 / j as i128;
                }
                let w = binom * (s as i128).pow(d - j);
                let w = i64::try_from(w).expect("shift coefficient overflow");
                let mut ne = e.clone();
                ne[i] = j;
                out.add_term(ne, c.mul(&C::from_int(w)));
            }
        }
        out
    }

    /// Value at integer point `n`.
    pub fn eval(&self, n: &[i64]) -> C {
        let mut acc = C::zero();
        for (e, c) in &self.terms {
            let mut v = c.clone();
            for (x, &k) in n.iter().zip(e) {
                if k > 0 {
                    v = v.mul(&C::from_int(x.pow(k)));
                }
            }
            acc = acc.add(&v);
        }
        acc
    }

    pub fn map<D: Ring>(&self, f: impl Fn(&C) -> D) -> MPoly<D> {
        let mut out = MPoly::zero(self.r);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    pub fn try_map<D: Ring, E>(&self, f: impl Fn(&C) -> Result<D, E>) -> Result<MPoly<D>, E> {
        let mut out = MPoly::zero(self.r);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c)?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_binomial() {
        // (m+2)^2 = m^2 + 4m + 4
        let m = MPoly::<Scalar>::var(1, 0);
        let sq = m.mul(&m).shift(&[2]);
        assert_eq!(sq.coeff(&[2]), Scalar::from_int(1));
        assert_eq!(sq.coeff(&[1]), Scalar::from_int(4));
        assert_eq!(sq.coeff(&[0]), Scalar::from_int(4));
        assert_eq!(sq.eval(&[3]), Scalar::from_int(25));
    }

    #[test]
    fn cancellation_drops_terms() {
        let m = MPoly::<Scalar>::var(2, 1);
        assert!(m.add(&m.neg()).is_zero());
        assert_eq!(m.used_vars(), vec![1]);
    }
}
