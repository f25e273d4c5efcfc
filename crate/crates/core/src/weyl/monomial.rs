use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One generator of the quantum Weyl algebra (0-based index).
///
/// Generators are ordered `L_1 > ... > L_r > M_1 > ... > M_r`; the derived `Ord`
/// sorts them by coordinate position, so `L` variables come first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    L(usize),
    M(usize),
}

impl Var {
    /// Position in the `2r`-tuple `(alpha_1..alpha_r, beta_1..beta_r)`.
    pub fn coordinate(self, r: usize) -> usize {
        match self {
            Var::L(i) => i,
            Var::M(i) => r + i,
        }
    }

    pub fn from_coordinate(c: usize, r: usize) -> Var {
        if c < r {
            Var::L(c)
        } else {
            Var::M(c - r)
        }
    }

    pub fn index(self) -> usize {
        match self {
            Var::L(i) | Var::M(i) => i,
        }
    }

    /// Name in the quantum algebra (`L1`, `M2`, ...).
    pub fn name(self) -> String {
        match self {
            Var::L(i) => format!("L{}", i + 1),
            Var::M(i) => format!("M{}", i + 1),
        }
    }

    /// Name in the classical algebra (`l1`, `m2`, ...).
    pub fn classical_name(self) -> String {
        self.name().to_lowercase()
    }

    /// Accepts `L1`, `M2`, `l1`, `m2`, and bare `L`/`M` when `r = 1`.
    pub fn parse(s: &str, r: usize) -> Result<Var> {
        let bad = || Error::Parse(format!("bad variable name `{s}`"));
        let mut chars = s.chars();
        let head = chars.next().ok_or_else(bad)?;
        let rest: &str = chars.as_str();
        let idx = if rest.is_empty() {
            if r == 1 {
                0
            } else {
                return Err(bad());
            }
        } else {
            let i: usize = rest.parse().map_err(|_| bad())?;
            if i == 0 || i > r {
                return Err(bad());
            }
            i - 1
        };
        match head {
            'L' | 'l' => Ok(Var::L(idx)),
            'M' | 'm' => Ok(Var::M(idx)),
            _ => Err(bad()),
        }
    }
}

/// Serialized by name (`"L1"`, `"M2"`; bare `"L"`/`"M"` read as index 1).
impl Serialize for Var {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.name())
    }
}

impl<'de> Deserialize<'de> for Var {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Var::parse(&s, usize::MAX)
            .or_else(|_| Var::parse(&s, 1))
            .map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// `M^beta L^alpha` in the normal order "all M-factors left of all L-factors".
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Monomial {
    pub alpha: Vec<i64>,
    pub beta: Vec<i64>,
}

impl Monomial {
    pub fn one(r: usize) -> Self {
        Monomial {
            alpha: vec![0; r],
            beta: vec![0; r],
        }
    }

    pub fn new(alpha: Vec<i64>, beta: Vec<i64>) -> Self {
        assert_eq!(alpha.len(), beta.len(), "alpha and beta lengths differ");
        Monomial { alpha, beta }
    }

    /// `var^e`.
    pub fn var_pow(r: usize, var: Var, e: i64) -> Self {
        let mut m = Monomial::one(r);
        match var {
            Var::L(i) => m.alpha[i] = e,
            Var::M(i) => m.beta[i] = e,
        }
        m
    }

    /// From the concatenated tuple `(alpha, beta)`.
    pub fn from_exponents(exps: &[i64]) -> Self {
        assert!(exps.len() % 2 == 0);
        let r = exps.len() / 2;
        Monomial {
            alpha: exps[..r].to_vec(),
            beta: exps[r..].to_vec(),
        }
    }

    pub fn arity(&self) -> usize {
        self.alpha.len()
    }

    pub fn exponents(&self) -> Vec<i64> {
        self.alpha.iter().chain(&self.beta).copied().collect()
    }

    pub fn exponent(&self, var: Var) -> i64 {
        match var {
            Var::L(i) => self.alpha[i],
            Var::M(i) => self.beta[i],
        }
    }

    /// `|eta|`: the sum of the absolute values of all exponents.
    pub fn degree(&self) -> i64 {
        self.alpha.iter().chain(&self.beta).map(|e| e.abs()).sum()
    }

    pub fn is_one(&self) -> bool {
        self.alpha.iter().chain(&self.beta).all(|&e| e == 0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.alpha.iter().chain(&self.beta).all(|&e| e >= 0)
    }

    /// Generators with a nonzero exponent.
    pub fn support(&self) -> Vec<Var> {
        let r = self.arity();
        (0..2 * r)
            .map(|c| Var::from_coordinate(c, r))
            .filter(|&v| self.exponent(v) != 0)
            .collect()
    }

    /// Exponent-wise sum (ignores commutation scalars).
    pub fn shifted_by(&self, other: &Monomial) -> Monomial {
        Monomial {
            alpha: zip_with(&self.alpha, &other.alpha, |a, b| a + b),
            beta: zip_with(&self.beta, &other.beta, |a, b| a + b),
        }
    }

    /// Exponent-wise difference.
    pub fn minus(&self, other: &Monomial) -> Monomial {
        Monomial {
            alpha: zip_with(&self.alpha, &other.alpha, |a, b| a - b),
            beta: zip_with(&self.beta, &other.beta, |a, b| a - b),
        }
    }

    /// `alpha_self . beta_other`: exponent of `q` produced by moving
    /// `L^alpha_self` past `M^beta_other`.
    pub fn commutation_exponent(&self, other: &Monomial) -> i64 {
        self.alpha.iter().zip(&other.beta).map(|(a, b)| a * b).sum()
    }
}

fn zip_with(a: &[i64], b: &[i64], f: impl Fn(i64, i64) -> i64) -> Vec<i64> {
    assert_eq!(a.len(), b.len(), "arity mismatch");
    a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect()
}

/// Componentwise `a >= b` on the full exponent tuple.
pub fn monomial_dominates(a: &Monomial, b: &Monomial) -> bool {
    a.alpha
        .iter()
        .chain(&a.beta)
        .zip(b.alpha.iter().chain(&b.beta))
        .all(|(x, y)| x >= y)
}

impl Ord for Monomial {
    /// Graded by `|eta|`, then lexicographic with `L_1 > ... > L_r > M_1 > ... > M_r`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.alpha.cmp(&other.alpha))
            .then_with(|| self.beta.cmp(&other.beta))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn fmt_factor(name: &str, e: i64) -> Option<String> {
    match e {
        0 => None,
        1 => Some(name.to_string()),
        _ => Some(format!("{name}^{e}")),
    }
}

impl Monomial {
    /// `M1^2*L1`; `1` for the unit monomial. With `r = 1` the index is dropped.
    pub fn text(&self, classical: bool) -> String {
        let r = self.arity();
        let name = |v: Var| {
            let n = if classical {
                v.classical_name()
            } else {
                v.name()
            };
            if r == 1 {
                n[..1].to_string()
            } else {
                n
            }
        };
        let mut parts = vec![];
        for i in 0..r {
            if let Some(s) = fmt_factor(&name(Var::M(i)), self.beta[i]) {
                parts.push(s);
            }
        }
        for i in 0..r {
            if let Some(s) = fmt_factor(&name(Var::L(i)), self.alpha[i]) {
                parts.push(s);
            }
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text(false))
    }
}

/// Every monomial with nonnegative exponents and `|eta| <= n` in arity `r`,
/// ascending in the monomial order.
pub fn monomials_up_to(r: usize, n: i64) -> Vec<Monomial> {
    let mut out = vec![];
    let mut cur = vec![0i64; 2 * r];
    fn rec(pos: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<Monomial>) {
        if pos == cur.len() {
            out.push(Monomial::from_exponents(cur));
            return;
        }
        for e in 0..=left {
            cur[pos] = e;
            rec(pos + 1, left - e, cur, out);
        }
        cur[pos] = 0;
    }
    rec(0, n, &mut cur, &mut out);
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(a: &[i64], b: &[i64]) -> Monomial {
        Monomial::new(a.to_vec(), b.to_vec())
    }

    #[test]
    fn order_examples() {
        // M^3 (degree 3) beats L^2
        assert!(m(&[0], &[3]) > m(&[2], &[0]));
        // equal degree: L beats M
        assert!(m(&[1], &[0]) > m(&[0], &[1]));
        // L1 M2 > L2 M1
        assert!(m(&[1, 0], &[0, 1]) > m(&[0, 1], &[1, 0]));
        assert!(m(&[1, 0], &[0, 0]) > m(&[0, 1], &[0, 0]));
        assert!(m(&[0, 0], &[1, 0]) > m(&[0, 0], &[0, 1]));
    }

    #[test]
    fn domination() {
        assert!(monomial_dominates(&m(&[2], &[3]), &m(&[2], &[1])));
        assert!(!monomial_dominates(&m(&[2], &[1]), &m(&[1], &[2])));
        let a = m(&[1, 2], &[0, 4]);
        assert!(monomial_dominates(&a, &a));
    }

    #[test]
    fn counting() {
        // C(N + 2r, 2r)
        assert_eq!(monomials_up_to(1, 4).len(), 15);
        assert_eq!(monomials_up_to(2, 3).len(), 35);
        let v = monomials_up_to(2, 2);
        assert!(v.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn names() {
        assert_eq!(Var::parse("L", 1).unwrap(), Var::L(0));
        assert_eq!(Var::parse("m2", 2).unwrap(), Var::M(1));
        assert!(Var::parse("L3", 2).is_err());
        assert_eq!(m(&[1, 0], &[0, 2]).to_string(), "M2^2*L1");
        assert_eq!(m(&[1], &[2]).to_string(), "M^2*L");
    }
}
