use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weyl::{Monomial, Var};

/// Degree bounds of one ansatz: shift (L) steps, M steps and q steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bounds {
    pub shift: u32,
    pub m: u32,
    pub q: u32,
}

impl Bounds {
    pub const fn new(shift: u32, m: u32, q: u32) -> Self {
        Bounds { shift, m, q }
    }
}

/// Search space for an annihilator: monomials in `subset` with bounded
/// exponents and coefficients that are polynomials in `q` of bounded degree.
///
/// Bounds count steps: with an M-step of `p` and `m_bound = 2` the allowed
/// powers of each M variable are `0, p, 2p`. Steps come from `divisible_m` or
/// from `multiplicities` (indexed by the `2r` coordinates, L's first); the
/// q-step comes from `divisible_q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ansatz {
    pub subset: Vec<Var>,
    pub shift_bound: u32,
    pub m_bound: u32,
    pub q_bound: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divisible_m: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divisible_q: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplicities: Option<Vec<u32>>,
}

impl Ansatz {
    pub fn new(mut subset: Vec<Var>, shift_bound: u32, m_bound: u32, q_bound: u32) -> Self {
        subset.sort();
        subset.dedup();
        Ansatz {
            subset,
            shift_bound,
            m_bound,
            q_bound,
            divisible_m: None,
            divisible_q: None,
            multiplicities: None,
        }
    }

    pub fn from_bounds(subset: Vec<Var>, b: Bounds) -> Self {
        Self::new(subset, b.shift, b.m, b.q)
    }

    pub fn bounds(&self) -> Bounds {
        Bounds::new(self.shift_bound, self.m_bound, self.q_bound)
    }

    /// Restrict M exponents to multiples of `m_step` and q exponents to
    /// multiples of `q_step`.
    pub fn with_divisibility(mut self, m_step: Option<u32>, q_step: Option<u32>) -> Self {
        self.divisible_m = m_step;
        self.divisible_q = q_step;
        self
    }

    /// Take steps from a `2r`-tuple; the subset becomes its support.
    pub fn with_multiplicities(mut self, eta: Vec<u32>) -> Self {
        let r = eta.len() / 2;
        self.subset = (0..eta.len())
            .filter(|&c| eta[c] > 0)
            .map(|c| Var::from_coordinate(c, r))
            .collect();
        self.subset.sort();
        self.multiplicities = Some(eta);
        self
    }

    pub fn validate(&self, r: usize) -> Result<()> {
        if let Some(v) = self.subset.iter().find(|v| v.index() >= r) {
            return Err(Error::Invalid(format!(
                "variable {v} out of range for r = {r}"
            )));
        }
        if let Some(eta) = &self.multiplicities {
            if eta.len() != 2 * r {
                return Err(Error::ArityMismatch(2 * r, eta.len()));
            }
        }
        if self.divisible_m == Some(0) || self.divisible_q == Some(0) {
            return Err(Error::Invalid(
                "divisibility parameter must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub fn step(&self, var: Var, r: usize) -> u32 {
        if let Some(eta) = &self.multiplicities {
            return eta[var.coordinate(r)];
        }
        match var {
            Var::L(_) => 1,
            Var::M(_) => self.divisible_m.unwrap_or(1),
        }
    }

    pub fn q_step(&self) -> u32 {
        self.divisible_q.unwrap_or(1)
    }

    /// Allowed monomials in increasing monomial order.
    pub fn monomials(&self, r: usize) -> Vec<Monomial> {
        let mut out = vec![Monomial::one(r)];
        for &v in &self.subset {
            let bound = match v {
                Var::L(_) => self.shift_bound,
                Var::M(_) => self.m_bound,
            };
            let step = self.step(v, r) as i64;
            if step == 0 {
                continue;
            }
            let mut next = vec![];
            for m in &out {
                for i in 0..=bound as i64 {
                    let mut m = m.clone();
                    match v {
                        Var::L(j) => m.alpha[j] = i * step,
                        Var::M(j) => m.beta[j] = i * step,
                    }
                    next.push(m);
                }
            }
            out = next;
        }
        out.sort();
        out
    }

    /// Allowed exponents of `q` in each coefficient.
    pub fn q_exponents(&self) -> Vec<i64> {
        let s = self.q_step() as i64;
        (0..=self.q_bound as i64).map(|j| j * s).collect()
    }

    /// Largest shift in any coordinate.
    pub fn shift_diameter(&self, r: usize) -> i64 {
        self.subset
            .iter()
            .filter(|v| matches!(v, Var::L(_)))
            .map(|&v| self.shift_bound as i64 * self.step(v, r) as i64)
            .max()
            .unwrap_or(0)
    }

    /// `{L1,M2}`-style label.
    pub fn subset_label(&self) -> String {
        let names: Vec<String> = self.subset.iter().map(|v| v.name()).collect();
        format!("{{{}}}", names.join(","))
    }
}
