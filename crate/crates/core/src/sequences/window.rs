use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Box `lower <= n <= upper` of integer indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub lower: Vec<i64>,
    pub upper: Vec<i64>,
}

impl Window {
    pub fn new(lower: Vec<i64>, upper: Vec<i64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::ArityMismatch(lower.len(), upper.len()));
        }
        if lower.iter().zip(&upper).any(|(a, b)| a > b) {
            return Err(Error::Invalid(format!("empty window {lower:?}..{upper:?}")));
        }
        Ok(Window { lower, upper })
    }

    /// `[a, b]^r`.
    pub fn cube(r: usize, a: i64, b: i64) -> Self {
        Window {
            lower: vec![a; r],
            upper: vec![b; r],
        }
    }

    pub fn arity(&self) -> usize {
        self.lower.len()
    }

    pub fn len(&self) -> usize {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(a, b)| (b - a + 1) as usize)
            .product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, n: &[i64]) -> bool {
        n.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(x, (a, b))| a <= x && x <= b)
    }

    pub fn intersects(&self, other: &Window) -> bool {
        (0..self.arity())
            .all(|i| self.lower[i] <= other.upper[i] && other.lower[i] <= self.upper[i])
    }

    pub fn translate(&self, by: &[i64]) -> Window {
        Window {
            lower: self.lower.iter().zip(by).map(|(a, b)| a + b).collect(),
            upper: self.upper.iter().zip(by).map(|(a, b)| a + b).collect(),
        }
    }

    /// All indices in lexicographic order (last coordinate fastest).
    pub fn points(&self) -> Vec<Vec<i64>> {
        let mut out = Vec::with_capacity(self.len());
        let mut cur = self.lower.clone();
        if self.arity() == 0 {
            return vec![vec![]];
        }
        loop {
            out.push(cur.clone());
            let mut i = self.arity();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if cur[i] < self.upper[i] {
                    cur[i] += 1;
                    break;
                }
                cur[i] = self.lower[i];
            }
        }
    }
}

impl FromStr for Window {
    type Err = Error;

    /// `a..b` or `a..b,c..d`.
    fn from_str(s: &str) -> Result<Window> {
        let mut lower = vec![];
        let mut upper = vec![];
        for part in s.split(',') {
            let (a, b) = part
                .trim()
                .split_once("..")
                .ok_or_else(|| Error::Parse(format!("bad window component `{part}`")))?;
            let a: i64 = a
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad window bound `{a}`")))?;
            let b: i64 = b
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad window bound `{b}`")))?;
            lower.push(a);
            upper.push(b);
        }
        Window::new(lower, upper)
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .lower
            .iter()
            .zip(&self.upper)
            .map(|(a, b)| format!("{a}..{b}"))
            .collect();
        f.write_str(&parts.join(","))
    }
}
