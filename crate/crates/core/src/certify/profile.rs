use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeff::RatFunc;
use crate::error::{Error, Result};
use crate::guess::{exact_rank_ratfunc, mul_mod, ModField, Rref, SAMPLE_RANGE};
use crate::sequences::{Sequence, Window};
use crate::weyl::{monomials_up_to, Monomial};

/// How ranks are computed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankMode {
    /// Maximum over one random specialisation of `q` per seed.
    Probabilistic { seeds: Vec<u64> },
    /// Fraction-free elimination over the polynomial ring.
    Exact,
}

impl RankMode {
    pub fn default_seeds(seed: u64) -> Self {
        RankMode::Probabilistic {
            seeds: vec![seed, seed.wrapping_add(1), seed.wrapping_add(2)],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Consistent,
    Inconsistent,
    Inconclusive,
}

/// `dims[N] = dim F_N W_{r,+} f` for `N = 0..=n_max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiltrationProfile {
    pub sequence: String,
    pub r: usize,
    pub n_max: u32,
    pub grid: Window,
    pub mode: RankMode,
    pub dims: Vec<usize>,
    pub fitted_degree: Option<u32>,
    pub verdict: Verdict,
    /// Fitted degree below `r`.
    pub degenerate: bool,
    /// The grid has fewer points than there are monomials at `n_max`.
    pub underdetermined: bool,
}

/// Smallest cube `[0, g]^r` with at least `count` points.
pub fn default_grid(r: usize, count: usize) -> Window {
    let mut g = 0i64;
    while ((g + 1) as usize).pow(r as u32) < count {
        g += 1;
    }
    Window::cube(r, 0, g)
}

/// Degree `d` such that the `d`-th finite differences over the last
/// `max(3, len/3)` values are constant (at least two of them); `None` if no
/// degree fits that stretch.
pub fn fitted_degree(dims: &[usize]) -> Option<u32> {
    let tail = 3.max(dims.len() / 3);
    if dims.len() < tail {
        return None;
    }
    let mut diffs: Vec<i64> = dims[dims.len() - tail..]
        .iter()
        .map(|&x| x as i64)
        .collect();
    let mut d = 0;
    while diffs.len() >= 2 {
        if diffs.windows(2).all(|w| w[0] == w[1]) {
            return Some(d);
        }
        diffs = diffs.windows(2).map(|w| w[1] - w[0]).collect();
        d += 1;
    }
    None
}

/// Verdict from a fitted degree, plus the flag for a degree below `r`.
pub fn is_qholonomic_verdict(fitted: Option<u32>, r: usize) -> (Verdict, bool) {
    match fitted {
        None => (Verdict::Inconclusive, false),
        Some(d) if d as usize <= r => (Verdict::Consistent, (d as usize) < r),
        Some(_) => (Verdict::Inconsistent, false),
    }
}

/// Rows of the nonnegative monomials with `|eta| <= n_max`, grouped by degree.
fn monomials_by_degree(r: usize, n_max: u32) -> Vec<Vec<Monomial>> {
    let mut by = vec![vec![]; n_max as usize + 1];
    for m in monomials_up_to(r, n_max as i64) {
        by[m.degree() as usize].push(m);
    }
    by
}

fn shifted(n: &[i64], a: &[i64]) -> Vec<i64> {
    n.iter().zip(a).map(|(x, y)| x + y).collect()
}

/// `dims` for one random specialisation; `None` if the point hits a pole.
fn dims_mod_p(
    f: &Sequence,
    by_degree: &[Vec<Monomial>],
    points: &[Vec<i64>],
    field: &ModField,
    x: u64,
) -> Result<Option<Vec<usize>>> {
    let s = f.field().split as i64;
    let mut rref = Rref::new(field.p, points.len());
    let mut dims = vec![];
    // the same shifted index recurs for many monomials
    let mut values: HashMap<Vec<i64>, u64> = HashMap::new();
    for group in by_degree {
        for m in group {
            let mut row = Vec::with_capacity(points.len());
            for n in points {
                let idx = shifted(n, &m.alpha);
                let fv = match values.get(&idx) {
                    Some(&v) => v,
                    None => {
                        let Some(v) = field.ratfunc_at(&f.eval(&idx)?, x) else {
                            return Ok(None);
                        };
                        values.insert(idx, v);
                        v
                    }
                };
                let e = s * m.beta.iter().zip(n).map(|(b, y)| b * y).sum::<i64>();
                let Some(w) = field.pow_signed(x, e) else {
                    return Ok(None);
                };
                row.push(mul_mod(fv, w, field.p));
            }
            rref.push(row);
            if rref.is_full() {
                break;
            }
        }
        dims.push(rref.rank());
    }
    Ok(Some(dims))
}

fn dims_exact(
    f: &Sequence,
    by_degree: &[Vec<Monomial>],
    points: &[Vec<i64>],
) -> Result<Vec<usize>> {
    let mut rows: Vec<Vec<RatFunc>> = vec![];
    let mut dims = vec![];
    for group in by_degree {
        for m in group {
            let row = points
                .iter()
                .map(|n| {
                    let v = f.eval(&shifted(n, &m.alpha))?;
                    let e: i64 = m.beta.iter().zip(n).map(|(b, y)| b * y).sum();
                    Ok(&v * &RatFunc::q_pow(f.field(), e))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        dims.push(exact_rank_ratfunc(&rows));
    }
    Ok(dims)
}

/// Ranks of `{L^alpha M^beta f : |eta| <= N}` evaluated on `grid`.
pub fn dimension_profile(
    f: &Sequence,
    n_max: u32,
    grid: Option<Window>,
    mode: &RankMode,
) -> Result<FiltrationProfile> {
    let r = f.arity();
    let by_degree = monomials_by_degree(r, n_max);
    let count: usize = by_degree.iter().map(Vec::len).sum();
    let grid = grid.unwrap_or_else(|| default_grid(r, count));
    if grid.arity() != r {
        return Err(Error::ArityMismatch(r, grid.arity()));
    }
    let points = grid.points();
    let dims = match mode {
        RankMode::Exact => dims_exact(f, &by_degree, &points)?,
        RankMode::Probabilistic { seeds } => {
            if seeds.is_empty() {
                return Err(Error::Invalid("need at least one seed".into()));
            }
            let field = ModField::new(f.field().order(), 0);
            let per_seed: Vec<Vec<usize>> = seeds
                .par_iter()
                .map(|&seed| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    for _ in 0..64 {
                        let x = rng.gen_range(SAMPLE_RANGE.0..=SAMPLE_RANGE.1);
                        if let Some(d) = dims_mod_p(f, &by_degree, &points, &field, x)? {
                            return Ok(d);
                        }
                    }
                    Err(Error::SamplingFailed(64))
                })
                .collect::<Result<_>>()?;
            (0..=n_max as usize)
                .map(|i| per_seed.iter().map(|d| d[i]).max().unwrap())
                .collect()
        }
    };
    let fitted = fitted_degree(&dims);
    let (verdict, degenerate) = is_qholonomic_verdict(fitted, r);
    Ok(FiltrationProfile {
        sequence: f.id().to_string(),
        r,
        n_max,
        underdetermined: points.len() < count,
        grid,
        mode: mode.clone(),
        dims,
        fitted_degree: fitted,
        verdict,
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_fitting() {
        assert_eq!(fitted_degree(&[1, 3, 5, 7, 9, 11]), Some(1));
        assert_eq!(fitted_degree(&[1, 1, 1, 1]), Some(0));
        assert_eq!(
            fitted_degree(&[1, 3, 6, 10, 15, 21, 28, 36, 45, 55, 66, 78, 91]),
            Some(2)
        );
        assert_eq!(fitted_degree(&[1, 2, 4, 8, 16, 32]), None);
        assert_eq!(fitted_degree(&[1, 2]), None);
    }

    #[test]
    fn verdicts() {
        assert_eq!(
            is_qholonomic_verdict(Some(1), 1),
            (Verdict::Consistent, false)
        );
        assert_eq!(
            is_qholonomic_verdict(Some(2), 1),
            (Verdict::Inconsistent, false)
        );
        assert_eq!(
            is_qholonomic_verdict(None, 1),
            (Verdict::Inconclusive, false)
        );
        assert_eq!(
            is_qholonomic_verdict(Some(0), 2),
            (Verdict::Consistent, true)
        );
    }

    #[test]
    fn grid_size() {
        assert_eq!(default_grid(2, 1820), Window::cube(2, 0, 42));
        assert_eq!(default_grid(1, 66), Window::cube(1, 0, 65));
    }
}
