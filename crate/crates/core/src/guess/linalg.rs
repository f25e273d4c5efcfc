//! Exact and modular linear algebra used by the guesser and the dimension
//! profile.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::modp::{self, ModField};
use crate::coeff::{Poly, RatFunc, Scalar};
use crate::error::{Error, Result};

/// Scale a vector to coprime integral coordinates.
pub fn primitive(v: &[Scalar]) -> Vec<Scalar> {
    let den = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(&x.denominator_lcm()));
    let scaled: Vec<Scalar> = v
        .iter()
        .map(|x| x.scale_rational(&BigRational::from_integer(den.clone())))
        .collect();
    let g = scaled
        .iter()
        .fold(BigInt::zero(), |acc, x| acc.gcd(&x.numerator_gcd()));
    if g.is_zero() || g.is_one() {
        return scaled;
    }
    let inv = BigRational::new(BigInt::one(), g);
    scaled.iter().map(|x| x.scale_rational(&inv)).collect()
}

fn strip_content(row: &mut [Scalar]) {
    let g = row
        .iter()
        .fold(BigInt::zero(), |acc, x| acc.gcd(&x.numerator_gcd()));
    if !g.is_zero() && !g.is_one() {
        let inv = BigRational::new(BigInt::one(), g);
        for x in row.iter_mut() {
            *x = x.scale_rational(&inv);
        }
    }
}

/// Reduced echelon form by fraction-free elimination: rows are kept integral
/// and divided by their content after every update. Returns the nonzero rows
/// and their pivot columns, sorted by pivot.
fn echelon(rows: &[Vec<Scalar>], ncols: usize) -> (Vec<Vec<Scalar>>, Vec<usize>) {
    let mut work: Vec<Vec<Scalar>> = rows
        .iter()
        .map(|r| {
            assert_eq!(r.len(), ncols, "ragged matrix");
            primitive(r)
        })
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect();
    let mut done: Vec<Vec<Scalar>> = vec![];
    let mut pivots = vec![];
    for c in 0..ncols {
        let Some(i) = work.iter().position(|r| !r[c].is_zero()) else {
            continue;
        };
        let prow = work.swap_remove(i);
        let d = prow[c].clone();
        let eliminate = |row: &mut Vec<Scalar>| {
            let a = row[c].clone();
            if a.is_zero() {
                return;
            }
            for (x, y) in row.iter_mut().zip(&prow) {
                *x = &(&d * &*x) - &(&a * y);
            }
            strip_content(row);
        };
        for row in work.iter_mut() {
            eliminate(row);
        }
        for row in done.iter_mut() {
            eliminate(row);
        }
        work.retain(|r| r.iter().any(|x| !x.is_zero()));
        done.push(prow);
        pivots.push(c);
    }
    (done, pivots)
}

/// Basis of `{v : A v = 0}` read off the reduced echelon form: one vector per
/// free column, in increasing column order, each with coprime integral
/// coordinates and a positive entry at its free column.
pub fn exact_nullspace(rows: &[Vec<Scalar>], ncols: usize) -> Vec<Vec<Scalar>> {
    let (done, pivots) = echelon(rows, ncols);
    let mut is_pivot = vec![false; ncols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    (0..ncols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![Scalar::zero(); ncols];
            v[f] = Scalar::one();
            for (row, &pc) in done.iter().zip(&pivots) {
                if !row[f].is_zero() {
                    v[pc] = -(&row[f] / &row[pc]);
                }
            }
            primitive(&v)
        })
        .collect()
}

/// Rank of a scalar matrix.
pub fn exact_rank(rows: &[Vec<Scalar>]) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    echelon(rows, ncols).1.len()
}

fn poly_content(row: &mut [Poly]) {
    let mut g = Poly::zero();
    for x in row.iter() {
        if !x.is_zero() {
            g = if g.is_zero() { x.clone() } else { g.gcd(x) };
            if g.degree() == Some(0) {
                return;
            }
        }
    }
    if g.degree().unwrap_or(0) > 0 {
        for x in row.iter_mut() {
            *x = x.exact_div(&g);
        }
    }
}

/// Rank over the rational function field: rows are cleared of denominators and
/// eliminated fraction-free over the polynomial ring, stripping the polynomial
/// content of each row after every update.
pub fn exact_rank_ratfunc(rows: &[Vec<RatFunc>]) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut work: Vec<Vec<Poly>> = rows
        .iter()
        .map(|r| {
            let den = r.iter().fold(Poly::one(), |acc, x| {
                let g = acc.gcd(x.den());
                (&acc * x.den()).exact_div(&g)
            });
            r.iter()
                .map(|x| (x.num() * &den).exact_div(x.den()))
                .collect::<Vec<Poly>>()
        })
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect();
    let mut rank = 0;
    for c in 0..ncols {
        let Some(i) = work.iter().position(|r| !r[c].is_zero()) else {
            continue;
        };
        let prow = work.swap_remove(i);
        rank += 1;
        for row in work.iter_mut() {
            let a = row[c].clone();
            if a.is_zero() {
                continue;
            }
            for (x, y) in row.iter_mut().zip(&prow) {
                *x = &(&prow[c] * &*x) - &(&a * y);
            }
            poly_content(row);
        }
        work.retain(|r| r.iter().any(|x| !x.is_zero()));
    }
    rank
}

/// Bounds of the random evaluation points.
pub const SAMPLE_RANGE: (u64, u64) = (2, 1 << 16);

/// Rank of a matrix over the rational function field, estimated as the
/// maximum rank over the forced points and `samples` random points drawn
/// from `[2, 2^16]`. Each specialised matrix is ranked modulo a 61-bit prime.
/// A point where some entry has a pole is redrawn; forced points that hit a
/// pole are skipped.
pub fn probabilistic_rank(
    rows: &[Vec<RatFunc>],
    samples: usize,
    seed: u64,
    forced: &[i64],
) -> Result<usize> {
    let order = rows
        .iter()
        .flatten()
        .map(|x| x.field().order())
        .fold(1u32, |a, b| a.lcm(&b));
    let field = ModField::new(order, 0);
    let at = |x: u64| -> Option<Vec<Vec<u64>>> {
        rows.iter()
            .map(|r| r.iter().map(|e| field.ratfunc_at(e, x)).collect())
            .collect()
    };
    let mut best = 0;
    for &x in forced {
        let xm = field.int(&BigInt::from(x));
        if let Some(m) = at(xm) {
            best = best.max(modp::rank(m, field.p));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let mut tries = 0;
        loop {
            let x = rng.gen_range(SAMPLE_RANGE.0..=SAMPLE_RANGE.1);
            if let Some(m) = at(x) {
                best = best.max(modp::rank(m, field.p));
                break;
            }
            tries += 1;
            if tries > 64 {
                return Err(Error::SamplingFailed(tries));
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::BaseField;

    fn m(rows: &[&[i64]]) -> Vec<Vec<Scalar>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect())
            .collect()
    }

    #[test]
    fn nullspace_examples() {
        assert!(exact_nullspace(&m(&[&[1, 0], &[0, 1]]), 2).is_empty());
        assert_eq!(exact_nullspace(&m(&[&[0, 0, 0], &[0, 0, 0]]), 3).len(), 3);
        let ns = exact_nullspace(&m(&[&[1, 1, 0], &[0, 1, 1]]), 3);
        assert_eq!(ns, m(&[&[1, -1, 1]]));
        let ns = exact_nullspace(&m(&[&[2, 4, 6]]), 3);
        assert_eq!(ns, m(&[&[-2, 1, 0], &[-3, 0, 1]]));
        assert_eq!(exact_rank(&m(&[&[1, 2], &[2, 4]])), 1);
    }

    #[test]
    fn vandermonde_rank() {
        let f = BaseField::rationals();
        let rows: Vec<Vec<RatFunc>> = (1..=3)
            .map(|i| (0..3).map(|j| RatFunc::q_pow(f, i * j)).collect())
            .collect();
        assert_eq!(exact_rank_ratfunc(&rows), 3);
        assert_eq!(probabilistic_rank(&rows, 3, 7, &[]).unwrap(), 3);
    }

    #[test]
    fn forced_point_does_not_lower_rank() {
        let q1 = &RatFunc::q() - &RatFunc::one();
        let rows = vec![vec![q1.clone()]];
        assert_eq!(probabilistic_rank(&rows, 2, 1, &[1]).unwrap(), 1);
        assert_eq!(probabilistic_rank(&rows, 0, 1, &[1]).unwrap(), 0);
    }
}
