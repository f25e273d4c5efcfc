//! Arithmetic modulo a 61-bit prime, used to find rank-raising rows quickly
//! before any exact elimination happens.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::coeff::{Poly, RatFunc, Scalar};

pub const MERSENNE_61: u64 = (1 << 61) - 1;

#[inline]
pub fn mul(a: u64, b: u64, p: u64) -> u64 {
    let x = a as u128 * b as u128;
    if p == MERSENNE_61 {
        // 2^61 = 1 mod p, inputs are reduced
        let r = (x as u64 & MERSENNE_61) + (x >> 61) as u64;
        let r = (r & MERSENNE_61) + (r >> 61);
        if r >= MERSENNE_61 {
            r - MERSENNE_61
        } else {
            r
        }
    } else {
        (x % p as u128) as u64
    }
}

#[inline]
pub fn add(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub fn sub(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

pub fn pow(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(acc, a, p);
        }
        a = mul(a, a, p);
        e >>= 1;
    }
    acc
}

pub fn inv(a: u64, p: u64) -> Option<u64> {
    if a % p == 0 {
        None
    } else {
        Some(pow(a, p - 2, p))
    }
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for sp in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % sp == 0 {
            return n == sp;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'outer: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = vec![];
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// `Z[zeta_o] -> F_p` with `p = 1 mod o` and `zeta_o` sent to a primitive
/// `o`-th root of unity (a root of the cyclotomic polynomial mod `p`).
#[derive(Clone, Copy, Debug)]
pub struct ModField {
    pub p: u64,
    pub order: u32,
    pub zeta: u64,
}

impl ModField {
    /// The `index`-th admissible prime below `2^61` for the given order.
    pub fn new(order: u32, index: usize) -> Self {
        let o = order.max(1) as u64;
        let mut seen = 0;
        let mut c = (MERSENNE_61 - 1) / o * o + 1;
        loop {
            if c <= MERSENNE_61 && is_prime(c) {
                if seen == index {
                    break;
                }
                seen += 1;
            }
            c -= o;
        }
        let p = c;
        let zeta = if o == 1 {
            1
        } else {
            let fs = prime_factors(o);
            let mut g = 2u64;
            loop {
                let z = pow(g, (p - 1) / o, p);
                if fs.iter().all(|&l| pow(z, o / l, p) != 1) {
                    break z;
                }
                g += 1;
            }
        };
        ModField {
            p,
            order: o as u32,
            zeta,
        }
    }

    pub fn int(&self, n: &BigInt) -> u64 {
        let m = n.mod_floor(&BigInt::from(self.p));
        m.to_u64().unwrap()
    }

    pub fn rational(&self, r: &BigRational) -> Option<u64> {
        let d = self.int(r.denom());
        Some(mul(self.int(r.numer()), inv(d, self.p)?, self.p))
    }

    /// Image of a scalar; `None` if a denominator vanishes mod `p`.
    pub fn scalar(&self, s: &Scalar) -> Option<u64> {
        if let Some(r) = s.as_rational() {
            return self.rational(r);
        }
        debug_assert_eq!(self.order % s.order(), 0, "scalar outside the field");
        let coords = s.coords(self.order);
        let mut acc = 0u64;
        let mut zp = 1u64;
        for c in &coords {
            if !c.is_zero() {
                acc = add(acc, mul(self.rational(c)?, zp, self.p), self.p);
            }
            zp = mul(zp, self.zeta, self.p);
        }
        Some(acc)
    }

    pub fn poly_at(&self, f: &Poly, x: u64) -> Option<u64> {
        let mut acc = 0u64;
        let mut xp = 1u64;
        let mut at = 0usize;
        for (e, c) in f.terms() {
            xp = mul(xp, pow(x, (e - at) as u64, self.p), self.p);
            at = e;
            acc = add(acc, mul(self.scalar(c)?, xp, self.p), self.p);
        }
        Some(acc)
    }

    /// `r(x)`; `None` at a pole (or a vanishing denominator coefficient).
    pub fn ratfunc_at(&self, r: &RatFunc, x: u64) -> Option<u64> {
        let n = self.poly_at(r.num(), x)?;
        let d = self.poly_at(r.den(), x)?;
        Some(mul(n, inv(d, self.p)?, self.p))
    }

    /// `x^e` for a possibly negative exponent.
    pub fn pow_signed(&self, x: u64, e: i64) -> Option<u64> {
        if e >= 0 {
            Some(pow(x, e as u64, self.p))
        } else {
            inv(pow(x, e.unsigned_abs(), self.p), self.p)
        }
    }
}

/// Incrementally maintained reduced row echelon form over `F_p`.
#[derive(Clone, Debug)]
pub struct Rref {
    p: u64,
    ncols: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl Rref {
    pub fn new(p: u64, ncols: usize) -> Self {
        Rref {
            p,
            ncols,
            rows: vec![],
            pivots: vec![],
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.ncols
    }

    /// Insert a row; returns true if the rank went up.
    pub fn push(&mut self, mut row: Vec<u64>) -> bool {
        let p = self.p;
        for (r, &pc) in self.rows.iter().zip(&self.pivots) {
            let c = row[pc];
            if c != 0 {
                for (x, &y) in row.iter_mut().zip(r) {
                    if y != 0 {
                        *x = sub(*x, mul(c, y, p), p);
                    }
                }
            }
        }
        let Some(pc) = row.iter().position(|&x| x != 0) else {
            return false;
        };
        let s = inv(row[pc], p).unwrap();
        for x in row.iter_mut() {
            *x = mul(*x, s, p);
        }
        for r in self.rows.iter_mut() {
            let c = r[pc];
            if c != 0 {
                for (x, &y) in r.iter_mut().zip(&row) {
                    if y != 0 {
                        *x = sub(*x, mul(c, y, p), p);
                    }
                }
            }
        }
        let at = self.pivots.partition_point(|&q| q < pc);
        self.rows.insert(at, row);
        self.pivots.insert(at, pc);
        true
    }

    /// Nullspace basis in RREF form: one vector per free column `f`, with a `1`
    /// at `f` and zeros at the other free columns. Returned as `(f, vector)`.
    pub fn nullspace(&self) -> Vec<(usize, Vec<u64>)> {
        let p = self.p;
        let mut out = vec![];
        let mut is_pivot = vec![false; self.ncols];
        for &c in &self.pivots {
            is_pivot[c] = true;
        }
        for f in (0..self.ncols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0u64; self.ncols];
            v[f] = 1;
            for (r, &pc) in self.rows.iter().zip(&self.pivots) {
                if r[f] != 0 {
                    v[pc] = sub(0, r[f], p);
                }
            }
            out.push((f, v));
        }
        out
    }
}

/// Rank of a dense matrix over `F_p`.
pub fn rank(rows: Vec<Vec<u64>>, p: u64) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut e = Rref::new(p, ncols);
    for r in rows {
        e.push(r);
        if e.is_full() {
            break;
        }
    }
    e.rank()
}

/// Rational number `a/b` with `a = x b mod p` and `|a|, |b| <= sqrt(p/2)`.
pub fn reconstruct(x: u64, p: u64) -> Option<BigRational> {
    let bound = ((p / 2) as f64).sqrt() as i128;
    let (mut r0, mut r1) = (p as i128, x as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 > bound {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if t1 == 0 || t1.abs() > bound {
        return None;
    }
    let (a, b) = if t1 < 0 { (-r1, -t1) } else { (r1, t1) };
    let out = BigRational::new(BigInt::from(a), BigInt::from(b));
    // a/b must really map back to x
    let check = ((a.rem_euclid(p as i128)) * 1) as u64;
    let bb = (b as u64) % p;
    (mul(x, bb, p) == check && !out.denom().is_negative()).then_some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_and_roots() {
        assert!(is_prime(MERSENNE_61));
        let f = ModField::new(1, 0);
        assert_eq!(f.p, MERSENNE_61);
        let f = ModField::new(12, 0);
        assert_eq!((f.p - 1) % 12, 0);
        assert_eq!(pow(f.zeta, 12, f.p), 1);
        assert_ne!(pow(f.zeta, 6, f.p), 1);
        assert_ne!(pow(f.zeta, 4, f.p), 1);
        // zeta_12 is a root of Phi_12 = x^4 - x^2 + 1
        let z2 = mul(f.zeta, f.zeta, f.p);
        let v = add(sub(mul(z2, z2, f.p), z2, f.p), 1, f.p);
        assert_eq!(v, 0);
        let z = Scalar::zeta(12);
        assert_eq!(f.scalar(&z.pow(5)).unwrap(), pow(f.zeta, 5, f.p));
    }

    #[test]
    fn reconstruction() {
        let p = MERSENNE_61;
        for (a, b) in [(3i64, 7i64), (-5, 12), (0, 1), (123456, 789)] {
            let x = mul(
                (a.rem_euclid(p as i64)) as u64,
                inv(b as u64, p).unwrap(),
                p,
            );
            assert_eq!(
                reconstruct(x, p).unwrap(),
                BigRational::new(a.into(), b.into())
            );
        }
    }

    #[test]
    fn rref_nullspace() {
        let p = MERSENNE_61;
        let mut e = Rref::new(p, 3);
        assert!(e.push(vec![1, 1, 0]));
        assert!(e.push(vec![0, 1, 1]));
        assert!(!e.push(vec![1, 2, 1]));
        let ns = e.nullspace();
        assert_eq!(ns.len(), 1);
        assert_eq!(ns[0].1, vec![1, p - 1, 1]);
    }

    #[test]
    fn mersenne_reduction_matches_generic() {
        let p = MERSENNE_61;
        for (a, b) in [(p - 1, p - 1), (p - 2, 3), (1 << 60, 1 << 60), (12345, 0)] {
            let slow = ((a as u128 * b as u128) % p as u128) as u64;
            assert_eq!(mul(a, b, p), slow);
        }
    }
}
