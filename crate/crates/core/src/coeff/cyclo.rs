//! Cyclotomic fields `Q(zeta_p)` in the power basis `1, z, ..., z^(phi(p)-1)`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Dense rational polynomial, lowest degree first, trimmed.
pub(crate) type RPoly = Vec<BigRational>;

fn trim(p: &mut RPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

/// Integer coefficients of the `n`-th cyclotomic polynomial, lowest degree first.
pub fn cyclotomic_polynomial(n: u32) -> Arc<Vec<BigInt>> {
    assert!(n >= 1, "cyclotomic order must be positive");
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<BigInt>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by every Phi_d with d | n, d < n
    let mut num: Vec<BigInt> = vec![BigInt::zero(); n as usize + 1];
    num[0] = BigInt::from(-1);
    num[n as usize] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            let div = cyclotomic_polynomial(d);
            num = int_exact_div(&num, &div);
        }
    }
    let out = Arc::new(num);
    cache.lock().unwrap().insert(n, out.clone());
    out
}

/// Exact division of integer polynomials by a monic divisor.
fn int_exact_div(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    debug_assert!(b[db].is_one());
    let mut rem = a.to_vec();
    let mut quot = vec![BigInt::zero(); a.len() - db];
    for i in (0..quot.len()).rev() {
        let c = rem[i + db].clone();
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            rem[i + j] -= &c * bj;
        }
        quot[i] = c;
    }
    debug_assert!(rem.iter().all(|c| c.is_zero()));
    quot
}

/// Euler's totient, i.e. the degree of the `n`-th cyclotomic polynomial.
pub fn totient(n: u32) -> usize {
    let mut n = n;
    let mut out = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if n > 1 {
        out -= out / n;
    }
    out as usize
}

/// An element of `Q(zeta_p)` reduced modulo `Phi_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycloElem {
    order: u32,
    coeffs: Vec<BigRational>,
}

impl CycloElem {
    pub fn zero(order: u32) -> Self {
        CycloElem {
            order,
            coeffs: vec![BigRational::zero(); totient(order)],
        }
    }

    pub fn from_rational(order: u32, c: BigRational) -> Self {
        let mut out = Self::zero(order);
        out.coeffs[0] = c;
        out
    }

    /// The generator `zeta_p` itself.
    pub fn generator(order: u32) -> Self {
        Self::reduce_rational(&[BigRational::zero(), BigRational::one()], order)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// `Some(c)` when the element lies in `Q`.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    /// Reduce a rational polynomial in `z` modulo `Phi_order`.
    pub fn reduce_rational(poly: &[BigRational], order: u32) -> Self {
        let phi = cyclotomic_polynomial(order);
        let d = phi.len() - 1;
        let mut rem: RPoly = poly.to_vec();
        if rem.len() > d {
            for i in (d..rem.len()).rev() {
                let c = rem[i].clone();
                if c.is_zero() {
                    continue;
                }
                for (j, pj) in phi.iter().enumerate() {
                    if !pj.is_zero() {
                        rem[i - d + j] -= &c * BigRational::from_integer(pj.clone());
                    }
                }
            }
        }
        rem.resize(d, BigRational::zero());
        CycloElem { order, coeffs: rem }
    }

    /// Image under `Q(zeta_p) -> Q(zeta_L)`, `zeta_p -> zeta_L^(L/p)`.
    pub fn embed(&self, target: u32) -> CycloElem {
        if target == self.order {
            return self.clone();
        }
        assert!(
            target % self.order == 0,
            "cannot embed order {} into order {}",
            self.order,
            target
        );
        let step = (target / self.order) as usize;
        let mut poly = vec![BigRational::zero(); (self.coeffs.len().max(1) - 1) * step + 1];
        for (j, c) in self.coeffs.iter().enumerate() {
            poly[j * step] = c.clone();
        }
        Self::reduce_rational(&poly, target)
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = unify(self, other);
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect();
        CycloElem {
            order: a.order,
            coeffs,
        }
    }

    pub fn neg(&self) -> Self {
        CycloElem {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        CycloElem {
            order: self.order,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = unify(self, other);
        let mut prod = vec![BigRational::zero(); a.coeffs.len() * 2];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        Self::reduce_rational(&prod, a.order)
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against `Phi_p`.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let phi: RPoly = cyclotomic_polynomial(self.order)
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        let mut a: RPoly = self.coeffs.clone();
        trim(&mut a);
        // invariant: s * a_orig == r0 (mod phi)
        let (mut r0, mut r1) = (a, phi);
        let (mut s0, mut s1): (RPoly, RPoly) = (vec![BigRational::one()], vec![]);
        while !r1.is_empty() {
            let (q, r) = rpoly_divrem(&r0, &r1);
            let s2 = rpoly_sub(&s0, &rpoly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        // r0 is a nonzero constant because Phi_p is irreducible
        debug_assert_eq!(r0.len(), 1);
        let c = r0[0].recip();
        let s: RPoly = s0.iter().map(|x| x * &c).collect();
        Some(Self::reduce_rational(&s, self.order))
    }

    /// Least common multiple of the coefficient denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }
}

fn unify<'a>(
    a: &'a CycloElem,
    b: &'a CycloElem,
) -> (
    std::borrow::Cow<'a, CycloElem>,
    std::borrow::Cow<'a, CycloElem>,
) {
    use std::borrow::Cow;
    if a.order == b.order {
        (Cow::Borrowed(a), Cow::Borrowed(b))
    } else {
        let l = a.order.lcm(&b.order);
        (Cow::Owned(a.embed(l)), Cow::Owned(b.embed(l)))
    }
}

/// Reduce an integer-coefficient polynomial in `x` modulo `Phi_p`.
pub fn cyclo_reduce(poly: &[BigInt], p: u32) -> CycloElem {
    let rp: RPoly = poly
        .iter()
        .map(|c| BigRational::from_integer(c.clone()))
        .collect();
    CycloElem::reduce_rational(&rp, p)
}

pub(crate) fn rpoly_mul(a: &RPoly, b: &RPoly) -> RPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

pub(crate) fn rpoly_sub(a: &RPoly, b: &RPoly) -> RPoly {
    let n = a.len().max(b.len());
    let mut out: RPoly = (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(BigRational::zero);
            let y = b.get(i).cloned().unwrap_or_else(BigRational::zero);
            x - y
        })
        .collect();
    trim(&mut out);
    out
}

pub(crate) fn rpoly_divrem(a: &RPoly, b: &RPoly) -> (RPoly, RPoly) {
    assert!(!b.is_empty(), "polynomial division by zero");
    let mut rem = a.clone();
    trim(&mut rem);
    if rem.len() < b.len() {
        return (vec![], rem);
    }
    let db = b.len() - 1;
    let lead_inv = b[db].recip();
    let mut quot = vec![BigRational::zero(); rem.len() - db];
    for i in (0..quot.len()).rev() {
        let c = &rem[i + db] * &lead_inv;
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            rem[i + j] -= &c * bj;
        }
        quot[i] = c;
    }
    trim(&mut rem);
    trim(&mut quot);
    (quot, rem)
}
