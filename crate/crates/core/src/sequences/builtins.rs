use num_bigint::BigInt;
use num_traits::One;

use super::sequence::{Domain, Sequence};
use crate::coeff::{BaseField, Poly, RatFunc, Scalar};

fn rationals() -> BaseField {
    BaseField::rationals()
}

/// `q^(n^2)`.
pub fn q_power_square() -> Sequence {
    Sequence::new("qpow2", 1, Domain::Integers, rationals(), |n| {
        Ok(RatFunc::q_pow(rationals(), n[0] * n[0]))
    })
}

/// `q^(n k)`.
pub fn q_power_bilinear() -> Sequence {
    Sequence::new("qnk", 2, Domain::Integers, rationals(), |n| {
        Ok(RatFunc::q_pow(rationals(), n[0] * n[1]))
    })
}

/// `(q;q)_n = prod_(i=1..n) (1 - q^i)` as a polynomial, `1` for `n = 0`.
pub fn pochhammer_poly(n: i64) -> Poly {
    let mut acc = Poly::one();
    for i in 1..=n.max(0) as usize {
        let mut f = Poly::monomial(Scalar::from_int(-1), i);
        f = &f + &Poly::one();
        acc = &acc * &f;
    }
    acc
}

/// `(q;q)_n`, zero for `n < 0`.
pub fn q_pochhammer() -> Sequence {
    Sequence::new("poch", 1, Domain::Integers, rationals(), |n| {
        Ok(if n[0] < 0 {
            RatFunc::zero()
        } else {
            RatFunc::from_poly(rationals(), pochhammer_poly(n[0]))
        })
    })
}

/// Gaussian binomial by the product formula `prod_(i=1..k) (1-q^(n-k+i))/(1-q^i)`.
pub fn q_binomial_poly(n: i64, k: i64) -> Poly {
    if k < 0 || k > n {
        return Poly::zero();
    }
    let k = k.min(n - k);
    let mut num = Poly::one();
    let mut den = Poly::one();
    for i in 1..=k {
        let a = Poly::monomial(Scalar::from_int(-1), (n - k + i) as usize);
        num = &num * &(&a + &Poly::one());
        let b = Poly::monomial(Scalar::from_int(-1), i as usize);
        den = &den * &(&b + &Poly::one());
    }
    num.exact_div(&den)
}

/// Gaussian binomial `[n choose k]_q`, zero outside `0 <= k <= n`.
pub fn q_binomial() -> Sequence {
    Sequence::new("qbinom", 2, Domain::Integers, rationals(), |n| {
        Ok(RatFunc::from_poly(rationals(), q_binomial_poly(n[0], n[1])))
    })
}

/// `[n]_q = (1 - q^n)/(1 - q)`.
pub fn q_integer() -> Sequence {
    Sequence::new("qint", 1, Domain::Integers, rationals(), |n| {
        let one = RatFunc::one();
        let num = &one - &RatFunc::q_pow(rationals(), n[0]);
        let den = &one - &RatFunc::q();
        Ok(&num / &den)
    })
}

/// `1` at the origin, `0` elsewhere, on `N^r`.
pub fn delta_at_origin(r: usize) -> Sequence {
    Sequence::new(
        format!("delta({r})"),
        r,
        Domain::Naturals,
        rationals(),
        |n| {
            Ok(if n.iter().all(|&x| x == 0) {
                RatFunc::one()
            } else {
                RatFunc::zero()
            })
        },
    )
}

fn constant(v: BigInt) -> RatFunc {
    RatFunc::constant(rationals(), Scalar::from_bigint(v))
}

/// Binomial coefficient `C(n, k)`, zero outside `0 <= k <= n`.
pub fn binomial() -> Sequence {
    Sequence::new("binom", 2, Domain::Integers, rationals(), |n| {
        let (a, b) = (n[0], n[1]);
        if b < 0 || b > a {
            return Ok(RatFunc::zero());
        }
        let b = b.min(a - b);
        let mut acc = BigInt::one();
        for i in 1..=b {
            acc = acc * BigInt::from(a - b + i) / BigInt::from(i);
        }
        Ok(constant(acc))
    })
}

/// `g_n = n`.
pub fn identity() -> Sequence {
    Sequence::new("n", 1, Domain::Integers, rationals(), |n| {
        Ok(constant(BigInt::from(n[0])))
    })
}

/// `n!` on the naturals.
pub fn factorial() -> Sequence {
    Sequence::new("fact", 1, Domain::Naturals, rationals(), |n| {
        let mut acc = BigInt::one();
        for i in 2..=n[0] {
            acc *= i;
        }
        Ok(constant(acc))
    })
}

/// The constant sequence `1` in arity `r`.
pub fn constant_one(r: usize) -> Sequence {
    Sequence::new(
        format!("one({r})"),
        r,
        Domain::Integers,
        rationals(),
        |_| Ok(RatFunc::one()),
    )
}
