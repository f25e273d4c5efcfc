use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::cyclo::CycloElem;

/// An element of `Q` or of some cyclotomic field `Q(zeta_p)`.
///
/// Values that happen to be rational are always stored in the rational arm, so
/// the cyclotomic arm only holds genuinely irrational elements. Operands of
/// different cyclotomic orders are embedded into the field of the lcm order.
#[derive(Clone, Debug)]
pub struct Scalar(Repr);

#[derive(Clone, Debug)]
enum Repr {
    Rat(BigRational),
    Cyc(CycloElem),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar(Repr::Rat(BigRational::zero()))
    }

    pub fn one() -> Self {
        Scalar(Repr::Rat(BigRational::one()))
    }

    pub fn from_int(n: i64) -> Self {
        Scalar(Repr::Rat(BigRational::from_integer(n.into())))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Scalar(Repr::Rat(BigRational::from_integer(n)))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Scalar(Repr::Rat(BigRational::new(n.into(), d.into())))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Scalar(Repr::Rat(r))
    }

    pub fn from_cyclo(c: CycloElem) -> Self {
        match c.as_rational() {
            Some(r) => Scalar(Repr::Rat(r.clone())),
            None => Scalar(Repr::Cyc(c)),
        }
    }

    /// `zeta_p = exp(2 pi i / p)`; rational for `p <= 2`.
    pub fn zeta(p: u32) -> Self {
        Self::from_cyclo(CycloElem::generator(p))
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Rat(r) => r.is_zero(),
            Repr::Cyc(_) => false,
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(&self.0, Repr::Rat(r) if r.is_one())
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.0 {
            Repr::Rat(r) => Some(r),
            Repr::Cyc(_) => None,
        }
    }

    /// Cyclotomic order this value needs (1 for rationals).
    pub fn order(&self) -> u32 {
        match &self.0 {
            Repr::Rat(_) => 1,
            Repr::Cyc(c) => c.order(),
        }
    }

    /// Power-basis coordinates over `Q` in the field of the given order.
    pub fn coords(&self, order: u32) -> Vec<BigRational> {
        match &self.0 {
            Repr::Rat(r) => CycloElem::from_rational(order, r.clone()).coeffs().to_vec(),
            Repr::Cyc(c) => c.embed(order).coeffs().to_vec(),
        }
    }

    pub fn to_cyclo(&self, order: u32) -> CycloElem {
        match &self.0 {
            Repr::Rat(r) => CycloElem::from_rational(order, r.clone()),
            Repr::Cyc(c) => c.embed(order.lcm(&c.order())),
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        match &self.0 {
            Repr::Rat(r) if r.is_zero() => None,
            Repr::Rat(r) => Some(Scalar(Repr::Rat(r.recip()))),
            Repr::Cyc(c) => c.inv().map(Scalar::from_cyclo),
        }
    }

    pub fn pow(&self, e: i64) -> Scalar {
        if e < 0 {
            return self.inv().expect("negative power of zero").pow(-e);
        }
        if let Repr::Rat(r) = &self.0 {
            return Scalar(Repr::Rat(num_traits::pow(r.clone(), e as usize)));
        }
        let mut base = self.clone();
        let mut acc = Scalar::one();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Lcm of all rational denominators appearing in the coordinates.
    pub fn denominator_lcm(&self) -> BigInt {
        match &self.0 {
            Repr::Rat(r) => r.denom().clone(),
            Repr::Cyc(c) => c.denominator_lcm(),
        }
    }

    /// Gcd of the numerators of the coordinates (assumes integral coordinates).
    pub fn numerator_gcd(&self) -> BigInt {
        match &self.0 {
            Repr::Rat(r) => r.numer().abs(),
            Repr::Cyc(c) => c
                .coeffs()
                .iter()
                .fold(BigInt::zero(), |acc, x| acc.gcd(x.numer())),
        }
    }

    pub fn scale_rational(&self, c: &BigRational) -> Scalar {
        match &self.0 {
            Repr::Rat(r) => Scalar(Repr::Rat(r * c)),
            Repr::Cyc(x) => Scalar::from_cyclo(x.scale(c)),
        }
    }

    /// Sign of the leading (highest power of `z`) nonzero coordinate.
    pub fn leading_sign(&self) -> i32 {
        let coords = match &self.0 {
            Repr::Rat(r) => vec![r.clone()],
            Repr::Cyc(c) => c.coeffs().to_vec(),
        };
        for c in coords.iter().rev() {
            if c.is_positive() {
                return 1;
            }
            if c.is_negative() {
                return -1;
            }
        }
        0
    }

    /// Small-integer view, used by tests and text output.
    pub fn to_i64(&self) -> Option<i64> {
        match &self.0 {
            Repr::Rat(r) if r.is_integer() => r.numer().to_i64(),
            _ => None,
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Rat(a), Repr::Rat(b)) => a == b,
            (Repr::Cyc(a), Repr::Cyc(b)) => {
                if a.order() == b.order() {
                    a == b
                } else {
                    let l = a.order().lcm(&b.order());
                    a.embed(l) == b.embed(l)
                }
            }
            _ => false,
        }
    }
}

impl Eq for Scalar {}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::from_rational(r)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        match (&self.0, &rhs.0) {
            (Repr::Rat(a), Repr::Rat(b)) => Scalar(Repr::Rat(a + b)),
            (Repr::Cyc(a), Repr::Cyc(b)) => Scalar::from_cyclo(a.add(b)),
            (Repr::Cyc(a), Repr::Rat(b)) | (Repr::Rat(b), Repr::Cyc(a)) => {
                Scalar::from_cyclo(a.add(&CycloElem::from_rational(a.order(), b.clone())))
            }
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match (&self.0, &rhs.0) {
            (Repr::Rat(a), Repr::Rat(b)) => Scalar(Repr::Rat(a * b)),
            (Repr::Cyc(a), Repr::Cyc(b)) => Scalar::from_cyclo(a.mul(b)),
            (Repr::Cyc(a), Repr::Rat(b)) | (Repr::Rat(b), Repr::Cyc(a)) => {
                Scalar::from_cyclo(a.scale(b))
            }
        }
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        self * &rhs.inv().expect("scalar division by zero")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match &self.0 {
            Repr::Rat(a) => Scalar(Repr::Rat(-a)),
            Repr::Cyc(a) => Scalar(Repr::Cyc(a.neg())),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

/// Text of one rational coefficient, e.g. `3/2`.
pub(crate) fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Terms `(coefficient, z-exponent)` of the scalar, highest `z` power first,
/// where `z` generates the cyclotomic field of the given order (enlarged to the
/// lcm with the scalar's own order if needed).
pub(crate) fn scalar_terms(s: &Scalar, order: u32) -> Vec<(BigRational, usize)> {
    match &s.0 {
        Repr::Rat(r) => {
            if r.is_zero() {
                vec![]
            } else {
                vec![(r.clone(), 0)]
            }
        }
        Repr::Cyc(c) => c
            .embed(order.lcm(&c.order()))
            .coeffs()
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, x)| !x.is_zero())
            .map(|(j, x)| (x.clone(), j))
            .collect(),
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = scalar_terms(self, self.order());
        if terms.is_empty() {
            return write!(f, "0");
        }
        let mut out = String::new();
        for (i, (c, j)) in terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if neg {
                out.push('-');
            } else if i > 0 {
                out.push('+');
            }
            match *j {
                0 => out.push_str(&fmt_rational(&mag)),
                _ => {
                    if !mag.is_one() {
                        out.push_str(&fmt_rational(&mag));
                        out.push('*');
                    }
                    out.push('z');
                    if *j > 1 {
                        out.push_str(&format!("^{j}"));
                    }
                }
            }
        }
        write!(f, "{out}")
    }
}
