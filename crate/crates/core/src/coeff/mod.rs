//! Exact coefficient arithmetic: rationals, cyclotomic fields, polynomials and
//! reduced rational functions in the central variable.

mod cyclo;
mod poly;
mod ratfunc;
mod scalar;

pub use cyclo::{cyclo_reduce, cyclotomic_polynomial, totient, CycloElem};
pub use poly::Poly;
pub use ratfunc::{fmt_poly, ratfunc_normalize, BaseField, RatFunc, ScalarField};
pub use scalar::Scalar;

pub(crate) use ratfunc::check_alpha;
