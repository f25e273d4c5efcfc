//! Exact toolkit for q-holonomic sequences.
//!
//! The crate decides and certifies q-holonomicity of multivariate sequences by
//! searching for annihilating operators supported on every `(r+1)`-subset of the
//! generators `L_1..L_r, M_1..M_r` of the quantum Weyl algebra, and transports
//! such certificates through the substitutions `q -> zeta q`, `q -> q^alpha`, the
//! q-derivative and evaluation at roots of unity.

pub mod certify;
pub mod closure;
pub mod coeff;
pub mod error;
pub mod guess;
pub mod json;
pub mod sequences;
pub mod text;
pub mod weyl;

pub use coeff::{BaseField, CycloElem, Poly, RatFunc, Scalar, ScalarField};
pub use error::{Error, Result};
pub use weyl::{ClassicalOperator, MixedOperator, Monomial, Operator, Var, Variant};
