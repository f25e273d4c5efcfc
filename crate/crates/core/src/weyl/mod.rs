//! Quantum and classical Weyl algebras and the mixed operators used by the
//! derivative descent.

mod classical;
mod mixed;
mod monomial;
mod mpoly;
mod operator;

pub use classical::{classical_mul, ClassicalOperator};
pub use mixed::{descend, dq_commutator, op_eval_q1_m1, Descent, MixedOperator};
pub use monomial::{monomial_dominates, monomials_up_to, Monomial, Var};
pub use mpoly::{MPoly, Ring};
pub use operator::{
    clear_to_positive, op_add, op_mul, op_scale, op_subst_alpha, op_subst_root, Operator, Variant,
};

pub(crate) use classical::fmt_mpoly_scalar;
