//! Evaluable sequences, the operator actions on them, a library of built-in
//! examples and the sequence-level substitutions used by the closure module.

mod builtins;
mod registry;
mod sequence;
mod window;

pub use builtins::{
    binomial, constant_one, delta_at_origin, factorial, identity, pochhammer_poly, q_binomial,
    q_binomial_poly, q_integer, q_pochhammer, q_power_bilinear, q_power_square,
};
pub use registry::{builtin, REGISTRY};
pub use sequence::{
    apply, apply_classical, apply_mixed, seq_diagonal, seq_dq, seq_eval_at_root, seq_product,
    seq_subst_alpha, seq_subst_root, seq_subst_scaled, seq_sum, Domain, Sequence,
};
pub use window::Window;
