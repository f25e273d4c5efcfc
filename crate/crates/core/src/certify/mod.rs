//! Strong finiteness certificates, filtration dimension profiles and the
//! spanning-set reduction behind them.

mod certificate;
mod profile;
mod spanning;

pub use certificate::{
    certify_classical, certify_classical_with_windows, certify_strong_finiteness,
    certify_with_multiplicities, certify_with_windows, generator_subsets, subset_label, CertEntry,
    Certificate, WindowPolicy, CLASSICAL_SCHEDULE, DEFAULT_SCHEDULE,
};
pub use profile::{
    default_grid, dimension_profile, fitted_degree, is_qholonomic_verdict, FiltrationProfile,
    RankMode, Verdict,
};
pub use spanning::{
    cone_trace, reduce_monomial, spanning_count_check, spanning_set, ConeStep, CountTable,
    Reduction, SpanningSet,
};
