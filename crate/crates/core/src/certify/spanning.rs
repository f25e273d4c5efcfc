use serde::{Deserialize, Serialize};

use super::certificate::Certificate;
use super::profile::{fitted_degree, is_qholonomic_verdict};
use crate::coeff::RatFunc;
use crate::error::{Error, Result};
use crate::sequences::{apply, Sequence, Window};
use crate::weyl::{monomial_dominates, monomials_up_to, Monomial, Operator, Var};

/// One recorded exclusion: the certificate entry for `subset` has leading
/// monomial `xi` (after clearing to nonnegative exponents), and monomials with
/// `eta_j >= k_j` on every coordinate are rewritten away.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeStep {
    pub subset: Vec<Var>,
    pub xi: Monomial,
    pub k: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanningSet {
    pub n: u32,
    pub generators: Vec<Monomial>,
    pub excluded_cones: Vec<ConeStep>,
}

/// `P` cleared to `W_{r,+}` and scaled so its leading coefficient is 1.
struct Rewrite {
    subset: Vec<Var>,
    lead: Monomial,
    /// `X - P` for the rescaled `P`; every monomial is below `X`.
    tail: Operator,
}

fn rewrites(cert: &Certificate) -> Result<Vec<Rewrite>> {
    cert.require_complete()?;
    cert.entries
        .iter()
        .map(|e| {
            let p = e.operator.clear_to_positive();
            let (x, c) = p.leading_term()?;
            let x = x.clone();
            let p = p.scale(&c.inv().ok_or(Error::ZeroOperator)?);
            let xop = Operator::monomial(x.clone(), RatFunc::one());
            Ok(Rewrite {
                subset: e.subset.clone(),
                tail: xop.sub(&p)?,
                lead: x,
            })
        })
        .collect()
}

/// Leading monomials of all certificate entries, in entry order.
pub fn cone_trace(cert: &Certificate) -> Result<Vec<ConeStep>> {
    Ok(rewrites(cert)?
        .into_iter()
        .map(|w| ConeStep {
            subset: w.subset,
            k: w.lead.exponents(),
            xi: w.lead,
        })
        .collect())
}

/// Monomials with `|eta| <= n` that dominate no recorded leading monomial.
/// All cones are excluded in a single pass.
pub fn spanning_set(cert: &Certificate, n: u32) -> Result<SpanningSet> {
    let cones = cone_trace(cert)?;
    let generators = monomials_up_to(cert.r, n as i64)
        .into_iter()
        .filter(|m| !cones.iter().any(|c| monomial_dominates(m, &c.xi)))
        .collect();
    Ok(SpanningSet {
        n,
        generators,
        excluded_cones: cones,
    })
}

/// `Y f` rewritten as `R f` with every monomial of `R` outside the excluded
/// cones; `R f = Y f` was checked on `verified_window`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reduction {
    pub monomial: Monomial,
    pub operator: Operator,
    pub rewrites: usize,
    pub verified_window: Window,
}

const REWRITE_GUARD: usize = 100_000;

/// Repeatedly replace the largest dominated term `c T` with
/// `c q^(-a_Z.b_X) Z (X - P)` where `T = q^(-a_Z.b_X) Z X`.
pub fn reduce_monomial(
    y: &Monomial,
    cert: &Certificate,
    f: &Sequence,
    window: &Window,
) -> Result<Reduction> {
    if !y.is_nonnegative() || y.arity() != cert.r {
        return Err(Error::Invalid(format!(
            "{y} is not a monomial of W_{{{},+}}",
            cert.r
        )));
    }
    let rules = rewrites(cert)?;
    let mut r = Operator::monomial(y.clone(), RatFunc::one());
    let mut steps = 0;
    loop {
        let hit = r.terms().rev().find_map(|(t, c)| {
            rules
                .iter()
                .find(|w| monomial_dominates(t, &w.lead))
                .map(|w| (t.clone(), c.clone(), w))
        });
        let Some((t, c, w)) = hit else { break };
        steps += 1;
        assert!(
            steps < REWRITE_GUARD,
            "monomial rewriting did not terminate"
        );
        let z = t.minus(&w.lead);
        let lambda = RatFunc::q_pow(f.field(), -z.commutation_exponent(&w.lead));
        let replaced = w.tail.left_mul_monomial(&z, &(&c * &lambda));
        let mut drop = Operator::monomial(t, c);
        drop.set_field(r.field());
        r = r.sub(&drop)?.add(&replaced)?;
    }
    let lhs = apply(&Operator::monomial(y.clone(), RatFunc::one()), f)?;
    let rhs = apply(&r, f)?;
    for n in window.points() {
        if lhs.eval(&n)? != rhs.eval(&n)? {
            return Err(Error::Invalid(format!(
                "reduction of {y} disagrees with the sequence at {n:?}"
            )));
        }
    }
    Ok(Reduction {
        monomial: y.clone(),
        operator: r,
        rewrites: steps,
        verified_window: window.clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountTable {
    pub counts: Vec<(u32, usize)>,
    pub fitted_degree: Option<u32>,
    /// Fitted degree at most `r`.
    pub consistent: bool,
    /// Fitted degree below `r`.
    pub degenerate: bool,
}

/// `|spanning_set(N)|` for each `N` in `ns` (taken in the given order) and
/// the growth degree fitted to them.
pub fn spanning_count_check(cert: &Certificate, ns: &[u32]) -> Result<CountTable> {
    let counts: Vec<(u32, usize)> = ns
        .iter()
        .map(|&n| Ok((n, spanning_set(cert, n)?.generators.len())))
        .collect::<Result<_>>()?;
    let values: Vec<usize> = counts.iter().map(|c| c.1).collect();
    let fitted = fitted_degree(&values);
    let (verdict, degenerate) = is_qholonomic_verdict(fitted, cert.r);
    Ok(CountTable {
        counts,
        fitted_degree: fitted,
        consistent: verdict == super::profile::Verdict::Consistent,
        degenerate,
    })
}
