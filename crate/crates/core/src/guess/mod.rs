//! Ansatz-based search for annihilating operators with prescribed support.
//!
//! Every index of the fit window gives an identity
//! `sum c_eta(q) q^(beta.n) f_(n+alpha) = 0`; after clearing denominators its
//! coefficients in `q` (or `u`) are linear equations in the unknown scalar
//! coefficients. A nullspace vector is accepted only if the operator it
//! describes also annihilates `f` on a disjoint verification window.

mod ansatz;
mod linalg;
mod modp;
mod system;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use ansatz::{Ansatz, Bounds};
pub use linalg::{
    exact_nullspace, exact_rank, exact_rank_ratfunc, primitive, probabilistic_rank, SAMPLE_RANGE,
};
pub use modp::ModField;

use crate::coeff::{BaseField, Poly, RatFunc, Scalar};
use crate::error::{Error, Result};
use crate::sequences::{apply, apply_classical, Sequence, Window};
use crate::weyl::{ClassicalOperator, MPoly, Monomial, Operator, Var, Variant};
use system::{SparseRow, System};

pub(crate) use modp::{mul as mul_mod, Rref};

/// A successful guess.
#[derive(Clone, Debug, PartialEq)]
pub struct GuessResult<O = Operator> {
    pub operator: O,
    pub ansatz: Ansatz,
    pub fit_window: Window,
    pub verified_window: Window,
    /// Dimension of the nullspace of the fitted system.
    pub basis_dim: usize,
    /// Set when `f` vanishes on the fit window and the unit operator was
    /// returned without solving anything.
    pub degenerate: bool,
}

/// Outcome of one ansatz.
#[derive(Clone, Debug, PartialEq)]
pub enum Guess<O = Operator> {
    Found(GuessResult<O>),
    /// The fitted system has only the zero solution.
    Trivial,
    /// Candidates exist but each fails the verification window; the index is
    /// where the first candidate fails.
    Refuted {
        at: Vec<i64>,
    },
}

impl<O> Guess<O> {
    pub fn found(self) -> Option<GuessResult<O>> {
        match self {
            Guess::Found(g) => Some(g),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, Guess::Found(_))
    }
}

/// Which divisibility the closure constructions need.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Divisibility {
    /// M exponents divisible by `p`.
    Root(u32),
    /// M exponents and q exponents divisible by `k`.
    Alpha(u32),
}

/// `[0, 24]` for one variable, `[0, 9]^r` otherwise.
pub fn default_fit_window(r: usize) -> Window {
    if r == 1 {
        Window::cube(1, 0, 24)
    } else {
        Window::cube(r, 0, 9)
    }
}

/// The fit window moved past itself by the shift diameter plus 5, so the two
/// windows never meet.
pub fn default_verify_window(fit: &Window, shift_diameter: i64) -> Window {
    let by: Vec<i64> = fit
        .lower
        .iter()
        .zip(&fit.upper)
        .map(|(a, b)| b - a + 1 + shift_diameter + 5)
        .collect();
    fit.translate(&by)
}

fn check_windows(r: usize, fit: &Window, verify: &Window) -> Result<()> {
    for w in [fit, verify] {
        if w.arity() != r {
            return Err(Error::ArityMismatch(r, w.arity()));
        }
    }
    if fit.intersects(verify) {
        return Err(Error::Invalid(format!(
            "fit window {fit} and verification window {verify} overlap"
        )));
    }
    Ok(())
}

/// First index of `window` where `values` is nonzero.
fn first_nonzero(values: &Sequence, window: &Window) -> Result<Option<Vec<i64>>> {
    let hits: Vec<Option<Vec<i64>>> = window
        .points()
        .into_par_iter()
        .map(|n| Ok((!values.eval(&n)?.is_zero()).then_some(n)))
        .collect::<Result<_>>()?;
    Ok(hits.into_iter().flatten().next())
}

fn vanishes_on(f: &Sequence, window: &Window) -> Result<bool> {
    Ok(first_nonzero(f, window)?.is_none())
}

/// Where `p f` is nonzero on `window`, if anywhere.
pub fn annihilation_failure(
    p: &Operator,
    f: &Sequence,
    window: &Window,
) -> Result<Option<Vec<i64>>> {
    first_nonzero(&apply(p, f)?, window)
}

/// Classical counterpart of [`annihilation_failure`].
pub fn classical_annihilation_failure(
    p: &ClassicalOperator,
    g: &Sequence,
    window: &Window,
) -> Result<Option<Vec<i64>>> {
    first_nonzero(&apply_classical(p, g)?, window)
}

fn poly_lcm(a: &Poly, b: &Poly) -> Poly {
    let g = a.gcd(b);
    (a * b).exact_div(&g)
}

/// Linear equations contributed by the index `n`.
fn quantum_rows(
    f: &Sequence,
    monos: &[Monomial],
    qexps: &[i64],
    n: &[i64],
) -> Result<Vec<SparseRow>> {
    let s = f.field().split as i64;
    let mut vals = Vec::with_capacity(monos.len());
    let mut den = Poly::one();
    for m in monos {
        let idx: Vec<i64> = n.iter().zip(&m.alpha).map(|(a, b)| a + b).collect();
        let v = f.eval(&idx)?;
        if !v.is_zero() {
            den = poly_lcm(&den, v.den());
        }
        vals.push(v);
    }
    let nq = qexps.len();
    let mut rows: BTreeMap<i64, SparseRow> = BTreeMap::new();
    for (i, (m, v)) in monos.iter().zip(&vals).enumerate() {
        if v.is_zero() {
            continue;
        }
        let a = (v.num() * &den).exact_div(v.den());
        let offset = s * m.beta.iter().zip(n).map(|(b, x)| b * x).sum::<i64>();
        for (j, &e) in qexps.iter().enumerate() {
            let col = i * nq + j;
            for (t, c) in a.terms() {
                rows.entry(offset + s * e + t as i64)
                    .or_default()
                    .push((col, c.clone()));
            }
        }
    }
    Ok(rows.into_values().collect())
}

/// Sign convention: among the terms with the greatest shift, the top one
/// (in the monomial order) has a positive coefficient of highest degree.
fn sign_anchor<'a>(support: impl Iterator<Item = &'a Monomial>) -> Option<&'a Monomial> {
    support.max_by(|a, b| a.alpha.cmp(&b.alpha).then_with(|| a.cmp(b)))
}

fn orient(v: Vec<Scalar>, anchor_cols: &[usize]) -> Vec<Scalar> {
    let top = anchor_cols.iter().rev().find(|&&c| !v[c].is_zero());
    match top {
        Some(&c) if v[c].leading_sign() < 0 => v.iter().map(|x| -x).collect(),
        _ => v,
    }
}

/// Candidate order: fewest monomials, then fewest entries, then the earliest
/// free column of the echelon form.
fn rank_candidates(basis: Vec<Vec<Scalar>>, block: usize) -> Vec<Vec<Scalar>> {
    let key = |v: &Vec<Scalar>| {
        let nz: Vec<usize> = (0..v.len()).filter(|&c| !v[c].is_zero()).collect();
        let mut monos: Vec<usize> = nz.iter().map(|c| c / block).collect();
        monos.dedup();
        (monos.len(), nz.len(), nz.last().copied().unwrap_or(0))
    };
    let mut keyed: Vec<_> = basis.into_iter().map(|v| (key(&v), v)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    keyed.into_iter().map(|(_, v)| v).collect()
}

fn build_operator(
    r: usize,
    field: BaseField,
    monos: &[Monomial],
    qexps: &[i64],
    v: &[Scalar],
) -> Operator {
    let nq = qexps.len();
    let s = field.split as i64;
    let support = (0..monos.len()).filter(|&i| (0..nq).any(|j| !v[i * nq + j].is_zero()));
    let anchor = sign_anchor(support.clone().map(|i| &monos[i])).cloned();
    let ai = anchor.and_then(|a| monos.iter().position(|m| *m == a));
    let v = match ai {
        Some(i) => orient(v.to_vec(), &(i * nq..(i + 1) * nq).collect::<Vec<_>>()),
        None => v.to_vec(),
    };
    let mut op = Operator::zero(r, Variant::WrPlus);
    for i in support {
        let terms: Vec<(i64, Scalar)> = (0..nq)
            .filter(|&j| !v[i * nq + j].is_zero())
            .map(|j| (s * qexps[j], v[i * nq + j].clone()))
            .collect();
        op.add_term(monos[i].clone(), RatFunc::from_laurent(field, &terms));
    }
    op.set_field(field);
    op
}

/// Search `ansatz` for an annihilator of `f` fitted on `fit` and checked on
/// `verify`.
pub fn guess_annihilator(
    f: &Sequence,
    ansatz: &Ansatz,
    fit: &Window,
    verify: &Window,
) -> Result<Guess> {
    let r = f.arity();
    ansatz.validate(r)?;
    check_windows(r, fit, verify)?;
    let monos = ansatz.monomials(r);
    let qexps = ansatz.q_exponents();
    if fit.len() < monos.len() {
        return Err(Error::Underdetermined {
            unknowns: monos.len(),
            points: fit.len(),
        });
    }
    let field = f.field();
    let degenerate = |basis_dim| {
        Guess::Found(GuessResult {
            operator: Operator::one(r, Variant::WrPlus),
            ansatz: ansatz.clone(),
            fit_window: fit.clone(),
            verified_window: verify.clone(),
            basis_dim,
            degenerate: true,
        })
    };
    if vanishes_on(f, fit)? {
        return Ok(degenerate(monos.len() * qexps.len()));
    }
    let mut sys = System::new(monos.len() * qexps.len(), field.order());
    let points = fit.points();
    for chunk in points.chunks(16) {
        let rows: Vec<Vec<SparseRow>> = chunk
            .par_iter()
            .map(|n| quantum_rows(f, &monos, &qexps, n))
            .collect::<Result<_>>()?;
        for row in rows.into_iter().flatten() {
            sys.push(row);
        }
        if sys.is_full() {
            return Ok(Guess::Trivial);
        }
    }
    let basis = sys.nullspace();
    if basis.is_empty() {
        return Ok(Guess::Trivial);
    }
    let basis_dim = basis.len();
    let mut first_failure = None;
    for v in rank_candidates(basis, qexps.len()) {
        let op = build_operator(r, field, &monos, &qexps, &v);
        match annihilation_failure(&op, f, verify)? {
            None => {
                return Ok(Guess::Found(GuessResult {
                    operator: op,
                    ansatz: ansatz.clone(),
                    fit_window: fit.clone(),
                    verified_window: verify.clone(),
                    basis_dim,
                    degenerate: false,
                }))
            }
            Some(n) => {
                first_failure.get_or_insert(n);
            }
        }
    }
    Ok(Guess::Refuted {
        at: first_failure.unwrap(),
    })
}

/// Ansatz with L/M exponents restricted to multiples of `eta`. The support
/// of `eta` may have at most `r + 1` elements.
pub fn guess_with_multiplicities(
    f: &Sequence,
    eta: &[u32],
    bounds: Bounds,
    fit: &Window,
    verify: &Window,
) -> Result<Guess> {
    let r = f.arity();
    if eta.len() != 2 * r {
        return Err(Error::ArityMismatch(2 * r, eta.len()));
    }
    let support = eta.iter().filter(|&&e| e > 0).count();
    if support == 0 || support > r + 1 {
        return Err(Error::Invalid(format!(
            "multiplicity tuple {eta:?} has support {support}, expected 1 to {}",
            r + 1
        )));
    }
    let ansatz = Ansatz::from_bounds(vec![], bounds).with_multiplicities(eta.to_vec());
    guess_annihilator(f, &ansatz, fit, verify)
}

/// Ansatz whose M exponents (and in the alpha mode also q exponents) are
/// multiples of the parameter.
pub fn guess_divisible(
    f: &Sequence,
    subset: &[Var],
    mode: Divisibility,
    bounds: Bounds,
    fit: &Window,
    verify: &Window,
) -> Result<Guess> {
    let ansatz = divisible_ansatz(subset, mode, bounds)?;
    guess_annihilator(f, &ansatz, fit, verify)
}

pub(crate) fn divisible_ansatz(
    subset: &[Var],
    mode: Divisibility,
    bounds: Bounds,
) -> Result<Ansatz> {
    let (m, q) = match mode {
        Divisibility::Root(p) => (p, 1),
        Divisibility::Alpha(k) => (k, k),
    };
    if m == 0 {
        return Err(Error::Invalid(
            "divisibility parameter must be at least 1".into(),
        ));
    }
    let a = Ansatz::from_bounds(subset.to_vec(), bounds);
    Ok(if m == 1 && q == 1 {
        a
    } else {
        a.with_divisibility(Some(m), (q > 1).then_some(q))
    })
}

/// Search for `sum p_alpha(m) l^alpha` annihilating the q-free sequence `g`.
///
/// `ansatz.subset` names `l_i` as `L(i)` and `m_j` as `M(j)`; `shift_bound`
/// bounds each shift and `m_bound` the degree in each `m_j`. `q_bound` and
/// the divisibility fields are ignored.
pub fn guess_classical(
    g: &Sequence,
    ansatz: &Ansatz,
    fit: &Window,
    verify: &Window,
) -> Result<Guess<ClassicalOperator>> {
    let r = g.arity();
    ansatz.validate(r)?;
    check_windows(r, fit, verify)?;
    let plain = Ansatz::new(ansatz.subset.clone(), ansatz.shift_bound, ansatz.m_bound, 0);
    let monos = plain.monomials(r);
    if fit.len() < monos.len() {
        return Err(Error::Underdetermined {
            unknowns: monos.len(),
            points: fit.len(),
        });
    }
    let found = |op, basis_dim, degenerate| {
        Guess::Found(GuessResult {
            operator: op,
            ansatz: plain.clone(),
            fit_window: fit.clone(),
            verified_window: verify.clone(),
            basis_dim,
            degenerate,
        })
    };
    if vanishes_on(g, fit)? {
        return Ok(found(ClassicalOperator::one(r), monos.len(), true));
    }
    let order = g.field().order();
    let mut sys = System::new(monos.len(), order);
    let value = |n: &[i64]| -> Result<Scalar> {
        let v = g.eval(n)?;
        v.as_constant().ok_or_else(|| {
            Error::Invalid(format!(
                "classical guessing needs q-free values, got {v} at {n:?}"
            ))
        })
    };
    for n in fit.points() {
        let mut row = SparseRow::new();
        for (i, m) in monos.iter().enumerate() {
            let idx: Vec<i64> = n.iter().zip(&m.alpha).map(|(a, b)| a + b).collect();
            let v = value(&idx)?;
            if v.is_zero() {
                continue;
            }
            let w = m.beta.iter().zip(&n).fold(Scalar::one(), |acc, (&b, &x)| {
                &acc * &Scalar::from_int(x).pow(b)
            });
            let c = &v * &w;
            if !c.is_zero() {
                row.push((i, c));
            }
        }
        sys.push(row);
        if sys.is_full() {
            return Ok(Guess::Trivial);
        }
    }
    let basis = sys.nullspace();
    if basis.is_empty() {
        return Ok(Guess::Trivial);
    }
    let basis_dim = basis.len();
    let mut first_failure = None;
    for v in rank_candidates(basis, 1) {
        let op = classical_operator(r, &monos, &v);
        match classical_annihilation_failure(&op, g, verify)? {
            None => return Ok(found(op, basis_dim, false)),
            Some(n) => {
                first_failure.get_or_insert(n);
            }
        }
    }
    Ok(Guess::Refuted {
        at: first_failure.unwrap(),
    })
}

fn classical_operator(r: usize, monos: &[Monomial], v: &[Scalar]) -> ClassicalOperator {
    let support: Vec<usize> = (0..monos.len()).filter(|&i| !v[i].is_zero()).collect();
    // anchor: greatest shift, then the m-monomial printed first
    let anchor = support.iter().copied().max_by(|&a, &b| {
        let (ma, mb) = (&monos[a], &monos[b]);
        ma.alpha.cmp(&mb.alpha).then_with(|| {
            let da: i64 = ma.beta.iter().sum();
            let db: i64 = mb.beta.iter().sum();
            da.cmp(&db).then_with(|| ma.beta.cmp(&mb.beta))
        })
    });
    let flip = anchor.is_some_and(|i| v[i].leading_sign() < 0);
    let mut op = ClassicalOperator::zero(r);
    for i in support {
        let c = if flip { -&v[i] } else { v[i].clone() };
        let exps: Vec<u32> = monos[i].beta.iter().map(|&b| b as u32).collect();
        op.add_term(monos[i].alpha.clone(), MPoly::term(r, exps, c));
    }
    op
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::builtin;

    fn w(s: &str) -> Window {
        s.parse().unwrap()
    }

    #[test]
    fn qpow2_relation() {
        let f = builtin("qpow2").unwrap();
        let a = Ansatz::new(vec![Var::L(0), Var::M(0)], 1, 2, 1);
        let g = guess_annihilator(&f, &a, &w("0..24"), &w("31..55")).unwrap();
        let g = g.found().unwrap();
        assert_eq!(g.operator.to_string(), "-q*M^2+L");
        assert_eq!(g.basis_dim, 1);
        assert!(!g.degenerate);
        let small = Ansatz::new(vec![Var::L(0), Var::M(0)], 1, 1, 1);
        assert_eq!(
            guess_annihilator(&f, &small, &w("0..24"), &w("31..55")).unwrap(),
            Guess::Trivial
        );
    }

    #[test]
    fn errors_and_degenerate() {
        let f = builtin("qpow2").unwrap();
        let a = Ansatz::new(vec![Var::L(0), Var::M(0)], 3, 3, 1);
        assert!(matches!(
            guess_annihilator(&f, &a, &w("0..5"), &w("20..30")),
            Err(Error::Underdetermined { .. })
        ));
        assert!(guess_annihilator(&f, &a, &w("0..24"), &w("10..30")).is_err());
        let delta = builtin("delta(1)").unwrap();
        let g = guess_annihilator(&delta, &a, &w("5..30"), &w("40..60")).unwrap();
        let g = g.found().unwrap();
        assert!(g.degenerate);
        assert_eq!(g.operator.to_string(), "1");
    }
}
