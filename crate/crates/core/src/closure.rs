//! Certificates transported through `q -> zeta_p q`, `q -> q^(a/k)`, the
//! q-derivative and evaluation at a root of unity.
//!
//! Every output entry is re-verified against the transformed sequence; the
//! constructions only propose operators.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certify::{CertEntry, Certificate, WindowPolicy};
use crate::error::{Error, Result};
use crate::guess::{
    annihilation_failure, classical_annihilation_failure, default_fit_window,
    default_verify_window, divisible_ansatz, guess_annihilator, Ansatz, Bounds, Divisibility,
    Guess, GuessResult,
};
use crate::sequences::{
    apply, apply_mixed, seq_dq, seq_eval_at_root, seq_subst_alpha, seq_subst_root, Sequence, Window,
};
use crate::weyl::{descend, dq_commutator, ClassicalOperator, Operator, Var};

pub const DEFAULT_DESCENT_CAP: usize = 25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Transform {
    RootOfUnity { p: u32 },
    Alpha { a: i64, k: u32 },
    QDerivative,
    EvalAtRoot { p: u32 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClosureOutput {
    Quantum(Certificate),
    Classical(Certificate<ClassicalOperator>),
}

impl ClosureOutput {
    pub fn is_complete(&self) -> bool {
        match self {
            ClosureOutput::Quantum(c) => c.is_complete(),
            ClosureOutput::Classical(c) => c.is_complete(),
        }
    }

    pub fn quantum(&self) -> Option<&Certificate> {
        match self {
            ClosureOutput::Quantum(c) => Some(c),
            _ => None,
        }
    }

    pub fn classical(&self) -> Option<&Certificate<ClassicalOperator>> {
        match self {
            ClosureOutput::Classical(c) => Some(c),
            _ => None,
        }
    }
}

/// How one output entry was produced.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub subset: Vec<Var>,
    /// The annihilator of the input sequence the entry was built from.
    pub source: String,
    /// `R` in `D_q(P f) = P D_q f + R f`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub commutator: Option<String>,
    /// `Q` with `Q R f = 0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub auxiliary: Option<String>,
    /// Window on which the commutator identity was checked.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identity_window: Option<Window>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub descent_rounds: Option<usize>,
    /// Why the subset stayed uncovered, if it did.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosureReport {
    pub transform: Transform,
    pub input_sequence: String,
    pub output_sequence: String,
    pub output: ClosureOutput,
    pub provenance: Vec<Provenance>,
    /// Some entry was degenerate or the transformed sequence vanishes on the
    /// checked window.
    pub degenerate: bool,
}

impl ClosureReport {
    pub fn is_complete(&self) -> bool {
        self.output.is_complete()
    }
}

fn require_fails(what: &str, op: &impl std::fmt::Display, at: Option<Vec<i64>>) -> Result<()> {
    match at {
        None => Ok(()),
        Some(n) => Err(Error::Invalid(format!(
            "{what} {op} does not annihilate at {n:?}"
        ))),
    }
}

fn entry<O: ToString>(
    subset: Vec<Var>,
    operator: O,
    bounds: Bounds,
    g: &GuessResult,
    degenerate: bool,
) -> CertEntry<O> {
    CertEntry {
        subset,
        multiplicities: None,
        text: operator.to_string(),
        operator,
        bounds,
        fit_window: g.fit_window.clone(),
        verified_window: g.verified_window.clone(),
        basis_dim: g.basis_dim,
        degenerate,
    }
}

type Built<O> = (Option<CertEntry<O>>, Provenance);

fn certificate<O>(
    id: String,
    r: usize,
    schedule: Vec<Bounds>,
    built: Vec<Built<O>>,
) -> (Certificate<O>, Vec<Provenance>) {
    let mut entries = vec![];
    let mut uncovered = vec![];
    let mut prov = vec![];
    for (e, p) in built {
        match e {
            Some(e) => entries.push(e),
            None => uncovered.push(p.subset.clone()),
        }
        prov.push(p);
    }
    let cert = Certificate {
        sequence: id,
        r,
        schedule,
        entries,
        uncovered,
        cone_trace: None,
    };
    (cert, prov)
}

fn scaled(schedule: &[Bounds], by: u32) -> Vec<Bounds> {
    schedule
        .iter()
        .map(|b| Bounds::new(b.shift * by, b.m * by, b.q * by))
        .collect()
}

fn check_arity(f: &Sequence) -> Result<usize> {
    match f.arity() {
        0 => Err(Error::Invalid("closure needs r >= 1".into())),
        r => Ok(r),
    }
}

/// Guess a divisible annihilator of `f` on `subset`, transport it and check it
/// against `g`.
fn transport(
    f: &Sequence,
    g: &Sequence,
    subset: &[Var],
    mode: Divisibility,
    schedule: &[Bounds],
    map: &(dyn Fn(&Operator) -> Result<Operator> + Sync),
) -> Result<Built<Operator>> {
    let r = f.arity();
    let policy = WindowPolicy::default();
    let mut prov = Provenance {
        subset: subset.to_vec(),
        ..Default::default()
    };
    for &b in schedule {
        let a = divisible_ansatz(subset, mode, b)?;
        let (fit, ver) = policy.windows(r, &a);
        if let Guess::Found(res) = guess_annihilator(f, &a, &fit, &ver)? {
            let out = map(&res.operator)?;
            for w in [&fit, &ver] {
                require_fails(
                    "transported operator",
                    &out,
                    annihilation_failure(&out, g, w)?,
                )?;
            }
            prov.source = res.operator.to_string();
            let e = entry(subset.to_vec(), out, b, &res, res.degenerate);
            return Ok((Some(e), prov));
        }
    }
    prov.failure = Some("bound schedule exhausted".into());
    Ok((None, prov))
}

fn transport_all(
    f: &Sequence,
    g: &Sequence,
    transform: Transform,
    mode: Divisibility,
    schedule: Vec<Bounds>,
    map: &(dyn Fn(&Operator) -> Result<Operator> + Sync),
) -> Result<ClosureReport> {
    let r = check_arity(f)?;
    let built: Vec<_> = crate::certify::generator_subsets(r)
        .par_iter()
        .map(|s| transport(f, g, s, mode, &schedule, map))
        .collect::<Result<_>>()?;
    let (cert, provenance) = certificate(g.id().to_string(), r, schedule, built);
    Ok(ClosureReport {
        transform,
        input_sequence: f.id().to_string(),
        output_sequence: g.id().to_string(),
        degenerate: cert.entries.iter().any(|e| e.degenerate),
        output: ClosureOutput::Quantum(cert),
        provenance,
    })
}

/// Certificate for `f(zeta_p q)`: per subset an annihilator whose M exponents
/// are multiples of `p`, with `q -> zeta_p q` applied to its coefficients.
/// Each schedule entry is scaled by `p`.
pub fn closure_root_of_unity(f: &Sequence, p: u32, schedule: &[Bounds]) -> Result<ClosureReport> {
    if p == 0 {
        return Err(Error::Invalid("p must be at least 1".into()));
    }
    let g = seq_subst_root(f, p)?;
    transport_all(
        f,
        &g,
        Transform::RootOfUnity { p },
        Divisibility::Root(p),
        scaled(schedule, p),
        &|op| op.subst_root(p),
    )
}

/// Certificate for `f(q^(a/k))` over `u` with `q = u^k`: per subset an
/// annihilator polynomial in `q^k` and `M_i^k`, rewritten by
/// [`Operator::subst_alpha`]. Each schedule entry is scaled by `k`.
pub fn closure_alpha(f: &Sequence, a: i64, k: u32, schedule: &[Bounds]) -> Result<ClosureReport> {
    crate::coeff::check_alpha(a, k)?;
    let g = seq_subst_alpha(f, a, k)?;
    transport_all(
        f,
        &g,
        Transform::Alpha { a, k },
        Divisibility::Alpha(k),
        scaled(schedule, k),
        &|op| op.subst_alpha(a, k),
    )
}

fn dq_entry(
    f: &Sequence,
    df: &Sequence,
    e: &CertEntry,
    schedule: &[Bounds],
) -> Result<Built<Operator>> {
    let r = f.arity();
    let p = e.operator.clear_denominators();
    let rop = dq_commutator(&p)?;
    let rf = apply_mixed(&rop, f)?;
    let mut prov = Provenance {
        subset: e.subset.clone(),
        source: p.to_string(),
        commutator: Some(rop.to_string()),
        ..Default::default()
    };

    // 0 = D_q(P f) = P D_q f + R f before looking for Q
    let window = default_fit_window(r);
    let lhs = seq_dq(&apply(&p, f)?)?;
    let pdf = apply(&p, df)?;
    for n in window.points() {
        if lhs.eval(&n)? != &pdf.eval(&n)? + &rf.eval(&n)? {
            return Err(Error::Invalid(format!(
                "D_q commutator identity fails for {p} at {n:?}"
            )));
        }
    }
    prov.identity_window = Some(window);

    let policy = WindowPolicy::default();
    for &b in schedule {
        let a = Ansatz::from_bounds(e.subset.clone(), b);
        let (fit, ver) = policy.windows(r, &a);
        if let Guess::Found(res) = guess_annihilator(&rf, &a, &fit, &ver)? {
            let qp = res.operator.mul(&p)?;
            for w in [&fit, &ver] {
                require_fails("Q P", &qp, annihilation_failure(&qp, df, w)?)?;
            }
            prov.auxiliary = Some(res.operator.to_string());
            let entry = entry(e.subset.clone(), qp, b, &res, res.degenerate);
            return Ok((Some(entry), prov));
        }
    }
    prov.failure = Some("no annihilator of R f within the bound schedule".into());
    Ok((None, prov))
}

/// Certificate for `D_q f` from a certificate of `f`: per entry `P`, find `Q`
/// killing `R f` on the same subset and emit `Q P`.
pub fn closure_dq(f: &Sequence, cert: &Certificate, schedule: &[Bounds]) -> Result<ClosureReport> {
    let r = check_arity(f)?;
    cert.require_complete()?;
    if f.field() != crate::BaseField::rationals() {
        return Err(Error::Invalid(
            "the q-derivative closure needs values in Q(q)".into(),
        ));
    }
    let df = seq_dq(f)?;
    let built: Vec<_> = cert
        .entries
        .par_iter()
        .map(|e| dq_entry(f, &df, e, schedule))
        .collect::<Result<_>>()?;
    let target_zero = annihilation_failure(
        &Operator::one(r, crate::Variant::WrPlus),
        &df,
        &default_fit_window(r),
    )?
    .is_none();
    let (out, provenance) = certificate(df.id().to_string(), r, schedule.to_vec(), built);
    Ok(ClosureReport {
        transform: Transform::QDerivative,
        input_sequence: f.id().to_string(),
        output_sequence: df.id().to_string(),
        degenerate: target_zero || out.entries.iter().any(|e| e.degenerate),
        output: ClosureOutput::Quantum(out),
        provenance,
    })
}

fn classical_windows(r: usize, op: &ClassicalOperator) -> (Window, Window) {
    let fit = default_fit_window(r);
    let diameter = op
        .terms()
        .flat_map(|(a, _)| a.iter().map(|x| x.abs()))
        .max()
        .unwrap_or(0);
    let ver = default_verify_window(&fit, diameter);
    (fit, ver)
}

fn eval_entry(target: &Sequence, e: &CertEntry, cap: usize) -> Result<Built<ClassicalOperator>> {
    let r = target.arity();
    let p = e.operator.clear_denominators().clear_to_positive();
    let mut prov = Provenance {
        subset: e.subset.clone(),
        source: p.to_string(),
        ..Default::default()
    };
    let d = descend(&p, cap)?;
    prov.descent_rounds = Some(d.rounds);
    let (fit, ver) = classical_windows(r, &d.classical);
    for w in [&fit, &ver] {
        if let Some(n) = classical_annihilation_failure(&d.classical, target, w)? {
            prov.failure = Some(format!("{} does not annihilate at {n:?}", d.classical));
            return Ok((None, prov));
        }
    }
    let entry = CertEntry {
        subset: e.subset.clone(),
        multiplicities: None,
        text: d.classical.to_string(),
        operator: d.classical,
        bounds: e.bounds,
        fit_window: fit,
        verified_window: ver,
        basis_dim: e.basis_dim,
        degenerate: e.degenerate,
    };
    Ok((Some(entry), prov))
}

/// Classical certificate for `f(zeta_p)`. For `p > 1` the certificate of
/// `f(zeta_p q)` is first built with [`closure_root_of_unity`] (ignoring
/// `cert`); then each entry descends through `D_q` commutators until its
/// value at `q = 1`, `M = 1` is nonzero, for at most `cap` rounds.
pub fn closure_eval_at_root(
    f: &Sequence,
    cert: &Certificate,
    p: u32,
    schedule: &[Bounds],
    cap: usize,
) -> Result<ClosureReport> {
    let r = check_arity(f)?;
    let target = seq_eval_at_root(f, p)?;
    let rooted;
    let source = if p == 1 {
        cert
    } else {
        rooted = closure_root_of_unity(f, p, schedule)?;
        rooted.output.quantum().expect("root closure is quantum")
    };
    source.require_complete()?;
    let built: Vec<_> = source
        .entries
        .par_iter()
        .map(|e| eval_entry(&target, e, cap))
        .collect::<Result<_>>()?;
    let (out, provenance) = certificate(target.id().to_string(), r, source.schedule.clone(), built);
    Ok(ClosureReport {
        transform: Transform::EvalAtRoot { p },
        input_sequence: f.id().to_string(),
        output_sequence: target.id().to_string(),
        degenerate: out.entries.iter().any(|e| e.degenerate),
        output: ClosureOutput::Classical(out),
        provenance,
    })
}
