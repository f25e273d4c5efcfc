use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::spanning::ConeStep;
use crate::error::{Error, Result};
use crate::guess::{
    default_fit_window, default_verify_window, guess_annihilator, guess_classical, Ansatz, Bounds,
    Guess, GuessResult,
};
use crate::sequences::{Sequence, Window};
use crate::weyl::{ClassicalOperator, Operator, Var};

/// Bound schedule tried in order for each subset (shift, m, q).
pub const DEFAULT_SCHEDULE: [Bounds; 9] = [
    Bounds::new(1, 1, 1),
    Bounds::new(1, 2, 1),
    Bounds::new(2, 1, 1),
    Bounds::new(1, 2, 2),
    Bounds::new(2, 2, 2),
    Bounds::new(2, 2, 4),
    Bounds::new(2, 4, 4),
    Bounds::new(2, 2, 8),
    Bounds::new(2, 4, 8),
];

/// Classical schedule (shift, m-degree); the q bound is unused.
pub const CLASSICAL_SCHEDULE: [Bounds; 6] = [
    Bounds::new(1, 0, 0),
    Bounds::new(1, 1, 0),
    Bounds::new(2, 1, 0),
    Bounds::new(2, 2, 0),
    Bounds::new(3, 2, 0),
    Bounds::new(3, 3, 0),
];

/// One verified annihilator of a certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertEntry<O = Operator> {
    pub subset: Vec<Var>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplicities: Option<Vec<u32>>,
    pub operator: O,
    /// Canonical text of `operator`.
    pub text: String,
    pub bounds: Bounds,
    pub fit_window: Window,
    pub verified_window: Window,
    pub basis_dim: usize,
    pub degenerate: bool,
}

/// Annihilators for a family of generator subsets (by default every subset of
/// size `r + 1`). `uncovered` lists subsets where the schedule ran out.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate<O = Operator> {
    pub sequence: String,
    pub r: usize,
    pub schedule: Vec<Bounds>,
    pub entries: Vec<CertEntry<O>>,
    pub uncovered: Vec<Vec<Var>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cone_trace: Option<Vec<ConeStep>>,
}

impl<O> Certificate<O> {
    pub fn is_complete(&self) -> bool {
        self.uncovered.is_empty()
    }

    pub fn entry(&self, subset: &[Var]) -> Option<&CertEntry<O>> {
        self.entries.iter().find(|e| e.subset == subset)
    }

    pub fn require_complete(&self) -> Result<()> {
        if self.is_complete() {
            return Ok(());
        }
        let labels: Vec<String> = self.uncovered.iter().map(|s| subset_label(s)).collect();
        Err(Error::IncompleteCertificate(format!(
            "no annihilator for {}",
            labels.join(" ")
        )))
    }
}

pub fn subset_label(s: &[Var]) -> String {
    let names: Vec<String> = s.iter().map(|v| v.name()).collect();
    format!("{{{}}}", names.join(","))
}

/// All `(r+1)`-subsets of `L_1..L_r, M_1..M_r`, each sorted, in lexicographic
/// order.
pub fn generator_subsets(r: usize) -> Vec<Vec<Var>> {
    let all: Vec<Var> = (0..2 * r).map(|c| Var::from_coordinate(c, r)).collect();
    let mut out = vec![];
    let mut pick = vec![];
    fn rec(all: &[Var], k: usize, start: usize, pick: &mut Vec<Var>, out: &mut Vec<Vec<Var>>) {
        if pick.len() == k {
            out.push(pick.clone());
            return;
        }
        for i in start..all.len() {
            pick.push(all[i]);
            rec(all, k, i + 1, pick, out);
            pick.pop();
        }
    }
    rec(&all, r + 1, 0, &mut pick, &mut out);
    out
}

/// Windows used for one ansatz: the requested fit window (or the default),
/// widened if it has fewer points than monomials, and a disjoint holdout.
#[derive(Clone, Debug, Default)]
pub struct WindowPolicy {
    pub fit: Option<Window>,
    pub verify: Option<Window>,
}

impl WindowPolicy {
    pub fn windows(&self, r: usize, ansatz: &Ansatz) -> (Window, Window) {
        let mut fit = self.fit.clone().unwrap_or_else(|| default_fit_window(r));
        let need = ansatz.monomials(r).len();
        while fit.len() < need {
            fit.upper.iter_mut().for_each(|u| *u += 1);
        }
        let verify = self
            .verify
            .clone()
            .unwrap_or_else(|| default_verify_window(&fit, ansatz.shift_diameter(r)));
        (fit, verify)
    }
}

fn entry_from<O: ToString>(
    subset: Vec<Var>,
    multiplicities: Option<Vec<u32>>,
    bounds: Bounds,
    g: GuessResult<O>,
) -> CertEntry<O> {
    CertEntry {
        subset,
        multiplicities,
        text: g.operator.to_string(),
        operator: g.operator,
        bounds,
        fit_window: g.fit_window,
        verified_window: g.verified_window,
        basis_dim: g.basis_dim,
        degenerate: g.degenerate,
    }
}

/// Iterative deepening over `schedule` for one ansatz family.
fn search<O: Send>(
    schedule: &[Bounds],
    make: impl Fn(Bounds) -> Ansatz,
    run: impl Fn(&Ansatz) -> Result<Guess<O>>,
) -> Result<Option<(Bounds, GuessResult<O>)>> {
    for &b in schedule {
        if let Guess::Found(g) = run(&make(b))? {
            return Ok(Some((b, g)));
        }
    }
    Ok(None)
}

fn assemble<O: Send + ToString>(
    f: &Sequence,
    schedule: &[Bounds],
    keys: Vec<(Vec<Var>, Option<Vec<u32>>)>,
    make: impl Fn(&[Var], Option<&[u32]>, Bounds) -> Ansatz + Sync,
    run: impl Fn(&Ansatz) -> Result<Guess<O>> + Sync,
) -> Result<Certificate<O>> {
    let results: Vec<_> = keys
        .par_iter()
        .map(|(s, m)| search(schedule, |b| make(s, m.as_deref(), b), &run))
        .collect::<Result<_>>()?;
    let mut entries = vec![];
    let mut uncovered = vec![];
    for ((s, m), res) in keys.into_iter().zip(results) {
        match res {
            Some((b, g)) => entries.push(entry_from(s, m, b, g)),
            None => uncovered.push(s),
        }
    }
    Ok(Certificate {
        sequence: f.id().to_string(),
        r: f.arity(),
        schedule: schedule.to_vec(),
        entries,
        uncovered,
        cone_trace: None,
    })
}

/// Search every `(r+1)`-subset with iterative deepening over `schedule`.
pub fn certify_strong_finiteness(f: &Sequence, schedule: &[Bounds]) -> Result<Certificate> {
    certify_with_windows(f, schedule, &WindowPolicy::default())
}

pub fn certify_with_windows(
    f: &Sequence,
    schedule: &[Bounds],
    windows: &WindowPolicy,
) -> Result<Certificate> {
    let r = f.arity();
    if r == 0 {
        return Err(Error::Invalid("certificates need r >= 1".into()));
    }
    let keys = generator_subsets(r)
        .into_iter()
        .map(|s| (s, None))
        .collect();
    assemble(
        f,
        schedule,
        keys,
        |s, _, b| Ansatz::from_bounds(s.to_vec(), b),
        |a| {
            let (fit, ver) = windows.windows(r, a);
            guess_annihilator(f, a, &fit, &ver)
        },
    )
}

/// One entry per multiplicity tuple; the subset of an entry is the support of
/// its tuple.
pub fn certify_with_multiplicities(
    f: &Sequence,
    tuples: &[Vec<u32>],
    schedule: &[Bounds],
) -> Result<Certificate> {
    let r = f.arity();
    let mut keys = vec![];
    for t in tuples {
        if t.len() != 2 * r {
            return Err(Error::ArityMismatch(2 * r, t.len()));
        }
        let support = t.iter().filter(|&&e| e > 0).count();
        if support == 0 || support > r + 1 {
            return Err(Error::Invalid(format!(
                "multiplicity tuple {t:?} has support {support}, expected 1 to {}",
                r + 1
            )));
        }
        let subset = (0..2 * r)
            .filter(|&c| t[c] > 0)
            .map(|c| Var::from_coordinate(c, r))
            .collect();
        keys.push((subset, Some(t.clone())));
    }
    let windows = WindowPolicy::default();
    assemble(
        f,
        schedule,
        keys,
        |_, m, b| Ansatz::from_bounds(vec![], b).with_multiplicities(m.unwrap().to_vec()),
        |a| {
            let (fit, ver) = windows.windows(r, a);
            guess_annihilator(f, a, &fit, &ver)
        },
    )
}

/// Classical counterpart over the subsets of `l_1..l_r, m_1..m_r` (written
/// with `L`/`M` variables); bounds are (shift, m-degree).
pub fn certify_classical(
    g: &Sequence,
    schedule: &[Bounds],
) -> Result<Certificate<ClassicalOperator>> {
    certify_classical_with_windows(g, schedule, &WindowPolicy::default())
}

pub fn certify_classical_with_windows(
    g: &Sequence,
    schedule: &[Bounds],
    windows: &WindowPolicy,
) -> Result<Certificate<ClassicalOperator>> {
    let r = g.arity();
    if r == 0 {
        return Err(Error::Invalid("certificates need r >= 1".into()));
    }
    let keys = generator_subsets(r)
        .into_iter()
        .map(|s| (s, None))
        .collect();
    assemble(
        g,
        schedule,
        keys,
        |s, _, b| Ansatz::new(s.to_vec(), b.shift, b.m, 0),
        |a| {
            let (fit, ver) = windows.windows(r, a);
            guess_classical(g, a, &fit, &ver)
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets() {
        assert_eq!(generator_subsets(1), vec![vec![Var::L(0), Var::M(0)]]);
        let s = generator_subsets(2);
        assert_eq!(s.len(), 4);
        assert_eq!(subset_label(&s[0]), "{L1,L2,M1}");
        assert_eq!(subset_label(&s[3]), "{L2,M1,M2}");
        assert_eq!(generator_subsets(3).len(), 15);
    }
}
