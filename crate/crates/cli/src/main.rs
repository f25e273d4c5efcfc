//! `qholo`: exact q-holonomic sequence toolkit.
//!
//! Exit codes: 0 certified or verified, 2 inconclusive, 1 error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use qholo_core::certify::{
    certify_classical_with_windows, certify_with_multiplicities, certify_with_windows, cone_trace,
    dimension_profile, reduce_monomial, spanning_count_check, spanning_set, Certificate, RankMode,
    Verdict, WindowPolicy, CLASSICAL_SCHEDULE, DEFAULT_SCHEDULE,
};
use qholo_core::closure::{
    closure_alpha, closure_dq, closure_eval_at_root, closure_root_of_unity, ClosureReport,
    DEFAULT_DESCENT_CAP,
};
use qholo_core::guess::{
    default_fit_window, guess_annihilator, guess_classical, guess_divisible,
    guess_with_multiplicities, Ansatz, Bounds, Divisibility, Guess, GuessResult,
};
use qholo_core::json::{classical_from_json, operator_from_json};
use qholo_core::sequences::{apply, apply_classical, builtin, Sequence, Window, REGISTRY};
use qholo_core::text::{parse_classical, parse_operator};
use qholo_core::{Monomial, Var};

const DEFAULT_SEED: u64 = 1729;

const CERTIFIED: u8 = 0;
const INCONCLUSIVE: u8 = 2;

#[derive(Parser)]
#[command(name = "qholo", version, about = "Certify q-holonomic sequences")]
struct Cli {
    #[command(flatten)]
    io: Io,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Io {
    /// Write the JSON artifact here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print the JSON artifact instead of the summary.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for probabilistic ranks.
    #[arg(long, global = true, env = "QHOLO_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the values of an operator applied to a sequence.
    Apply {
        #[arg(long)]
        seq: String,
        /// Operator text, e.g. "L - q*M^2".
        #[arg(long, required_unless_present = "op_file")]
        op: Option<String>,
        /// Operator as JSON or text.
        #[arg(long, conflicts_with = "op")]
        op_file: Option<PathBuf>,
        #[arg(long, default_value = "0..10")]
        window: String,
        /// Read a classical operator in l_i, m_i.
        #[arg(long)]
        classical: bool,
    },
    /// Search one ansatz for an annihilator.
    Guess {
        #[arg(long)]
        seq: String,
        /// Generators, e.g. "L1,M2".
        #[arg(long, required_unless_present = "multiplicities")]
        subset: Option<String>,
        /// shift,m,q (classical: shift,m).
        #[arg(long)]
        bounds: String,
        /// Fit window.
        #[arg(long)]
        window: Option<String>,
        #[arg(long)]
        verify_window: Option<String>,
        /// 2r exponents, e.g. "2,0,0,2".
        #[arg(long)]
        multiplicities: Option<String>,
        /// root:p or alpha:k.
        #[arg(long)]
        divisible: Option<String>,
        #[arg(long)]
        classical: bool,
    },
    /// Annihilators for every (r+1)-subset of generators.
    Certify {
        #[arg(long)]
        seq: String,
        /// Bound schedule entries shift,m,q (repeatable).
        #[arg(long)]
        bounds: Vec<String>,
        #[arg(long)]
        window: Option<String>,
        /// Include the leading-monomial cone trace.
        #[arg(long)]
        trace: bool,
    },
    /// One annihilator per multiplicity tuple.
    CertifyMult {
        #[arg(long)]
        seq: String,
        /// 2r exponents (repeatable).
        #[arg(long, required = true)]
        tuple: Vec<String>,
        #[arg(long)]
        bounds: Vec<String>,
    },
    /// Classical certificate over l_i, m_i.
    CertifyClassical {
        #[arg(long)]
        seq: String,
        /// Bound schedule entries shift,m (repeatable).
        #[arg(long)]
        bounds: Vec<String>,
        #[arg(long)]
        window: Option<String>,
    },
    /// Ranks of the filtration pieces F_N W_{r,+} f.
    Dimension {
        #[arg(long)]
        seq: String,
        #[arg(long)]
        n_max: u32,
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        exact_rank: bool,
    },
    /// Monomials of degree at most N outside the excluded cones.
    Spanning {
        #[command(flatten)]
        source: CertSource,
        #[arg(long, required_unless_present = "counts")]
        n: Option<u32>,
        /// Count table over a range a..b instead of one listing.
        #[arg(long)]
        counts: Option<String>,
    },
    /// Rewrite a monomial into the spanning set.
    Reduce {
        #[command(flatten)]
        source: CertSource,
        /// Monomial text, e.g. "M^4" or "L1*M2^2".
        #[arg(long)]
        monomial: String,
        #[arg(long)]
        window: Option<String>,
    },
    /// Transport a certificate through a closure construction.
    Closure {
        #[command(subcommand)]
        kind: ClosureCmd,
    },
    /// Built-in sequences.
    Seq {
        #[command(subcommand)]
        cmd: SeqCmd,
    },
}

#[derive(Subcommand)]
enum ClosureCmd {
    /// f(zeta_p q).
    Root {
        #[arg(long)]
        seq: String,
        #[arg(long)]
        p: u32,
        #[arg(long)]
        bounds: Vec<String>,
    },
    /// f(q^(a/k)).
    Alpha {
        #[arg(long)]
        seq: String,
        /// a/k
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        bounds: Vec<String>,
    },
    /// d/dq f.
    Dq {
        #[command(flatten)]
        source: CertSource,
        #[arg(long)]
        bounds: Vec<String>,
    },
    /// f at q = zeta_p, classical.
    Eval {
        #[command(flatten)]
        source: CertSource,
        #[arg(long, default_value_t = 1)]
        p: u32,
        #[arg(long, default_value_t = DEFAULT_DESCENT_CAP)]
        cap: usize,
        #[arg(long)]
        bounds: Vec<String>,
    },
}

#[derive(Subcommand)]
enum SeqCmd {
    List,
}

/// A certificate file, or a sequence to certify with the default schedule.
#[derive(Args)]
struct CertSource {
    #[arg(long, required_unless_present = "cert")]
    seq: Option<String>,
    #[arg(long)]
    cert: Option<PathBuf>,
}

impl CertSource {
    fn load(&self) -> Result<(Sequence, Certificate)> {
        match &self.cert {
            Some(path) => {
                let cert: Certificate = serde_json::from_str(&read(path)?)
                    .with_context(|| format!("reading certificate {}", path.display()))?;
                let id = self.seq.as_deref().unwrap_or(&cert.sequence);
                Ok((sequence(id)?, cert))
            }
            None => {
                let f = sequence(self.seq.as_deref().unwrap())?;
                let c = certify_with_windows(&f, &DEFAULT_SCHEDULE, &WindowPolicy::default())?;
                Ok((f, c))
            }
        }
    }
}

/// Guess outcome as written by `qholo guess`.
#[derive(Debug, PartialEq, Serialize, Deserialize)]
struct GuessReport<O> {
    status: String,
    ansatz: Ansatz,
    fit_window: Window,
    verify_window: Window,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    operator: Option<O>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    basis_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    degenerate: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    counterexample: Option<Vec<i64>>,
}

impl<O: ToString> GuessReport<O> {
    fn new(g: Guess<O>, ansatz: Ansatz, fit: Window, verify: Window) -> Self {
        let mut rep = GuessReport {
            status: String::new(),
            ansatz,
            fit_window: fit,
            verify_window: verify,
            operator: None,
            text: None,
            basis_dim: None,
            degenerate: None,
            counterexample: None,
        };
        match g {
            Guess::Found(GuessResult {
                operator,
                basis_dim,
                degenerate,
                ..
            }) => {
                rep.status = "found".into();
                rep.text = Some(operator.to_string());
                rep.operator = Some(operator);
                rep.basis_dim = Some(basis_dim);
                rep.degenerate = Some(degenerate);
            }
            Guess::Trivial => rep.status = "trivial".into(),
            Guess::Refuted { at } => {
                rep.status = "refuted".into();
                rep.counterexample = Some(at);
            }
        }
        rep
    }

    fn summary(&self) -> String {
        match (&self.text, &self.counterexample) {
            (Some(t), _) => format!("{t}\n"),
            (None, Some(at)) => format!("refuted at {at:?}\n"),
            _ => "no annihilator\n".into(),
        }
    }

    fn code(&self) -> u8 {
        if self.operator.is_some() {
            CERTIFIED
        } else {
            INCONCLUSIVE
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn sequence(name: &str) -> Result<Sequence> {
    Ok(builtin(name)?)
}

fn window(s: &str) -> Result<Window> {
    Ok(s.parse()?)
}

fn ints<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|x| x.trim().parse().map_err(|_| anyhow!("bad {what} `{s}`")))
        .collect()
}

fn bounds(s: &str) -> Result<Bounds> {
    match ints::<u32>(s, "bounds")?.as_slice() {
        &[shift, m, q] => Ok(Bounds::new(shift, m, q)),
        &[shift, m] => Ok(Bounds::new(shift, m, 0)),
        _ => bail!("bounds are shift,m,q"),
    }
}

fn schedule(given: &[String], default: &[Bounds]) -> Result<Vec<Bounds>> {
    if given.is_empty() {
        return Ok(default.to_vec());
    }
    given.iter().map(|s| bounds(s)).collect()
}

fn vars(s: &str, r: usize) -> Result<Vec<Var>> {
    s.split(',').map(|v| Ok(Var::parse(v.trim(), r)?)).collect()
}

fn monomial(s: &str, r: usize) -> Result<Monomial> {
    let op = parse_operator(s, r, qholo_core::BaseField::rationals())?;
    let mut terms = op.terms();
    match (terms.next(), terms.next()) {
        (Some((m, c)), None) if c.is_one() => Ok(m.clone()),
        _ => bail!("`{s}` is not a monomial"),
    }
}

fn fraction(s: &str) -> Result<(i64, u32)> {
    let (a, k) = s.split_once('/').unwrap_or((s, "1"));
    Ok((
        a.trim().parse().map_err(|_| anyhow!("bad alpha `{s}`"))?,
        k.trim().parse().map_err(|_| anyhow!("bad alpha `{s}`"))?,
    ))
}

impl Io {
    fn emit<T: Serialize>(&self, value: &T, summary: impl FnOnce() -> String) -> Result<()> {
        let text = serde_json::to_string_pretty(value)? + "\n";
        if let Some(path) = &self.out {
            fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
        }
        if self.json {
            print!("{text}");
        } else {
            print!("{}", summary());
        }
        Ok(())
    }
}

fn cert_summary<O>(c: &Certificate<O>) -> String {
    let mut s = String::new();
    for e in &c.entries {
        let b = e.bounds;
        s += &format!(
            "{}  {}  [bounds {},{},{}]\n",
            qholo_core::certify::subset_label(&e.subset),
            e.text,
            b.shift,
            b.m,
            b.q
        );
    }
    for u in &c.uncovered {
        s += &format!("{}  uncovered\n", qholo_core::certify::subset_label(u));
    }
    s
}

fn cert_code<O>(c: &Certificate<O>) -> u8 {
    if c.is_complete() {
        CERTIFIED
    } else {
        INCONCLUSIVE
    }
}

fn closure_summary(rep: &ClosureReport) -> String {
    let mut s = format!("{} -> {}\n", rep.input_sequence, rep.output_sequence);
    match &rep.output {
        qholo_core::closure::ClosureOutput::Quantum(c) => s += &cert_summary(c),
        qholo_core::closure::ClosureOutput::Classical(c) => s += &cert_summary(c),
    }
    if rep.degenerate {
        s += "degenerate\n";
    }
    s
}

fn closure_code(rep: &ClosureReport) -> u8 {
    if rep.is_complete() {
        CERTIFIED
    } else {
        INCONCLUSIVE
    }
}

fn run(cli: Cli) -> Result<u8> {
    let io = &cli.io;
    match cli.cmd {
        Cmd::Apply {
            seq,
            op,
            op_file,
            window: w,
            classical,
        } => {
            let f = sequence(&seq)?;
            let r = f.arity();
            let text = match (op, op_file) {
                (Some(t), _) => t,
                (None, Some(p)) => read(&p)?,
                (None, None) => unreachable!("clap requires one of them"),
            };
            let json: Option<serde_json::Value> = serde_json::from_str(&text).ok();
            let values = if classical {
                let p = match json {
                    Some(v) => classical_from_json(&v)?,
                    None => parse_classical(text.trim(), r, f.field().order())?,
                };
                apply_classical(&p, &f)?
            } else {
                let p = match json {
                    Some(v) => operator_from_json(&v)?,
                    None => parse_operator(text.trim(), r, f.field())?,
                };
                apply(&p, &f)?
            };
            let mut rows = vec![];
            for n in window(&w)?.points() {
                let v = values.eval(&n).with_context(|| format!("at index {n:?}"))?;
                rows.push((n, v.to_string()));
            }
            io.emit(&rows, || {
                rows.iter()
                    .map(|(n, v)| {
                        let idx: Vec<String> = n.iter().map(i64::to_string).collect();
                        format!("{}\t{v}\n", idx.join(","))
                    })
                    .collect()
            })?;
            Ok(CERTIFIED)
        }
        Cmd::Guess {
            seq,
            subset,
            bounds: b,
            window: fit,
            verify_window,
            multiplicities,
            divisible,
            classical,
        } => {
            let f = sequence(&seq)?;
            let r = f.arity();
            let b = bounds(&b)?;
            let mut ansatz = match (&subset, &multiplicities) {
                (_, Some(m)) => {
                    Ansatz::from_bounds(vec![], b).with_multiplicities(ints(m, "tuple")?)
                }
                (Some(s), None) => Ansatz::from_bounds(vars(s, r)?, b),
                (None, None) => unreachable!("clap requires one of them"),
            };
            let mode = match divisible.as_deref().map(|d| d.split_once(':')) {
                None => None,
                Some(Some(("root", p))) => Some(Divisibility::Root(p.parse()?)),
                Some(Some(("alpha", k))) => Some(Divisibility::Alpha(k.parse()?)),
                Some(_) => bail!("--divisible takes root:p or alpha:k"),
            };
            if let Some(mode) = mode {
                let (m, q) = match mode {
                    Divisibility::Root(p) => (p, None),
                    Divisibility::Alpha(k) => (k, Some(k)),
                };
                ansatz = ansatz.with_divisibility(Some(m), q);
            }
            let mut policy = WindowPolicy::default();
            policy.fit = fit.as_deref().map(window).transpose()?;
            policy.verify = verify_window.as_deref().map(window).transpose()?;
            let (fit, ver) = policy.windows(r, &ansatz);
            if classical {
                let g = guess_classical(&f, &ansatz, &fit, &ver)?;
                let rep = GuessReport::new(g, ansatz, fit, ver);
                io.emit(&rep, || rep.summary())?;
                return Ok(rep.code());
            }
            let g = match (&multiplicities, mode) {
                (Some(m), None) => {
                    guess_with_multiplicities(&f, &ints::<u32>(m, "tuple")?, b, &fit, &ver)?
                }
                (None, Some(mode)) => guess_divisible(&f, &ansatz.subset, mode, b, &fit, &ver)?,
                _ => guess_annihilator(&f, &ansatz, &fit, &ver)?,
            };
            let rep = GuessReport::new(g, ansatz, fit, ver);
            io.emit(&rep, || rep.summary())?;
            Ok(rep.code())
        }
        Cmd::Certify {
            seq,
            bounds: b,
            window: w,
            trace,
        } => {
            let f = sequence(&seq)?;
            let policy = WindowPolicy {
                fit: w.as_deref().map(window).transpose()?,
                verify: None,
            };
            let mut c = certify_with_windows(&f, &schedule(&b, &DEFAULT_SCHEDULE)?, &policy)?;
            if trace && c.is_complete() {
                c.cone_trace = Some(cone_trace(&c)?);
            }
            io.emit(&c, || cert_summary(&c))?;
            Ok(cert_code(&c))
        }
        Cmd::CertifyMult {
            seq,
            tuple,
            bounds: b,
        } => {
            let f = sequence(&seq)?;
            let tuples: Vec<Vec<u32>> = tuple
                .iter()
                .map(|t| ints(t, "tuple"))
                .collect::<Result<_>>()?;
            let c = certify_with_multiplicities(&f, &tuples, &schedule(&b, &DEFAULT_SCHEDULE)?)?;
            io.emit(&c, || cert_summary(&c))?;
            Ok(cert_code(&c))
        }
        Cmd::CertifyClassical {
            seq,
            bounds: b,
            window: w,
        } => {
            let g = sequence(&seq)?;
            let policy = WindowPolicy {
                fit: w.as_deref().map(window).transpose()?,
                verify: None,
            };
            let c =
                certify_classical_with_windows(&g, &schedule(&b, &CLASSICAL_SCHEDULE)?, &policy)?;
            io.emit(&c, || cert_summary(&c))?;
            Ok(cert_code(&c))
        }
        Cmd::Dimension {
            seq,
            n_max,
            grid,
            exact_rank,
        } => {
            let f = sequence(&seq)?;
            let mode = if exact_rank {
                RankMode::Exact
            } else {
                RankMode::default_seeds(io.seed)
            };
            let grid = grid.as_deref().map(window).transpose()?;
            let p = dimension_profile(&f, n_max, grid, &mode)?;
            io.emit(&p, || {
                let mut s: String = p
                    .dims
                    .iter()
                    .enumerate()
                    .map(|(n, d)| format!("{n}\t{d}\n"))
                    .collect();
                let deg = p
                    .fitted_degree
                    .map_or("inconclusive".into(), |d| d.to_string());
                s += &format!("fitted degree {deg}, {:?}", p.verdict).to_lowercase();
                if p.degenerate {
                    s += ", degenerate";
                }
                if p.underdetermined {
                    s += ", underdetermined grid";
                }
                s + "\n"
            })?;
            Ok(if p.verdict == Verdict::Consistent {
                CERTIFIED
            } else {
                INCONCLUSIVE
            })
        }
        Cmd::Spanning { source, n, counts } => {
            let (_, c) = source.load()?;
            c.require_complete()?;
            if let Some(range) = counts {
                let w = window(&range)?;
                let ns: Vec<u32> = (w.lower[0]..=w.upper[0]).map(|n| n as u32).collect();
                let t = spanning_count_check(&c, &ns)?;
                io.emit(&t, || {
                    let mut s: String = t
                        .counts
                        .iter()
                        .map(|(n, k)| format!("{n}\t{k}\n"))
                        .collect();
                    let deg = t
                        .fitted_degree
                        .map_or("inconclusive".into(), |d| d.to_string());
                    s += &format!("fitted degree {deg}\n");
                    s
                })?;
                return Ok(if t.consistent {
                    CERTIFIED
                } else {
                    INCONCLUSIVE
                });
            }
            let s = spanning_set(&c, n.unwrap())?;
            io.emit(&s, || {
                s.generators.iter().map(|m| format!("{m}\n")).collect()
            })?;
            Ok(CERTIFIED)
        }
        Cmd::Reduce {
            source,
            monomial: y,
            window: w,
        } => {
            let (f, c) = source.load()?;
            let y = monomial(&y, c.r)?;
            let w = match w {
                Some(w) => window(&w)?,
                None => default_fit_window(c.r),
            };
            let red = reduce_monomial(&y, &c, &f, &w)?;
            io.emit(&red, || {
                format!(
                    "{} = {}  ({} rewrites)\n",
                    red.monomial, red.operator, red.rewrites
                )
            })?;
            Ok(CERTIFIED)
        }
        Cmd::Closure { kind } => {
            let rep = match kind {
                ClosureCmd::Root { seq, p, bounds: b } => {
                    closure_root_of_unity(&sequence(&seq)?, p, &schedule(&b, &DEFAULT_SCHEDULE)?)?
                }
                ClosureCmd::Alpha {
                    seq,
                    alpha,
                    bounds: b,
                } => {
                    let (a, k) = fraction(&alpha)?;
                    closure_alpha(&sequence(&seq)?, a, k, &schedule(&b, &DEFAULT_SCHEDULE)?)?
                }
                ClosureCmd::Dq { source, bounds: b } => {
                    let (f, c) = source.load()?;
                    closure_dq(&f, &c, &schedule(&b, &DEFAULT_SCHEDULE)?)?
                }
                ClosureCmd::Eval {
                    source,
                    p,
                    cap,
                    bounds: b,
                } => {
                    let (f, c) = source.load()?;
                    closure_eval_at_root(&f, &c, p, &schedule(&b, &DEFAULT_SCHEDULE)?, cap)?
                }
            };
            io.emit(&rep, || closure_summary(&rep))?;
            Ok(closure_code(&rep))
        }
        Cmd::Seq { cmd: SeqCmd::List } => {
            let rows: Vec<(String, String)> = REGISTRY
                .iter()
                .map(|(name, args, doc)| (format!("{name}{args}"), doc.to_string()))
                .collect();
            io.emit(&rows, || {
                rows.iter().map(|(n, d)| format!("{n:<14}{d}\n")).collect()
            })?;
            Ok(CERTIFIED)
        }
    }
}

fn main() -> ExitCode {
    // exit code 2 means inconclusive, so usage errors get 1
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
