//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so each line is printed as it finishes;
//! the process exits nonzero if any criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qholo_core::certify::{
    certify_classical, certify_strong_finiteness, dimension_profile, reduce_monomial,
    spanning_count_check, spanning_set, Certificate, RankMode, Verdict, CLASSICAL_SCHEDULE,
    DEFAULT_SCHEDULE,
};
use qholo_core::closure::{
    closure_alpha, closure_dq, closure_eval_at_root, closure_root_of_unity, DEFAULT_DESCENT_CAP,
};
use qholo_core::guess::{
    annihilation_failure, classical_annihilation_failure, guess_classical, Ansatz, Guess,
};
use qholo_core::sequences::{apply, apply_mixed, builtin, seq_dq, Domain, Sequence, Window};
use qholo_core::text::{parse_classical, parse_operator};
use qholo_core::weyl::dq_commutator;
use qholo_core::{BaseField, Monomial, Operator, RatFunc, Scalar, Var, Variant};

const SEED: u64 = 1729;

type Artifacts = Vec<(String, String)>;

fn w(s: &str) -> Window {
    s.parse().unwrap()
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).unwrap()
}

fn qq() -> BaseField {
    BaseField::rationals()
}

fn op(text: &str, r: usize) -> Operator {
    parse_operator(text, r, qq()).unwrap()
}

fn oracle(
    id: &str,
    r: usize,
    field: BaseField,
    f: impl Fn(&[i64]) -> RatFunc + Send + Sync + 'static,
) -> Sequence {
    Sequence::new(id, r, Domain::Naturals, field, move |n| Ok(f(n)))
}

fn signed_q_pow(sign: i64, e: i64) -> RatFunc {
    RatFunc::q_pow(qq(), e).scale(&Scalar::from_int(sign))
}

fn assert_kills(p: &Operator, f: &Sequence, window: &str) {
    let at = annihilation_failure(p, f, &w(window)).unwrap();
    assert!(at.is_none(), "{p} fails on {} at {at:?}", f.id());
}

fn certificate(name: &str) -> Certificate {
    certify_strong_finiteness(&builtin(name).unwrap(), &DEFAULT_SCHEDULE).unwrap()
}

// 1. algebra laws in W_2

fn random_coeff(rng: &mut ChaCha8Rng) -> RatFunc {
    let c = loop {
        let c = rng.gen_range(-3i64..=3);
        if c != 0 {
            break c;
        }
    };
    let t = signed_q_pow(c, rng.gen_range(-2..=2));
    if rng.gen_bool(0.2) {
        &t / &(&RatFunc::one() + &RatFunc::q_pow(qq(), 2))
    } else {
        t
    }
}

fn random_operator(rng: &mut ChaCha8Rng) -> Operator {
    let n = rng.gen_range(1..=3);
    let terms: Vec<_> = (0..n)
        .map(|_| {
            let mut e = || (0..2).map(|_| rng.gen_range(-1i64..=1)).collect::<Vec<_>>();
            let m = Monomial::new(e(), e());
            (m, random_coeff(rng))
        })
        .collect();
    Operator::from_terms(2, Variant::Wr, terms).unwrap()
}

fn random_finite_sequence(rng: &mut ChaCha8Rng, i: usize) -> Sequence {
    let pts: Vec<(Vec<i64>, RatFunc)> = (0..rng.gen_range(1..=4))
        .map(|_| {
            let n = vec![rng.gen_range(-2i64..=2), rng.gen_range(-2i64..=2)];
            let v = &RatFunc::from_int(rng.gen_range(-4..=4))
                + &signed_q_pow(rng.gen_range(1..=3), rng.gen_range(0..=3));
            (n, v)
        })
        .collect();
    Sequence::new(format!("fin{i}"), 2, Domain::Integers, qq(), move |n| {
        Ok(pts
            .iter()
            .filter(|(p, _)| p.as_slice() == n)
            .fold(RatFunc::zero(), |acc, (_, v)| &acc + v))
    })
}

fn pointwise_equal(a: &Sequence, b: &Sequence, window: &Window) -> bool {
    window
        .points()
        .iter()
        .all(|n| a.eval(n).unwrap() == b.eval(n).unwrap())
}

fn algebra_laws(_: &mut Artifacts) {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let seqs: Vec<Sequence> = (0..10)
        .map(|i| random_finite_sequence(&mut rng, i))
        .collect();
    let window = w("-3..3,-3..3");
    for t in 0..200 {
        let (a, b, c) = (
            random_operator(&mut rng),
            random_operator(&mut rng),
            random_operator(&mut rng),
        );
        let left = a.mul(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        assert_eq!(left, right, "associativity fails for triple {t}");
        let f = &seqs[t % seqs.len()];
        let nested = apply(&a, &apply(&b, &apply(&c, f).unwrap()).unwrap()).unwrap();
        assert!(
            pointwise_equal(&apply(&left, f).unwrap(), &nested, &window),
            "action of triple {t}"
        );
    }
    let q = RatFunc::q();
    for i in 0..2 {
        for j in 0..2 {
            let l = Operator::generator(2, Var::L(i), 1);
            let m = Operator::generator(2, Var::M(j), 1);
            let factor = if i == j { q.clone() } else { RatFunc::one() };
            let lm = l.mul(&m).unwrap();
            let ml = m.mul(&l).unwrap().scale(&factor);
            assert_eq!(lm, ml, "L{}M{} relation", i + 1, j + 1);
            for f in &seqs {
                assert!(pointwise_equal(
                    &apply(&lm, f).unwrap(),
                    &apply(&ml, f).unwrap(),
                    &window
                ));
            }
            let inv = Operator::generator(2, Var::L(i), -1);
            assert_eq!(l.mul(&inv).unwrap(), Operator::one(2, Variant::Wr));
        }
    }
}

// 2. r = 1 certificate

fn certify_r1(out: &mut Artifacts) {
    let c = certificate("qpow2");
    assert!(c.is_complete() && c.entries.len() == 1);
    let p = &c.entries[0].operator;
    let lead = p.coeff(&Monomial::new(vec![1], vec![0]));
    let target = op("L-q*M^2", 1);
    assert_eq!(p.scale(&lead.inv().unwrap()), target);
    // q^((n+1)^2) - q q^(2n) q^(n^2) = 0
    let oracle = oracle("qpow2", 1, qq(), |n| RatFunc::q_pow(qq(), n[0] * n[0]));
    assert_kills(p, &oracle, "0..40");
    out.push(("certify_qpow2".into(), json(&c)));
}

// 3. r = 2 certificates

fn certify_r2(out: &mut Artifacts) {
    let qnk = oracle("qnk", 2, qq(), |n| RatFunc::q_pow(qq(), n[0] * n[1]));
    let qbinom = builtin("qbinom").unwrap();
    for (name, f) in [("qnk", qnk), ("qbinom", qbinom)] {
        let c = certificate(name);
        assert!(c.is_complete(), "{name} incomplete");
        assert_eq!(c.entries.len(), 4);
        for e in &c.entries {
            assert!(e.bounds.shift <= 2 && e.bounds.q <= 8);
            assert!(e.operator.support().iter().all(|v| e.subset.contains(v)));
            let at = annihilation_failure(&e.operator, &f, &w("0..14,0..14")).unwrap();
            assert!(at.is_none(), "{name} {} at {at:?}", e.text);
        }
        let status = Command::new(env!("CARGO_BIN_EXE_qholo"))
            .args(["certify", "--seq", name])
            .output()
            .unwrap()
            .status;
        assert_eq!(status.code(), Some(0), "qholo certify --seq {name}");
        out.push((format!("certify_{name}"), json(&c)));
    }
    let status = Command::new(env!("CARGO_BIN_EXE_qholo"))
        .args(["certify", "--seq", "qnk", "--bounds", "0,0,0"])
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(2));
}

// 4. spanning sets and reductions

fn spanning(out: &mut Artifacts) {
    let c = certificate("qpow2");
    let f = builtin("qpow2").unwrap();
    let ns: Vec<u32> = (2..=12).collect();
    let t = spanning_count_check(&c, &ns).unwrap();
    for &(n, k) in &t.counts {
        assert_eq!(k, 2 * n as usize + 1, "N = {n}");
    }
    assert_eq!(t.fitted_degree, Some(1));
    out.push(("spanning_counts".into(), json(&t)));

    // M^b L^a f_n = q^(b n) f_(n+a), independent of the code under test
    let oracle = oracle("qpow2", 1, qq(), |n| RatFunc::q_pow(qq(), n[0] * n[0]));
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut reductions = vec![];
    for _ in 0..30 {
        let y = Monomial::new(vec![rng.gen_range(0..=5)], vec![rng.gen_range(2..=8)]);
        let red = reduce_monomial(&y, &c, &f, &w("0..15")).unwrap();
        let span = spanning_set(&c, y.degree() as u32).unwrap().generators;
        assert!(red.operator.terms().all(|(m, _)| span.contains(m)), "{y}");
        let lhs = apply(&Operator::monomial(y.clone(), RatFunc::one()), &oracle).unwrap();
        let rhs = apply(&red.operator, &oracle).unwrap();
        assert!(pointwise_equal(&lhs, &rhs, &w("0..15")), "{y}");
        reductions.push(red);
    }
    out.push(("reductions".into(), json(&reductions)));
}

// 5. dimension profiles

fn profiles(out: &mut Artifacts) {
    let seeds = RankMode::default_seeds(SEED);
    let cases = [
        ("qpow2", 10, Some(1), false),
        ("qnk", 12, Some(2), false),
        ("delta(2)", 8, Some(0), true),
    ];
    for (name, n_max, degree, degenerate) in cases {
        let f = builtin(name).unwrap();
        let p = dimension_profile(&f, n_max, None, &seeds).unwrap();
        assert_eq!(p.fitted_degree, degree, "{name}");
        assert_eq!(p.verdict, Verdict::Consistent);
        assert_eq!(p.degenerate, degenerate, "{name}");
        out.push((format!("profile_{name}"), json(&p)));
    }
    for (name, n_max) in [("qpow2", 6), ("qnk", 4), ("delta(2)", 4)] {
        let f = builtin(name).unwrap();
        let a = dimension_profile(&f, n_max, None, &seeds).unwrap();
        let b = dimension_profile(&f, n_max, None, &RankMode::Exact).unwrap();
        assert_eq!(a.dims, b.dims, "{name} exact vs probabilistic");
        out.push((format!("profile_exact_{name}"), json(&b)));
    }
}

// 6. root of unity

fn root_closure(out: &mut Artifacts) {
    let f = builtin("qpow2").unwrap();
    let rep = closure_root_of_unity(&f, 2, &DEFAULT_SCHEDULE).unwrap();
    let p = &rep.output.quantum().unwrap().entries[0].operator;
    assert_eq!(*p, op("L+q*M^2", 1));
    let minus_q = oracle("mq", 1, qq(), |n| {
        signed_q_pow(if n[0] % 2 == 0 { 1 } else { -1 }, n[0] * n[0])
    });
    assert_kills(p, &minus_q, "0..20");
    out.push(("closure_root".into(), json(&rep)));

    let same = closure_root_of_unity(&f, 1, &DEFAULT_SCHEDULE).unwrap();
    let c = certificate("qpow2");
    let a: Vec<_> = same
        .output
        .quantum()
        .unwrap()
        .entries
        .iter()
        .map(|e| &e.operator)
        .collect();
    let b: Vec<_> = c.entries.iter().map(|e| &e.operator).collect();
    assert_eq!(a, b);
}

// 7. q -> q^(1/2)

fn alpha_closure(out: &mut Artifacts) {
    let f = builtin("qpow2").unwrap();
    let rep = closure_alpha(&f, 1, 2, &DEFAULT_SCHEDULE).unwrap();
    let field = qq().with_split(2);
    let p = &rep.output.quantum().unwrap().entries[0].operator;
    assert_eq!(*p, parse_operator("L^2-q^2*M^2", 1, field).unwrap());
    let g = oracle("u_n2", 1, field, move |n| {
        RatFunc::var_pow(field, n[0] * n[0])
    });
    assert_kills(p, &g, "0..20");
    out.push(("closure_alpha".into(), json(&rep)));
}

// 8. q-derivative

fn dq_closure(out: &mut Artifacts) {
    let f = builtin("qpow2").unwrap();
    let c = certificate("qpow2");
    let rep = closure_dq(&f, &c, &DEFAULT_SCHEDULE).unwrap();
    let qp = &rep.output.quantum().unwrap().entries[0].operator;
    let df = oracle("dqpow2", 1, qq(), |n| {
        signed_q_pow(n[0] * n[0], n[0] * n[0] - 1)
    });
    assert_kills(qp, &df, "0..20");

    let p = c.entries[0].operator.clear_denominators();
    let r = dq_commutator(&p).unwrap();
    let lhs = seq_dq(&apply(&p, &f).unwrap()).unwrap();
    let pdf = apply(&p, &df).unwrap();
    let rf = apply_mixed(&r, &f).unwrap();
    for n in w("0..15").points() {
        let rhs = &pdf.eval(&n).unwrap() + &rf.eval(&n).unwrap();
        assert_eq!(lhs.eval(&n).unwrap(), rhs, "identity at {n:?}");
    }
    out.push(("closure_dq".into(), json(&rep)));
}

// 9. evaluation at q = 1

fn pascal(n: usize) -> Vec<Vec<i64>> {
    let mut t = vec![vec![0i64; n + 1]; n + 1];
    for i in 0..=n {
        t[i][0] = 1;
        for j in 1..=i {
            t[i][j] = t[i - 1][j - 1] + if j < i { t[i - 1][j] } else { 0 };
        }
    }
    t
}

fn triangle(n: i64) -> Vec<Vec<i64>> {
    (0..=n)
        .flat_map(|a| (0..=a).map(move |b| vec![a, b]))
        .collect()
}

fn eval_closure(out: &mut Artifacts) {
    let f = builtin("qbinom").unwrap();
    let rep = closure_eval_at_root(
        &f,
        &certificate("qbinom"),
        1,
        &DEFAULT_SCHEDULE,
        DEFAULT_DESCENT_CAP,
    )
    .unwrap();
    let c = rep.output.classical().unwrap();
    assert!(c.is_complete() && c.entries.len() == 4);
    let table = pascal(40);
    let binom = oracle("pascal", 2, qq(), move |n| {
        let ok = n[0] >= 0 && n[1] >= 0 && n[1] <= n[0];
        RatFunc::from_int(if ok {
            table[n[0] as usize][n[1] as usize]
        } else {
            0
        })
    });
    let values = qholo_core::sequences::apply_classical;
    for e in &c.entries {
        let got = values(&e.operator, &binom).unwrap();
        for n in triangle(12) {
            assert!(got.eval(&n).unwrap().is_zero(), "{} at {n:?}", e.text);
        }
    }
    out.push(("closure_eval_qbinom".into(), json(&rep)));

    let mut c = certificate("qpow2");
    let p = op("(q-1)*(L-q*M^2)", 1);
    c.entries[0].text = p.to_string();
    c.entries[0].operator = p;
    let rep = closure_eval_at_root(
        &builtin("qpow2").unwrap(),
        &c,
        1,
        &DEFAULT_SCHEDULE,
        DEFAULT_DESCENT_CAP,
    )
    .unwrap();
    assert!(rep.provenance[0].descent_rounds.unwrap() >= 1);
    let e = &rep.output.classical().unwrap().entries[0].operator;
    assert!(!e.is_zero());
    let one = oracle("one", 1, qq(), |_| RatFunc::one());
    assert_eq!(
        classical_annihilation_failure(e, &one, &w("0..20")).unwrap(),
        None
    );
    out.push(("closure_eval_descent".into(), json(&rep)));
}

// 10. classical certificate for C(n, k)

fn classical(out: &mut Artifacts) {
    let g = builtin("binom").unwrap();
    let c = certify_classical(&g, &CLASSICAL_SCHEDULE).unwrap();
    assert!(c.is_complete() && c.entries.len() == 4);
    for e in &c.entries {
        assert_eq!(
            classical_annihilation_failure(&e.operator, &g, &w("0..14,0..14")).unwrap(),
            None
        );
    }
    let ansatz = Ansatz::new(vec![Var::L(0), Var::L(1)], 1, 0, 0);
    let fit = w("0..10,0..10");
    let ver = w("20..26,20..26");
    let found = match guess_classical(&g, &ansatz, &fit, &ver).unwrap() {
        Guess::Found(r) => r.operator,
        other => panic!("no Pascal relation: {other:?}"),
    };
    assert_eq!(found, parse_classical("l1*l2-l2-1", 2, 1).unwrap());
    out.push(("certify_classical_binom".into(), json(&c)));
}

type Criterion = (u32, &'static str, fn(&mut Artifacts));

const CRITERIA: [Criterion; 10] = [
    (1, "algebra laws in W_2", algebra_laws),
    (2, "certificate for q^(n^2)", certify_r1),
    (3, "certificates for q^(nk) and the q-binomial", certify_r2),
    (4, "spanning set counts and reductions", spanning),
    (5, "dimension profiles", profiles),
    (6, "root of unity closure", root_closure),
    (7, "q^alpha closure", alpha_closure),
    (8, "q-derivative closure", dq_closure),
    (9, "evaluation at q = 1", eval_closure),
    (10, "classical certificate for C(n,k)", classical),
];

fn run(f: fn(&mut Artifacts)) -> Result<Artifacts, String> {
    let mut out = vec![];
    panic::catch_unwind(AssertUnwindSafe(|| f(&mut out))).map_err(|e| {
        e.downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panicked".into())
    })?;
    Ok(out)
}

fn cli_artifacts() -> Vec<Vec<u8>> {
    let runs: [&[&str]; 3] = [
        &["certify", "--seq", "qbinom", "--json"],
        &["dimension", "--seq", "qnk", "--n-max", "8", "--json"],
        &["closure", "dq", "--seq", "qpow2", "--json"],
    ];
    runs.iter()
        .map(|args| {
            Command::new(env!("CARGO_BIN_EXE_qholo"))
                .args(*args)
                .env_remove("QHOLO_SEED")
                .output()
                .unwrap()
                .stdout
        })
        .collect()
}

fn report(n: u32, name: &str, start: Instant, res: &Result<(), String>) -> bool {
    let secs = start.elapsed().as_secs_f64();
    match res {
        Ok(()) => println!("criterion {n:>2} PASS  {name}  ({secs:.1}s)"),
        Err(e) => println!("criterion {n:>2} FAIL  {name}  ({secs:.1}s): {e}"),
    }
    res.is_ok()
}

fn main() {
    panic::set_hook(Box::new(|_| {}));
    let mut ok = true;
    let mut first: Vec<Option<Artifacts>> = vec![];
    for (n, name, f) in CRITERIA {
        let start = Instant::now();
        let res = run(f);
        ok &= report(
            n,
            name,
            start,
            &res.as_ref().map(|_| ()).map_err(Clone::clone),
        );
        first.push(res.ok());
    }

    let start = Instant::now();
    let mut det: Result<(), String> = Ok(());
    for ((n, _, f), before) in CRITERIA.iter().zip(&first).skip(1) {
        let Some(before) = before else {
            det = Err(format!("criterion {n} failed, nothing to compare"));
            break;
        };
        match run(*f) {
            Ok(again) if &again == before => {}
            Ok(_) => {
                det = Err(format!("criterion {n} artifacts differ between runs"));
                break;
            }
            Err(e) => {
                det = Err(format!("criterion {n} failed on the second run: {e}"));
                break;
            }
        }
    }
    if det.is_ok() && cli_artifacts() != cli_artifacts() {
        det = Err("qholo output differs between runs".into());
    }
    ok &= report(11, "determinism of JSON artifacts", start, &det);

    if !ok {
        std::process::exit(1);
    }
}
