use proptest::prelude::*;
use qholo_core::guess::{
    annihilation_failure, default_verify_window, exact_nullspace, exact_rank_ratfunc,
    guess_annihilator, guess_classical, guess_divisible, guess_with_multiplicities,
    probabilistic_rank, Ansatz, Bounds, Divisibility, Guess,
};
use qholo_core::sequences::{builtin, Sequence, Window};
use qholo_core::text::parse_operator;
use qholo_core::{BaseField, RatFunc, Scalar, Var};

fn w(s: &str) -> Window {
    s.parse().unwrap()
}

fn vars(names: &[&str], r: usize) -> Vec<Var> {
    names.iter().map(|s| Var::parse(s, r).unwrap()).collect()
}

fn found(g: Guess) -> qholo_core::Operator {
    match g {
        Guess::Found(g) => {
            assert!(!g.degenerate);
            g.operator
        }
        other => panic!("no operator: {other:?}"),
    }
}

#[test]
fn qnk_single_shift() {
    let f = builtin("qnk").unwrap();
    let a = Ansatz::new(vars(&["L1", "M2"], 2), 1, 1, 0);
    let op = found(guess_annihilator(&f, &a, &w("0..9,0..9"), &w("20..29,20..29")).unwrap());
    assert_eq!(op.to_string(), "L1-M2");
}

#[test]
fn multiplicities() {
    let f = builtin("qpow2").unwrap();
    let op = found(
        guess_with_multiplicities(&f, &[2, 2], Bounds::new(1, 2, 4), &w("0..24"), &w("40..60"))
            .unwrap(),
    );
    assert_eq!(op.to_string(), "-q^4*M^4+L^2");
    for (m, _) in op.terms() {
        assert!(m.alpha[0] % 2 == 0 && m.beta[0] % 2 == 0);
    }
    let g = builtin("qnk").unwrap();
    let op = found(
        guess_with_multiplicities(
            &g,
            &[2, 0, 0, 2],
            Bounds::new(1, 1, 0),
            &w("0..9,0..9"),
            &w("20..29,20..29"),
        )
        .unwrap(),
    );
    assert_eq!(op.to_string(), "L1^2-M2^2");
    // support is at most r + 1
    assert!(guess_with_multiplicities(
        &g,
        &[2, 2, 2, 2],
        Bounds::new(1, 1, 0),
        &w("0..9,0..9"),
        &w("20..29,20..29")
    )
    .is_err());
}

#[test]
fn divisibility_modes() {
    let f = builtin("qpow2").unwrap();
    let lm = vars(&["L", "M"], 1);
    let op = found(
        guess_divisible(
            &f,
            &lm,
            Divisibility::Root(2),
            Bounds::new(1, 1, 1),
            &w("0..24"),
            &w("40..60"),
        )
        .unwrap(),
    );
    assert_eq!(op.to_string(), "-q*M^2+L");
    let op = found(
        guess_divisible(
            &f,
            &lm,
            Divisibility::Alpha(2),
            Bounds::new(2, 2, 2),
            &w("0..24"),
            &w("40..60"),
        )
        .unwrap(),
    );
    assert_eq!(op.to_string(), "-q^4*M^4+L^2");
    let b = Bounds::new(1, 2, 1);
    let one =
        guess_divisible(&f, &lm, Divisibility::Root(1), b, &w("0..24"), &w("40..60")).unwrap();
    let plain =
        guess_annihilator(&f, &Ansatz::from_bounds(lm, b), &w("0..24"), &w("40..60")).unwrap();
    assert_eq!(one, plain);
}

#[test]
fn qbinom_subsets() {
    let f = builtin("qbinom").unwrap();
    let fit = w("0..9,0..9");
    let ver = w("20..29,20..29");
    let cases = [
        (["L1", "L2", "M2"], Bounds::new(1, 1, 1)),
        (["L1", "L2", "M1"], Bounds::new(2, 1, 1)),
        (["L1", "M1", "M2"], Bounds::new(1, 1, 1)),
        (["L2", "M1", "M2"], Bounds::new(1, 2, 1)),
    ];
    for (names, b) in cases {
        let a = Ansatz::from_bounds(vars(&names, 2), b);
        let op = found(guess_annihilator(&f, &a, &fit, &ver).unwrap());
        assert!(annihilation_failure(&op, &f, &w("0..14,0..14"))
            .unwrap()
            .is_none());
        let support = op.support();
        assert!(support.iter().all(|v| a.subset.contains(v)), "{op}");
    }
}

#[test]
fn qbinom_known_relations_annihilate() {
    // hand-derived relations on the four 3-subsets
    let f = builtin("qbinom").unwrap();
    let field = BaseField::rationals();
    for text in [
        "L1*L2-q*M2*L2-1",
        "L1^2*L2-L1*L2-L1-q*M1+1",
        "M2*L1-q*M1*L1-M2+q*M1*M2",
        "M2*L2-q*M2^2*L2-M2+M1",
    ] {
        let op = parse_operator(text, 2, field).unwrap();
        assert!(
            annihilation_failure(&op, &f, &w("0..14,0..14"))
                .unwrap()
                .is_none(),
            "{text}"
        );
    }
}

#[test]
fn classical_examples() {
    let l = |n: &[&str], r| vars(n, r);
    let id = builtin("n").unwrap();
    let a = Ansatz::new(l(&["l"], 1), 2, 0, 0);
    let g = guess_classical(&id, &a, &w("0..24"), &w("40..60"))
        .unwrap()
        .found()
        .unwrap();
    assert_eq!(g.operator.to_string(), "l^2-2*l+1");

    let binom = builtin("binom").unwrap();
    let a = Ansatz::new(l(&["l1", "l2"], 2), 1, 0, 0);
    let g = guess_classical(&binom, &a, &w("0..9,0..9"), &w("20..29,20..29"))
        .unwrap()
        .found()
        .unwrap();
    assert_eq!(g.operator.to_string(), "l1*l2-l2-1");

    let fact = builtin("fact").unwrap();
    let a = Ansatz::new(l(&["l", "m"], 1), 1, 1, 0);
    let g = guess_classical(&fact, &a, &w("0..24"), &w("40..60"))
        .unwrap()
        .found()
        .unwrap();
    assert_eq!(g.operator.to_string(), "l-m-1");

    let one = builtin("one(1)").unwrap();
    let a = Ansatz::new(l(&["l"], 1), 1, 0, 0);
    let g = guess_classical(&one, &a, &w("0..24"), &w("40..60"))
        .unwrap()
        .found()
        .unwrap();
    assert_eq!(g.operator.to_string(), "l-1");

    let delta = builtin("delta(1)").unwrap();
    let g = guess_classical(&delta, &a, &w("3..24"), &w("40..60"))
        .unwrap()
        .found()
        .unwrap();
    assert!(g.degenerate);

    // q-dependent values are rejected
    let q = builtin("qpow2").unwrap();
    assert!(guess_classical(&q, &a, &w("0..24"), &w("40..60")).is_err());
}

#[test]
fn nullspace_oracle() {
    // independent check: A v = 0 and the basis size matches cols - rank
    let rows: Vec<Vec<Scalar>> = [[1, 2, 3, 4], [2, 4, 6, 8], [0, 1, 1, 0]]
        .iter()
        .map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect())
        .collect();
    let ns = exact_nullspace(&rows, 4);
    assert_eq!(ns.len(), 2);
    for v in &ns {
        for r in &rows {
            let s = r
                .iter()
                .zip(v)
                .fold(Scalar::zero(), |a, (x, y)| &a + &(x * y));
            assert!(s.is_zero());
        }
    }
}

fn scaled_by(f: &Sequence, c: i64) -> Sequence {
    let cf = RatFunc::from_int(c);
    let g = f.clone();
    Sequence::new(
        format!("{c}*{}", f.id()),
        1,
        f.domain(),
        f.field(),
        move |n| Ok(&g.eval(n)? * &cf),
    )
}

#[test]
fn scale_invariance_and_monotonicity() {
    let f = builtin("qpow2").unwrap();
    let lm = vars(&["L", "M"], 1);
    let fit = w("0..24");
    let ver = default_verify_window(&fit, 2);
    let base = found(guess_annihilator(&f, &Ansatz::new(lm.clone(), 1, 2, 1), &fit, &ver).unwrap());
    let scaled = found(
        guess_annihilator(
            &scaled_by(&f, -7),
            &Ansatz::new(lm.clone(), 1, 2, 1),
            &fit,
            &ver,
        )
        .unwrap(),
    );
    assert_eq!(base, scaled);
    for b in [
        Bounds::new(1, 3, 1),
        Bounds::new(2, 2, 1),
        Bounds::new(1, 2, 3),
    ] {
        let g = guess_annihilator(&f, &Ansatz::from_bounds(lm.clone(), b), &fit, &ver).unwrap();
        assert!(g.is_found(), "{b:?}");
    }
}

fn random_matrix(seed: &[i64], rows: usize, cols: usize) -> Vec<Vec<RatFunc>> {
    let field = BaseField::rationals();
    (0..rows)
        .map(|i| {
            (0..cols)
                .map(|j| {
                    let a = seed[(i * cols + j) % seed.len()];
                    let e = seed[(i + 2 * j) % seed.len()].rem_euclid(3);
                    &RatFunc::q_pow(field, e) * &RatFunc::from_int(a)
                })
                .collect()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn probabilistic_rank_bounded_by_exact(seed in proptest::collection::vec(-2i64..3, 9), s in 1u64..1000) {
        let m = random_matrix(&seed, 3, 3);
        let exact = exact_rank_ratfunc(&m);
        let p = probabilistic_rank(&m, 3, s, &[]).unwrap();
        prop_assert!(p <= exact);
        prop_assert_eq!(p, exact);
    }

    #[test]
    fn nullspace_vectors_annihilate(entries in proptest::collection::vec(-3i64..4, 12)) {
        let rows: Vec<Vec<Scalar>> = entries.chunks(4).map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect()).collect();
        let ns = exact_nullspace(&rows, 4);
        for v in &ns {
            for r in &rows {
                let s = r.iter().zip(v).fold(Scalar::zero(), |a, (x, y)| &a + &(x * y));
                prop_assert!(s.is_zero());
            }
        }
        prop_assert_eq!(ns.len() + qholo_core::guess::exact_rank(&rows), 4);
    }
}
