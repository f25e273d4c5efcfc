use proptest::prelude::*;
use qholo_core::coeff::{BaseField, Poly, RatFunc, Scalar};
use qholo_core::sequences::*;
use qholo_core::text::{parse_classical, parse_operator};
use qholo_core::weyl::{MPoly, MixedOperator, Monomial};

fn q1() -> BaseField {
    BaseField::rationals()
}

fn qp(e: i64) -> RatFunc {
    RatFunc::q_pow(q1(), e)
}

fn op(s: &str, r: usize) -> qholo_core::Operator {
    parse_operator(s, r, q1()).unwrap()
}

#[test]
fn operator_action_examples() {
    let f = q_power_square();
    let g = apply(&op("M", 1), &f).unwrap();
    assert_eq!(g.eval(&[3]).unwrap(), qp(12));
    let g = apply(&op("L", 1), &f).unwrap();
    assert_eq!(g.eval(&[4]).unwrap(), f.eval(&[5]).unwrap());
    let z = apply(&op("L-q*M^2", 1), &f).unwrap();
    for n in 0..=20 {
        assert!(z.eval(&[n]).unwrap().is_zero());
    }
}

#[test]
fn classical_action_examples() {
    let m = parse_classical("m", 1, 1).unwrap();
    assert_eq!(
        apply_classical(&m, &constant_one(1))
            .unwrap()
            .eval(&[5])
            .unwrap(),
        RatFunc::from_int(5)
    );
    let d2 = parse_classical("(l-1)^2", 1, 1).unwrap();
    let z = apply_classical(&d2, &identity()).unwrap();
    let d1 = parse_classical("l-1", 1, 1).unwrap();
    let z1 = apply_classical(&d1, &constant_one(1)).unwrap();
    for n in -5..10 {
        assert!(z.eval(&[n]).unwrap().is_zero());
        assert!(z1.eval(&[n]).unwrap().is_zero());
    }
}

#[test]
fn mixed_action_examples() {
    // (1 + m) M on q^(n^2) at n = 2: 3 q^2 q^4
    let mut coeff = MPoly::<RatFunc>::var(1, 0);
    coeff.add_term(vec![0], RatFunc::one());
    let p = op("M", 1);
    let mut mixed = MixedOperator::zero(1);
    mixed.add_term(Monomial::new(vec![0], vec![1]), coeff);
    let g = apply_mixed(&mixed, &q_power_square()).unwrap();
    assert_eq!(g.eval(&[2]).unwrap(), qp(6).scale(&Scalar::from_int(3)));
    let zero = apply_mixed(&MixedOperator::zero(1), &q_power_square()).unwrap();
    assert!(zero.eval(&[4]).unwrap().is_zero());
    // with m-polynomial 1 it agrees with the plain action
    let plain = apply(&p, &q_power_square()).unwrap();
    let via = apply_mixed(&MixedOperator::from_operator(&p), &q_power_square()).unwrap();
    for n in [-3, 0, 2, 7, 11] {
        assert_eq!(plain.eval(&[n]).unwrap(), via.eval(&[n]).unwrap());
    }
}

#[test]
fn naturals_domain_rejects_negative_shifts() {
    let d = delta_at_origin(1);
    assert!(apply(&op("L^-1", 1), &d).is_err());
    assert!(d.eval(&[-1]).is_err());
    assert!(apply(&op("L", 1), &d)
        .unwrap()
        .eval(&[0])
        .unwrap()
        .is_zero());
}

#[test]
fn library_values() {
    let b = q_binomial();
    assert_eq!(b.eval(&[2, 1]).unwrap(), &RatFunc::one() + &RatFunc::q());
    for n in 0..8 {
        assert!(b.eval(&[n, 0]).unwrap().is_one());
    }
    assert!(b.eval(&[3, 4]).unwrap().is_zero());
    assert!(b.eval(&[3, -1]).unwrap().is_zero());
    assert!(q_pochhammer().eval(&[0]).unwrap().is_one());
    assert!(q_pochhammer().eval(&[-2]).unwrap().is_zero());
    assert_eq!(q_power_bilinear().eval(&[3, -2]).unwrap(), qp(-6));
    assert_eq!(
        q_integer().eval(&[3]).unwrap(),
        RatFunc::from_poly(q1(), Poly::from_ints(&[1, 1, 1]))
    );
}

#[test]
fn derivative_examples() {
    let d = seq_dq(&q_power_square()).unwrap();
    assert_eq!(d.eval(&[2]).unwrap(), qp(3).scale(&Scalar::from_int(4)));
    assert!(seq_dq(&constant_one(1))
        .unwrap()
        .eval(&[3])
        .unwrap()
        .is_zero());
    let d = seq_dq(&q_integer()).unwrap();
    assert_eq!(
        d.eval(&[3]).unwrap(),
        RatFunc::from_poly(q1(), Poly::from_ints(&[1, 2]))
    );
    let a = seq_subst_alpha(&q_power_square(), 1, 2).unwrap();
    assert!(seq_dq(&a).is_err());
}

#[test]
fn substitution_examples() {
    let f = q_power_square();
    let r = seq_subst_root(&f, 2).unwrap();
    assert_eq!(r.eval(&[3]).unwrap(), -qp(9));
    let same = seq_subst_root(&f, 1).unwrap();
    assert_eq!(same.eval(&[4]).unwrap(), f.eval(&[4]).unwrap());
    let c = seq_subst_root(&constant_one(1), 7).unwrap();
    assert!(c.eval(&[3]).unwrap().is_one());

    let k2 = q1().with_split(2);
    let a = seq_subst_alpha(&f, 1, 2).unwrap();
    assert_eq!(a.field().split, 2);
    assert_eq!(a.eval(&[3]).unwrap(), RatFunc::var_pow(k2, 9));
    let a = seq_subst_alpha(&q_integer(), 1, 2).unwrap();
    assert_eq!(
        a.eval(&[2]).unwrap(),
        &RatFunc::one() + &RatFunc::var_pow(k2, 1)
    );
    let id = seq_subst_alpha(&f, 1, 1).unwrap();
    assert_eq!(id.eval(&[5]).unwrap(), f.eval(&[5]).unwrap());
}

#[test]
fn evaluation_examples() {
    let b = seq_eval_at_root(&q_binomial(), 1).unwrap();
    assert_eq!(b.eval(&[2, 1]).unwrap(), RatFunc::from_int(2));
    let f = seq_eval_at_root(&q_power_square(), 1).unwrap();
    for n in -4..6 {
        assert!(f.eval(&[n]).unwrap().is_one());
    }
    let g = seq_eval_at_root(&q_integer(), 1).unwrap();
    assert_eq!(g.eval(&[5]).unwrap(), RatFunc::from_int(5));
    // 1/(1-q^n)... a genuine pole reports the index
    let inv = Sequence::new("pole", 1, Domain::Integers, q1(), |n| {
        Ok(&RatFunc::one() / &(&RatFunc::one() - &qp(n[0] + 1)))
    });
    let e = seq_eval_at_root(&inv, 1).unwrap();
    assert_eq!(
        e.eval(&[2]),
        Err(qholo_core::Error::PoleAt { index: vec![2] })
    );
}

#[test]
fn registry() {
    let s = builtin("prod(qpow2, qint)").unwrap();
    assert_eq!(s.id(), "prod(qpow2,qint)");
    assert_eq!(
        s.eval(&[2]).unwrap(),
        &qp(4) * &(&RatFunc::one() + &RatFunc::q())
    );
    assert_eq!(builtin("alpha(qpow2,1/2)").unwrap().field().split, 2);
    assert_eq!(builtin("delta(2)").unwrap().arity(), 2);
    assert_eq!(
        builtin("diag(qbinom)").unwrap().eval(&[4]).unwrap(),
        RatFunc::one()
    );
    assert!(matches!(
        builtin("nope"),
        Err(qholo_core::Error::UnknownSequence(_))
    ));
    assert!(builtin("root(qpow2)").is_err());
}

/// Independent oracle: q-Pascal recursion.
fn pascal(n: i64, k: i64) -> Poly {
    if k < 0 || k > n || n < 0 {
        return Poly::zero();
    }
    if k == 0 || k == n {
        return Poly::one();
    }
    // [n,k] = [n-1,k-1] + q^k [n-1,k]
    &pascal(n - 1, k - 1) + &pascal(n - 1, k).mul_xpow(k as usize)
}

#[test]
fn q_pascal_consistency() {
    let b = q_binomial();
    for n in 0..=11 {
        for k in 0..=n + 1 {
            // [n+1,k] = [n,k] + q^(n+1-k) [n,k-1]
            let lhs = b.eval(&[n + 1, k]).unwrap();
            let rhs = &b.eval(&[n, k]).unwrap() + &(&qp(n + 1 - k) * &b.eval(&[n, k - 1]).unwrap());
            assert_eq!(lhs, rhs, "n={n} k={k}");
            assert_eq!(b.eval(&[n, k]).unwrap().num(), &pascal(n, k));
        }
    }
}

#[test]
fn memo_is_transparent() {
    let s = builtin("sum(qpow2,poch)").unwrap();
    for n in -3..9 {
        let a = s.eval(&[n]).unwrap();
        assert_eq!(a, s.eval_uncached(&[n]).unwrap());
        assert_eq!(a, s.eval(&[n]).unwrap());
    }
    assert!(s.cached() >= 12);
}

#[test]
fn concurrent_first_writes_agree() {
    let s = q_binomial();
    let vals: Vec<Vec<RatFunc>> = std::thread::scope(|sc| {
        let hs: Vec<_> = (0..4)
            .map(|_| {
                let s = s.clone();
                sc.spawn(move || (0..12).map(|n| s.eval(&[12, n]).unwrap()).collect())
            })
            .collect();
        hs.into_iter().map(|h| h.join().unwrap()).collect()
    });
    assert!(vals.windows(2).all(|w| w[0] == w[1]));
}

const OPS: &[&str] = &[
    "L",
    "M",
    "q*M-1",
    "L-q*M^2",
    "M^2*L+q",
    "L^2-M",
    "(q+1)*L*M",
    "1/q*M^-1+L",
];
const OPS2: &[&str] = &[
    "L1",
    "M2*L1-1",
    "L1*L2-q*M2*L2-1",
    "M1-q*M2^-1",
    "L2^2+M1*M2",
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn action_is_a_module_action(i in 0..OPS.len(), j in 0..OPS.len(), n in -4i64..6) {
        let (a, b) = (op(OPS[i], 1), op(OPS[j], 1));
        for f in [q_power_square(), q_integer(), q_pochhammer()] {
            let ab = apply(&a.mul(&b).unwrap(), &f).unwrap();
            let nested = apply(&a, &apply(&b, &f).unwrap()).unwrap();
            prop_assert_eq!(ab.eval(&[n]).unwrap(), nested.eval(&[n]).unwrap());
        }
    }

    #[test]
    fn action_is_a_module_action_r2(i in 0..OPS2.len(), j in 0..OPS2.len(), n in 0i64..6, k in -1i64..6) {
        let (a, b) = (op(OPS2[i], 2), op(OPS2[j], 2));
        for f in [q_binomial(), q_power_bilinear()] {
            let ab = apply(&a.mul(&b).unwrap(), &f).unwrap();
            let nested = apply(&a, &apply(&b, &f).unwrap()).unwrap();
            prop_assert_eq!(ab.eval(&[n, k]).unwrap(), nested.eval(&[n, k]).unwrap());
        }
    }

    #[test]
    fn conjugate_roots_cancel(p in 1u32..9, n in -3i64..8) {
        let f = q_integer();
        let z = Scalar::zeta(p);
        let there = seq_subst_root(&f, p).unwrap();
        let back = seq_subst_scaled(&there, &z.pow(-1), "back".into()).unwrap();
        prop_assert_eq!(back.eval(&[n]).unwrap(), f.eval(&[n]).unwrap());
    }

    #[test]
    fn leibniz(n in -4i64..8) {
        let (f, g) = (q_power_square(), q_integer());
        let lhs = seq_dq(&seq_product(&f, &g).unwrap()).unwrap().eval(&[n]).unwrap();
        let df = seq_dq(&f).unwrap().eval(&[n]).unwrap();
        let dg = seq_dq(&g).unwrap().eval(&[n]).unwrap();
        let rhs = &(&df * &g.eval(&[n]).unwrap()) + &(&f.eval(&[n]).unwrap() * &dg);
        prop_assert_eq!(lhs, rhs);
    }
}
