use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::coeff::{BaseField, RatFunc, Scalar};
use crate::error::{Error, Result};
use crate::weyl::{ClassicalOperator, MixedOperator, Operator};

/// Index set of a sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Naturals,
    Integers,
}

type EvalFn = dyn Fn(&[i64]) -> Result<RatFunc> + Send + Sync;

struct Inner {
    id: String,
    r: usize,
    domain: Domain,
    field: BaseField,
    eval: Arc<EvalFn>,
    memo: Arc<RwLock<HashMap<Vec<i64>, RatFunc>>>,
}

/// Exact, memoized map `Z^r -> field` (or `N^r -> field`). Cheap to clone.
///
/// Classical sequences (no `q`) are represented with constant values.
#[derive(Clone)]
pub struct Sequence(Arc<Inner>);

impl fmt::Debug for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Sequence")
            .field("id", &self.0.id)
            .field("r", &self.0.r)
            .field("domain", &self.0.domain)
            .field("field", &self.0.field)
            .finish()
    }
}

impl Sequence {
    pub fn new(
        id: impl Into<String>,
        r: usize,
        domain: Domain,
        field: BaseField,
        eval: impl Fn(&[i64]) -> Result<RatFunc> + Send + Sync + 'static,
    ) -> Self {
        Sequence(Arc::new(Inner {
            id: id.into(),
            r,
            domain,
            field,
            eval: Arc::new(eval),
            memo: Arc::new(RwLock::new(HashMap::new())),
        }))
    }

    pub fn id(&self) -> &str {
        &self.0.id
    }

    pub fn arity(&self) -> usize {
        self.0.r
    }

    pub fn domain(&self) -> Domain {
        self.0.domain
    }

    pub fn field(&self) -> BaseField {
        self.0.field
    }

    /// Value at `n`; errors if `n` leaves the domain or hits a pole.
    pub fn eval(&self, n: &[i64]) -> Result<RatFunc> {
        if n.len() != self.0.r {
            return Err(Error::ArityMismatch(self.0.r, n.len()));
        }
        if self.0.domain == Domain::Naturals && n.iter().any(|&x| x < 0) {
            return Err(Error::OutOfDomain { index: n.to_vec() });
        }
        if let Some(v) = self.0.memo.read().unwrap().get(n) {
            return Ok(v.clone());
        }
        let v = self.eval_uncached(n)?;
        self.0
            .memo
            .write()
            .unwrap()
            .entry(n.to_vec())
            .or_insert_with(|| v.clone());
        Ok(v)
    }

    /// Bypass the memo (used to test that caching is transparent).
    pub fn eval_uncached(&self, n: &[i64]) -> Result<RatFunc> {
        let v = (self.0.eval)(n)?;
        Ok(v.with_field(self.0.field.join(&v.field().with_split(self.0.field.split))))
    }

    /// Number of memoized values.
    pub fn cached(&self) -> usize {
        self.0.memo.read().unwrap().len()
    }

    /// Same values (and memo) under a new id.
    pub fn renamed(&self, id: impl Into<String>) -> Sequence {
        Sequence(Arc::new(Inner {
            id: id.into(),
            eval: self.0.eval.clone(),
            memo: self.0.memo.clone(),
            ..*self.0
        }))
    }
}

/// Bring `c` to the power split `k` (values in `q` get `q = u^k` substituted).
fn to_split(c: &RatFunc, k: u32) -> Result<RatFunc> {
    let s = c.field().split;
    if s == k || c.is_constant() {
        Ok(c.with_field(c.field().with_split(k)))
    } else if s == 1 {
        Ok(c.lift_split(k))
    } else {
        Err(Error::Invalid(format!(
            "cannot combine power splits {s} and {k}"
        )))
    }
}

fn common_split(a: BaseField, b: BaseField) -> Result<u32> {
    match (a.split, b.split) {
        (x, y) if x == y => Ok(x),
        (1, y) => Ok(y),
        (x, 1) => Ok(x),
        (x, y) => Err(Error::Invalid(format!(
            "cannot combine power splits {x} and {y}"
        ))),
    }
}

fn check_shifts<'a>(
    f: &Sequence,
    r: usize,
    mut alphas: impl Iterator<Item = &'a [i64]>,
) -> Result<()> {
    if r != f.arity() {
        return Err(Error::ArityMismatch(r, f.arity()));
    }
    if f.domain() == Domain::Naturals {
        if let Some(a) = alphas.find(|a| a.iter().any(|&x| x < 0)) {
            return Err(Error::Invalid(format!(
                "negative shift {a:?} leaves the naturals domain"
            )));
        }
    }
    Ok(())
}

/// `(c M^beta L^alpha f)_n = c q^(beta.n) f_(n+alpha)`, extended linearly.
pub fn apply(p: &Operator, f: &Sequence) -> Result<Sequence> {
    check_shifts(f, p.arity(), p.terms().map(|(m, _)| m.alpha.as_slice()))?;
    let split = common_split(p.field(), f.field())?;
    let field = p
        .field()
        .with_split(split)
        .join(&f.field().with_split(split));
    let terms: Vec<_> = p
        .terms()
        .map(|(m, c)| Ok((m.clone(), to_split(c, split)?)))
        .collect::<Result<_>>()?;
    let g = f.clone();
    Ok(Sequence::new(
        format!("apply({p},{})", f.id()),
        f.arity(),
        f.domain(),
        field,
        move |n| {
            let mut acc = RatFunc::zero().with_field(field);
            for (m, c) in &terms {
                let idx: Vec<i64> = n.iter().zip(&m.alpha).map(|(a, b)| a + b).collect();
                let v = g.eval(&idx)?;
                if v.is_zero() {
                    continue;
                }
                let e: i64 = m.beta.iter().zip(n).map(|(b, x)| b * x).sum();
                let mut t = c * &to_split(&v, split)?;
                if e != 0 {
                    t = &t * &RatFunc::q_pow(field, e);
                }
                acc = &acc + &t;
            }
            Ok(acc)
        },
    ))
}

/// `(p(m) l^alpha g)_n = p(n) g_(n+alpha)`.
pub fn apply_classical(p: &ClassicalOperator, g: &Sequence) -> Result<Sequence> {
    check_shifts(g, p.arity(), p.terms().map(|(a, _)| a))?;
    let terms: Vec<_> = p.terms().map(|(a, c)| (a.to_vec(), c.clone())).collect();
    let field = g
        .field()
        .join(&BaseField::cyclotomic(p.order()).with_split(g.field().split));
    let h = g.clone();
    Ok(Sequence::new(
        format!("apply({p},{})", g.id()),
        g.arity(),
        g.domain(),
        field,
        move |n| {
            let mut acc = RatFunc::zero().with_field(field);
            for (a, poly) in &terms {
                let w: Scalar = poly.eval(n);
                if w.is_zero() {
                    continue;
                }
                let idx: Vec<i64> = n.iter().zip(a).map(|(x, y)| x + y).collect();
                acc = &acc + &h.eval(&idx)?.scale(&w);
            }
            Ok(acc)
        },
    ))
}

/// Mixed action: `c(q) p(n) q^(beta.n) f_(n+alpha)` per term.
pub fn apply_mixed(p: &MixedOperator, f: &Sequence) -> Result<Sequence> {
    check_shifts(f, p.arity(), p.terms().map(|(m, _)| m.alpha.as_slice()))?;
    let split = common_split(p.field(), f.field())?;
    let field = p
        .field()
        .with_split(split)
        .join(&f.field().with_split(split));
    let terms: Vec<_> = p.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
    let g = f.clone();
    Ok(Sequence::new(
        format!("apply({p},{})", f.id()),
        f.arity(),
        f.domain(),
        field,
        move |n| {
            let mut acc = RatFunc::zero().with_field(field);
            for (m, poly) in &terms {
                let w = to_split(&poly.eval(n), split)?;
                if w.is_zero() {
                    continue;
                }
                let idx: Vec<i64> = n.iter().zip(&m.alpha).map(|(a, b)| a + b).collect();
                let e: i64 = m.beta.iter().zip(n).map(|(b, x)| b * x).sum();
                let mut t = &w * &to_split(&g.eval(&idx)?, split)?;
                if e != 0 {
                    t = &t * &RatFunc::q_pow(field, e);
                }
                acc = &acc + &t;
            }
            Ok(acc)
        },
    ))
}

/// Termwise `d/dq`.
pub fn seq_dq(f: &Sequence) -> Result<Sequence> {
    if f.field().split != 1 {
        return Err(Error::FractionalBase(f.field().split));
    }
    let g = f.clone();
    Ok(Sequence::new(
        format!("dq({})", f.id()),
        f.arity(),
        f.domain(),
        f.field(),
        move |n| g.eval(n)?.d_dq(),
    ))
}

/// `f(c q)` for a root of unity `c`, with values declared over `field`.
pub fn seq_subst_scaled(f: &Sequence, c: &Scalar, id: String) -> Result<Sequence> {
    scaled(f, c, id, BaseField::cyclotomic(c.order()))
}

fn scaled(f: &Sequence, c: &Scalar, id: String, ext: BaseField) -> Result<Sequence> {
    if f.field().split != 1 {
        return Err(Error::FractionalBase(f.field().split));
    }
    let field = f.field().join(&ext);
    let g = f.clone();
    let c = c.clone();
    Ok(Sequence::new(id, f.arity(), f.domain(), field, move |n| {
        Ok(g.eval(n)?.subst_scaled(&c))
    }))
}

/// `f(zeta_p q)`.
pub fn seq_subst_root(f: &Sequence, p: u32) -> Result<Sequence> {
    if p == 1 {
        return Ok(f.clone());
    }
    scaled(
        f,
        &Scalar::zeta(p),
        format!("root({},{p})", f.id()),
        BaseField::cyclotomic(p),
    )
}

/// `f(q^(a/k))`: every `q` becomes `u^a` over the field with `q = u^k`.
pub fn seq_subst_alpha(f: &Sequence, a: i64, k: u32) -> Result<Sequence> {
    crate::coeff::check_alpha(a, k)?;
    if f.field().split != 1 {
        return Err(Error::FractionalBase(f.field().split));
    }
    if a == 1 && k == 1 {
        return Ok(f.clone());
    }
    let g = f.clone();
    Ok(Sequence::new(
        format!("alpha({},{a}/{k})", f.id()),
        f.arity(),
        f.domain(),
        f.field().with_split(k),
        move |n| g.eval(n)?.subst_var_power(a, k),
    ))
}

/// Pointwise value at `q = zeta_p` (`p = 1` means `q = 1`), as constants.
pub fn seq_eval_at_root(f: &Sequence, p: u32) -> Result<Sequence> {
    if f.field().split != 1 {
        return Err(Error::FractionalBase(f.field().split));
    }
    let g = f.clone();
    let z = Scalar::zeta(p);
    let field = BaseField::cyclotomic(f.field().order()).join(&BaseField::cyclotomic(p));
    Ok(Sequence::new(
        format!("eval({},{p})", f.id()),
        f.arity(),
        f.domain(),
        field,
        move |n| {
            let v = g.eval(n)?;
            match v.eval_at(&z) {
                Ok(c) => Ok(RatFunc::constant(field, c)),
                Err(Error::Pole { .. }) => Err(Error::PoleAt { index: n.to_vec() }),
                Err(e) => Err(e),
            }
        },
    ))
}

/// Termwise product.
pub fn seq_product(f: &Sequence, g: &Sequence) -> Result<Sequence> {
    binary(f, g, "prod", |a, b| a * b)
}

/// Termwise sum.
pub fn seq_sum(f: &Sequence, g: &Sequence) -> Result<Sequence> {
    binary(f, g, "sum", |a, b| a + b)
}

fn binary(
    f: &Sequence,
    g: &Sequence,
    name: &str,
    op: impl Fn(&RatFunc, &RatFunc) -> RatFunc + Send + Sync + 'static,
) -> Result<Sequence> {
    if f.arity() != g.arity() {
        return Err(Error::ArityMismatch(f.arity(), g.arity()));
    }
    let split = common_split(f.field(), g.field())?;
    let field = f
        .field()
        .with_split(split)
        .join(&g.field().with_split(split));
    let domain = if f.domain() == Domain::Naturals || g.domain() == Domain::Naturals {
        Domain::Naturals
    } else {
        Domain::Integers
    };
    let (a, b) = (f.clone(), g.clone());
    Ok(Sequence::new(
        format!("{name}({},{})", f.id(), g.id()),
        f.arity(),
        domain,
        field,
        move |n| {
            let x = to_split(&a.eval(n)?, split)?;
            let y = to_split(&b.eval(n)?, split)?;
            Ok(op(&x, &y))
        },
    ))
}

/// `g_n = f_(n, n, ..., n)`.
pub fn seq_diagonal(f: &Sequence) -> Sequence {
    let g = f.clone();
    let r = f.arity();
    Sequence::new(
        format!("diag({})", f.id()),
        1,
        f.domain(),
        f.field(),
        move |n| g.eval(&vec![n[0]; r]),
    )
}
