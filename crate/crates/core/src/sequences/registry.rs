use super::builtins::*;
use super::sequence::*;
use crate::error::{Error, Result};

/// Registry entry: name, arguments, description.
pub const REGISTRY: &[(&str, &str, &str)] = &[
    ("qpow2", "", "q^(n^2), r = 1"),
    ("qnk", "", "q^(n k), r = 2"),
    ("poch", "", "(q;q)_n, r = 1, zero for n < 0"),
    (
        "qbinom",
        "",
        "Gaussian binomial [n choose k]_q, r = 2, zero outside 0 <= k <= n",
    ),
    ("qint", "", "[n]_q = (1 - q^n)/(1 - q), r = 1"),
    ("delta", "(r)", "1 at the origin of N^r, 0 elsewhere"),
    (
        "binom",
        "",
        "binomial coefficient C(n, k), r = 2 (classical)",
    ),
    ("n", "", "g_n = n (classical)"),
    ("fact", "", "n! on N (classical)"),
    ("one", "(r)", "constant 1 in arity r"),
    ("prod", "(f,g)", "termwise product"),
    ("sum", "(f,g)", "termwise sum"),
    ("diag", "(f)", "diagonal restriction f(n, ..., n)"),
    ("root", "(f,p)", "f(zeta_p q)"),
    ("alpha", "(f,a/k)", "f(q^(a/k)) over u with q = u^k"),
    ("dq", "(f)", "termwise d/dq"),
    ("eval", "(f,p)", "f at q = zeta_p (p = 1: q = 1)"),
];

#[derive(Debug)]
enum Arg {
    Seq(Sequence),
    Num(i64, i64),
}

struct P<'a> {
    s: &'a [u8],
    pos: usize,
}

impl P<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.s.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn word(&mut self) -> String {
        self.skip_ws();
        let st = self.pos;
        while self.pos < self.s.len()
            && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_')
        {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.s[st..self.pos]).into_owned()
    }

    fn int(&mut self) -> Result<i64> {
        self.skip_ws();
        let st = self.pos;
        if self.s.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[st..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::Parse("expected an integer".into()))
    }

    fn arg(&mut self) -> Result<Arg> {
        self.skip_ws();
        match self.s.get(self.pos) {
            Some(c) if c.is_ascii_digit() || *c == b'-' => {
                let a = self.int()?;
                let b = if self.eat(b'/') { self.int()? } else { 1 };
                Ok(Arg::Num(a, b))
            }
            _ => Ok(Arg::Seq(self.seq()?)),
        }
    }

    fn seq(&mut self) -> Result<Sequence> {
        let name = self.word();
        if name.is_empty() {
            return Err(Error::Parse("expected a sequence name".into()));
        }
        let mut args = vec![];
        if self.eat(b'(') {
            loop {
                args.push(self.arg()?);
                if self.eat(b')') {
                    break;
                }
                if !self.eat(b',') {
                    return Err(Error::Parse("expected `,` or `)`".into()));
                }
            }
        }
        build(&name, args)
    }
}

fn build(name: &str, args: Vec<Arg>) -> Result<Sequence> {
    let bad = || Error::Parse(format!("bad arguments for `{name}`"));
    let seqs: Vec<&Sequence> = args
        .iter()
        .filter_map(|a| match a {
            Arg::Seq(s) => Some(s),
            _ => None,
        })
        .collect();
    let nums: Vec<(i64, i64)> = args
        .iter()
        .filter_map(|a| match a {
            Arg::Num(x, y) => Some((*x, *y)),
            _ => None,
        })
        .collect();
    let small = |i: usize| -> Result<u32> {
        match nums.get(i) {
            Some(&(x, 1)) if x >= 1 => Ok(x as u32),
            _ => Err(bad()),
        }
    };
    let arity = || -> Result<usize> {
        if nums.is_empty() {
            Ok(1)
        } else {
            small(0).map(|x| x as usize)
        }
    };
    let plain = args.is_empty();
    match (name, seqs.len()) {
        ("qpow2", 0) if plain => Ok(q_power_square()),
        ("qnk", 0) if plain => Ok(q_power_bilinear()),
        ("poch", 0) if plain => Ok(q_pochhammer()),
        ("qbinom", 0) if plain => Ok(q_binomial()),
        ("qint", 0) if plain => Ok(q_integer()),
        ("binom", 0) if plain => Ok(binomial()),
        ("n", 0) if plain => Ok(identity()),
        ("fact", 0) if plain => Ok(factorial()),
        ("delta", 0) => Ok(delta_at_origin(arity()?)),
        ("one", 0) => Ok(constant_one(arity()?)),
        ("prod", 2) => seq_product(seqs[0], seqs[1]),
        ("sum", 2) => seq_sum(seqs[0], seqs[1]),
        ("diag", 1) => Ok(seq_diagonal(seqs[0])),
        ("dq", 1) => seq_dq(seqs[0]),
        ("root", 1) => seq_subst_root(seqs[0], small(0)?),
        ("eval", 1) => seq_eval_at_root(seqs[0], small(0)?),
        ("alpha", 1) => {
            let (a, k) = match nums.as_slice() {
                [(a, k)] if *k >= 1 => (*a, *k),
                [(a, 1), (k, 1)] if *k >= 1 => (*a, *k),
                _ => return Err(bad()),
            };
            seq_subst_alpha(seqs[0], a, k as u32)
        }
        _ if REGISTRY.iter().any(|e| e.0 == name) => Err(bad()),
        _ => Err(Error::UnknownSequence(name.to_string())),
    }
}

/// Build a sequence from its registry expression, e.g. `prod(qpow2,qint)` or
/// `alpha(qpow2,1/2)`.
pub fn builtin(expr: &str) -> Result<Sequence> {
    let mut p = P {
        s: expr.as_bytes(),
        pos: 0,
    };
    let s = p.seq()?;
    p.skip_ws();
    if p.pos != p.s.len() {
        return Err(Error::Parse(format!("trailing input in `{expr}`")));
    }
    Ok(s.renamed(expr.split_whitespace().collect::<String>()))
}
