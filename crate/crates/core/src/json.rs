//! JSON forms of operators.
//!
//! Quantum operators:
//! `{"r":1,"variant":"Wr+","field":{"order":1,"split":1},"terms":[{"coeff":{"num":"-q","den":"1"},"alpha":[0],"beta":[2]}, ...]}`
//! with terms in descending monomial order. Classical operators:
//! `{"r":2,"order":1,"terms":[{"poly":"m1+1","alpha":[1,0]}, ...]}`.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use crate::coeff::{BaseField, RatFunc};
use crate::error::{Error, Result};
use crate::text::{parse_classical, parse_ratfunc};
use crate::weyl::{fmt_mpoly_scalar, ClassicalOperator, MPoly, Monomial, Operator, Variant};

fn bad(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn field_json(f: BaseField) -> Value {
    json!({"order": f.order(), "split": f.split})
}

fn field_from_json(v: Option<&Value>) -> Result<BaseField> {
    let Some(v) = v else {
        return Ok(BaseField::rationals());
    };
    let get = |k: &str| -> Result<u32> {
        match v.get(k) {
            None => Ok(1),
            Some(x) => x
                .as_u64()
                .filter(|&n| n >= 1)
                .map(|n| n as u32)
                .ok_or_else(|| bad(format!("bad field {k}"))),
        }
    };
    Ok(BaseField::cyclotomic(get("order")?).with_split(get("split")?))
}

fn int_vec(v: Option<&Value>, r: usize, what: &str) -> Result<Vec<i64>> {
    let arr = v
        .and_then(Value::as_array)
        .ok_or_else(|| bad(format!("missing {what}")))?;
    let out: Vec<i64> = arr
        .iter()
        .map(|x| x.as_i64().ok_or_else(|| bad(format!("bad {what} entry"))))
        .collect::<Result<_>>()?;
    if out.len() != r {
        return Err(Error::ArityMismatch(r, out.len()));
    }
    Ok(out)
}

pub fn operator_to_json(p: &Operator) -> Value {
    let field = p.field();
    let terms: Vec<Value> = p
        .terms()
        .rev()
        .map(|(m, c)| {
            let c = c.with_field(field.with_split(c.field().split));
            let num = RatFunc::from_poly(c.field(), c.num().clone());
            let den = RatFunc::from_poly(c.field(), c.den().clone());
            json!({
                "coeff": {"num": num.to_string(), "den": den.to_string()},
                "alpha": m.alpha,
                "beta": m.beta,
            })
        })
        .collect();
    json!({
        "r": p.arity(),
        "variant": p.variant(),
        "field": field_json(field),
        "terms": terms,
    })
}

pub fn operator_from_json(v: &Value) -> Result<Operator> {
    let r = v
        .get("r")
        .and_then(Value::as_u64)
        .ok_or_else(|| bad("missing r"))? as usize;
    let variant: Variant = serde_json::from_value(v.get("variant").cloned().unwrap_or(json!("Wr")))
        .map_err(|e| bad(e.to_string()))?;
    let field = field_from_json(v.get("field"))?;
    let mut terms = vec![];
    for t in v
        .get("terms")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing terms"))?
    {
        let coeff = t.get("coeff").ok_or_else(|| bad("missing coeff"))?;
        let text = |k: &str| -> Result<RatFunc> {
            let s = coeff
                .get(k)
                .and_then(Value::as_str)
                .ok_or_else(|| bad(format!("missing coeff.{k}")))?;
            parse_ratfunc(s, field)
        };
        let den = text("den")?;
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let c = &text("num")? / &den;
        let m = Monomial::new(
            int_vec(t.get("alpha"), r, "alpha")?,
            int_vec(t.get("beta"), r, "beta")?,
        );
        terms.push((m, c));
    }
    let mut op = Operator::from_terms(r, variant, terms)?;
    op.set_field(field);
    Ok(op)
}

pub fn classical_to_json(p: &ClassicalOperator) -> Value {
    let order = p.order();
    let terms: Vec<Value> = p
        .terms()
        .rev()
        .map(|(a, poly)| json!({"poly": fmt_mpoly_scalar(poly, order), "alpha": a}))
        .collect();
    json!({"r": p.arity(), "order": order, "terms": terms})
}

pub fn classical_from_json(v: &Value) -> Result<ClassicalOperator> {
    let r = v
        .get("r")
        .and_then(Value::as_u64)
        .ok_or_else(|| bad("missing r"))? as usize;
    let order = v.get("order").and_then(Value::as_u64).unwrap_or(1) as u32;
    let mut op = ClassicalOperator::zero(r);
    for t in v
        .get("terms")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing terms"))?
    {
        let s = t
            .get("poly")
            .and_then(Value::as_str)
            .ok_or_else(|| bad("missing poly"))?;
        let parsed = parse_classical(s, r, order)?;
        let mut it = parsed.terms();
        let p = match (it.next(), it.next()) {
            (None, _) => MPoly::zero(r),
            (Some((a, p)), None) if a.iter().all(|&x| x == 0) => p.clone(),
            _ => return Err(bad(format!("`{s}` contains shifts"))),
        };
        op.add_term(int_vec(t.get("alpha"), r, "alpha")?, p);
    }
    Ok(op)
}

impl Serialize for Operator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        operator_to_json(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Operator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        operator_from_json(&Value::deserialize(d)?).map_err(D::Error::custom)
    }
}

impl Serialize for ClassicalOperator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        classical_to_json(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ClassicalOperator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        classical_from_json(&Value::deserialize(d)?).map_err(D::Error::custom)
    }
}
