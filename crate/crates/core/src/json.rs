//! Canonical JSON encodings (sorted keys, no whitespace, integers of
//! arbitrary size).

use std::str::FromStr;

use num_bigint::BigInt;
use serde_json::{json, Map, Number, Value};

use crate::disc_form::{Element, FiniteQuadForm};
use crate::error::{Error, Result};
use crate::k3::K3LatticePair;
use crate::lattice::{EmbeddedLattice, Lattice};
use crate::linalg::IntMatrix;
use crate::neighbors::IsotropicLine;
use crate::padic::{GeneralizedLine, LinePart};

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

pub fn int(x: &BigInt) -> Value {
    Value::Number(Number::from_str(&x.to_string()).expect("integer literal"))
}

pub fn int_vec(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(int).collect())
}

pub fn matrix(m: &IntMatrix) -> Value {
    Value::Array((0..m.nrows()).map(|i| int_vec(m.row(i))).collect())
}

pub fn parse_int(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => {
            let s = n.to_string();
            BigInt::from_str(&s).map_err(|_| perr(format!("not an integer: {s}")))
        }
        Value::String(s) => BigInt::from_str(s).map_err(|_| perr(format!("not an integer: {s}"))),
        _ => Err(perr("expected an integer")),
    }
}

pub fn parse_u64(v: &Value) -> Result<u64> {
    v.as_u64().ok_or_else(|| perr("expected a non-negative 64-bit integer"))
}

fn parse_array(v: &Value) -> Result<&Vec<Value>> {
    v.as_array().ok_or_else(|| perr("expected an array"))
}

pub fn parse_int_vec(v: &Value) -> Result<Vec<BigInt>> {
    parse_array(v)?.iter().map(parse_int).collect()
}

pub fn parse_u64_vec(v: &Value) -> Result<Vec<u64>> {
    parse_array(v)?.iter().map(parse_u64).collect()
}

pub fn parse_matrix(v: &Value, ncols: Option<usize>) -> Result<IntMatrix> {
    let rows: Vec<Vec<BigInt>> = parse_array(v)?.iter().map(parse_int_vec).collect::<Result<_>>()?;
    let n = ncols.or_else(|| rows.first().map(|r| r.len())).unwrap_or(0);
    IntMatrix::from_rows(rows, n)
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| perr(format!("missing field \"{key}\"")))
}

pub fn lattice(l: &Lattice) -> Value {
    json!({ "gram": matrix(l.gram()) })
}

pub fn parse_lattice(v: &Value) -> Result<Lattice> {
    Lattice::new(parse_matrix(field(v, "gram")?, None)?)
}

pub fn embedded(m: &EmbeddedLattice) -> Value {
    json!({
        "gram": matrix(m.ambient().gram()),
        "basis_num": matrix(m.basis_num()),
        "basis_den": int(m.basis_den()),
    })
}

pub fn parse_embedded(v: &Value) -> Result<EmbeddedLattice> {
    let ambient = parse_lattice(v)?;
    let n = ambient.rank();
    match (v.get("basis_num"), v.get("basis_den")) {
        (None, None) => Ok(EmbeddedLattice::whole(&ambient)),
        (Some(b), den) => {
            let den = den.map(parse_int).transpose()?.unwrap_or_else(|| BigInt::from(1));
            EmbeddedLattice::new(ambient, &parse_matrix(b, Some(n))?, den)
        }
        (None, Some(_)) => Err(perr("basis_den given without basis_num")),
    }
}

pub fn form(f: &FiniteQuadForm) -> Value {
    let q: Vec<Value> = f.q_num().iter().map(|r| Value::Array(r.iter().map(|&x| Value::from(x)).collect())).collect();
    json!({ "divisors": f.divisors(), "q_num": q, "q_den": f.den() })
}

pub fn parse_form(v: &Value) -> Result<FiniteQuadForm> {
    let divisors = parse_u64_vec(field(v, "divisors")?)?;
    let q = parse_matrix(field(v, "q_num")?, Some(divisors.len()))?;
    let den = parse_u64(field(v, "q_den")?)?;
    FiniteQuadForm::from_big(divisors, &q.to_rows(), den)
}

pub fn element(x: &Element) -> Value {
    Value::Array(x.iter().map(|&c| Value::from(c)).collect())
}

pub fn line(l: &IsotropicLine) -> Value {
    json!({ "d": l.d(), "gen": l.gen() })
}

pub fn parse_line(parent: &Lattice, v: &Value) -> Result<IsotropicLine> {
    let d = parse_u64(field(v, "d")?)?;
    IsotropicLine::new(parent, d, &parse_int_vec(field(v, "gen")?)?)
}

pub fn generalized_line(l: &GeneralizedLine) -> Value {
    let parts: Vec<Value> = l.parts().iter().map(|p| json!({ "p": p.p, "n": p.n, "gen": p.gen })).collect();
    json!({ "d": l.d(), "gen": l.gen(), "parts": parts })
}

pub fn parse_generalized_line(parent: &Lattice, v: &Value) -> Result<GeneralizedLine> {
    let parts = parse_array(field(v, "parts")?)?
        .iter()
        .map(|p| {
            let n = parse_u64(field(p, "n")?)?;
            Ok(LinePart {
                p: parse_u64(field(p, "p")?)?,
                n: u32::try_from(n).map_err(|_| perr("exponent too large"))?,
                gen: parse_u64_vec(field(p, "gen")?)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let line = GeneralizedLine::new(parent, parts)?;
    if let Some(d) = v.get("d") {
        if parse_u64(d)? != line.d() {
            return Err(perr("d does not match the product of the parts"));
        }
    }
    Ok(line)
}

pub fn pair(p: &K3LatticePair) -> Value {
    json!({
        "ns": lattice(p.ns()),
        "t": lattice(p.t()),
        "glue": Value::Array(p.glue().iter().map(element).collect()),
    })
}

pub fn parse_pair(v: &Value) -> Result<K3LatticePair> {
    let ns = parse_lattice(field(v, "ns")?)?;
    let t = parse_lattice(field(v, "t")?)?;
    let glue = parse_array(field(v, "glue")?)?.iter().map(parse_u64_vec).collect::<Result<Vec<_>>>()?;
    K3LatticePair::new(ns, t, glue)
}

/// Error object `{"error": code, "detail": message}`.
pub fn error(e: &Error) -> Value {
    let mut m = Map::new();
    m.insert("error".into(), Value::from(e.code()));
    m.insert("detail".into(), Value::from(e.to_string()));
    Value::Object(m)
}

/// Canonical serialization: keys sorted, no insignificant whitespace.
pub fn to_canonical(v: &Value) -> String {
    serde_json::to_string(v).expect("serializing a JSON value")
}

pub fn from_str(s: &str) -> Result<Value> {
    serde_json::from_str(s).map_err(|e| perr(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn lattice_round_trip() {
        let l = corpus::e8();
        let s = to_canonical(&lattice(&l));
        assert!(s.starts_with("{\"gram\":[[2,"));
        assert_eq!(parse_lattice(&from_str(&s).unwrap()).unwrap(), l);
    }

    #[test]
    fn big_integers_survive() {
        let big = BigInt::from_str("123456789012345678901234567890").unwrap();
        let s = to_canonical(&int(&big));
        assert_eq!(s, "123456789012345678901234567890");
        assert_eq!(parse_int(&from_str(&s).unwrap()).unwrap(), big);
    }

    #[test]
    fn keys_are_sorted() {
        let u = corpus::hyperbolic();
        let m = EmbeddedLattice::new(u.clone(), &IntMatrix::from_i64(&[vec![2, 0], vec![0, 1]]), BigInt::from(1)).unwrap();
        let s = to_canonical(&embedded(&m));
        assert!(s.find("basis_den").unwrap() < s.find("basis_num").unwrap());
        assert!(s.find("basis_num").unwrap() < s.find("gram").unwrap());
        assert_eq!(parse_embedded(&from_str(&s).unwrap()).unwrap(), m);
    }

    #[test]
    fn form_and_line_round_trip() {
        let f = crate::disc_form::discriminant_form(&corpus::a(2)).unwrap();
        assert_eq!(parse_form(&form(&f)).unwrap(), f);
        let u = corpus::hyperbolic();
        let l = crate::neighbors::enumerate_isotropic_lines(&u, 3, 100).unwrap().remove(0);
        assert_eq!(parse_line(&u, &line(&l)).unwrap(), l);
        assert!(matches!(parse_lattice(&from_str("{\"gram\":[[1]]}").unwrap()), Ok(_)));
        assert!(matches!(parse_lattice(&from_str("{}").unwrap()), Err(Error::Parse(_))));
    }
}
