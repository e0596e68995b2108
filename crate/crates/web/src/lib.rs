//! WebAssembly bindings for the browser demo.
//!
//! Every export takes and returns JSON text in the same encoding as the
//! command-line tool; failures come back as `{"error": .., "detail": ..}`.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use neighborlat::{disc_form, json as j, kummer, neighbors, Result};

const MAX_CLASSES: u64 = 200_000;

fn respond(r: Result<Value>) -> String {
    j::to_canonical(&r.unwrap_or_else(|e| j::error(&e)))
}

/// Rank, signature, discriminant and discriminant form of a lattice.
#[wasm_bindgen]
pub fn describe(lattice: &str) -> String {
    respond((|| {
        let l = j::parse_lattice(&j::from_str(lattice)?)?;
        let (p, q) = l.signature();
        let form = if l.is_even() { j::form(&disc_form::discriminant_form(&l)?) } else { Value::Null };
        Ok(json!({
            "rank": l.rank(),
            "disc": j::int(&l.discriminant()),
            "signature": [p, q],
            "even": l.is_even(),
            "form": form,
        }))
    })())
}

/// The d-isotropic lines of a lattice, each with its neighbor's Gram matrix.
#[wasm_bindgen]
pub fn neighbors_of(lattice: &str, d: u32) -> String {
    respond((|| {
        let l = j::parse_lattice(&j::from_str(lattice)?)?;
        let lines = neighbors::enumerate_isotropic_lines(&l, u64::from(d), MAX_CLASSES)?;
        let rows = lines
            .iter()
            .map(|line| {
                let n = neighbors::neighbor_from_line(line)?;
                let same = neighbors::same_genus_invariants(&l, &n.to_lattice()?, disc_form::DEFAULT_ISO_BOUND)?;
                Ok(json!({ "line": j::line(line), "neighbor": j::embedded(&n), "same_genus": same }))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Value::Array(rows))
    })())
}

/// The line dictionary for T(A) = U(-1) ⊕ U at an odd modulus.
#[wasm_bindgen]
pub fn kummer_dictionary(d: u32) -> String {
    respond((|| {
        let d = u64::from(d);
        let rows = kummer::line_subgroup_dictionary(d)?
            .iter()
            .map(|e| {
                let kn = kummer::kummer_neighbor(e.pair, d)?;
                Ok(json!({
                    "c1": e.pair.c1,
                    "c2": e.pair.c2,
                    "line": j::line(&e.line),
                    "natural_gram": j::matrix(&kn.natural_gram()?),
                }))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Value::Array(rows))
    })())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn describe_a2() {
        let v: Value = serde_json::from_str(&describe(r#"{"gram":[[2,-1],[-1,2]]}"#)).unwrap();
        assert_eq!(v["disc"], 3);
        assert_eq!(v["form"]["divisors"], json!([3]));
    }

    #[test]
    fn neighbors_of_u() {
        let v: Value = serde_json::from_str(&neighbors_of(r#"{"gram":[[0,1],[1,0]]}"#, 6)).unwrap();
        let rows = v.as_array().unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r["same_genus"] == true));
    }

    #[test]
    fn kummer_rows() {
        let v: Value = serde_json::from_str(&kummer_dictionary(5)).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 36);
        let e: Value = serde_json::from_str(&kummer_dictionary(4)).unwrap();
        assert!(e["error"].is_string());
    }
}
