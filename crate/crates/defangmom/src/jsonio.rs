//! JSON forms of the exact number types and reports. All documents carry
//! a top-level `"schema": 1`; maps are emitted with sorted keys so that
//! parse-then-reserialize round-trips are byte-identical.

use defangmom_core::exactnum::{term_records, RadicalNumber};
use defangmom_core::tensoralg::TensorExpr;
use serde_json::{json, Map, Value};

pub const SCHEMA_VERSION: u64 = 1;

/// `Σ qᵢ√rᵢ` as term records `{num, den, radicand}` plus the readable
/// string and float forms. Numerators and denominators are decimal strings
/// so arbitrary-precision values survive.
pub fn radical_to_json(x: &RadicalNumber) -> Value {
    let terms: Vec<Value> = term_records(x)
        .into_iter()
        .map(|(num, den, radicand)| {
            json!({
                "num": num.to_string(),
                "den": den.to_string(),
                "radicand": radicand,
            })
        })
        .collect();
    json!({
        "exact": x.to_string(),
        "float": x.to_f64(),
        "terms": terms,
    })
}

/// `{rank, terms: [{l2_power, core, coeff}]}` with the cores named through
/// the given tensor symbol (e.g. `"[LxA]^1"`).
pub fn tensor_expr_to_json(e: &TensorExpr, t_symbol: &str) -> Value {
    let terms: Vec<Value> = e
        .iter()
        .map(|(k, core, coeff)| {
            json!({
                "l2_power": k,
                "core": core.name(t_symbol),
                "coeff": radical_to_json(coeff),
            })
        })
        .collect();
    json!({
        "rank": e.rank(),
        "pretty": e.pretty(t_symbol),
        "terms": terms,
    })
}

/// Wraps a payload map with the schema version.
pub fn document(kind: &str, mut fields: Map<String, Value>) -> Value {
    fields.insert("schema".into(), json!(SCHEMA_VERSION));
    fields.insert("kind".into(), json!(kind));
    Value::Object(fields)
}

#[cfg(test)]
mod tests {
    use super::*;
    use defangmom_core::exactnum::rat;

    #[test]
    fn radical_terms_round_trip() {
        let x = &RadicalNumber::from_sqrt(rat(4, 3), 15) - &RadicalNumber::from_integer(2);
        let v = radical_to_json(&x);
        assert_eq!(v["exact"], "-2 + 4/3*sqrt(15)");
        let terms = v["terms"].as_array().unwrap();
        assert_eq!(terms.len(), 2);
        assert_eq!(terms[0]["radicand"], 1);
        assert_eq!(terms[1]["num"], "4");
        assert_eq!(terms[1]["den"], "3");
        assert_eq!(terms[1]["radicand"], 15);
    }

    #[test]
    fn documents_reserialize_identically() {
        let mut m = Map::new();
        m.insert("beta".into(), json!(2));
        m.insert("alpha".into(), json!([1, 2, 3]));
        let doc = document("test", m);
        let text = serde_json::to_string_pretty(&doc).unwrap();
        let parsed: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string_pretty(&parsed).unwrap(), text);
        assert_eq!(doc["schema"], 1);
    }
}
