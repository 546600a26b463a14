//! JSON interchange for networks.
//!
//! Schema:
//!
//! ```json
//! {
//!   "species": ["A", "B"],
//!   "reactions": [
//!     { "source": { "A": 2 }, "target": { "A": 1, "B": 2 } }
//!   ]
//! }
//! ```
//!
//! A complex is an object mapping species to positive integer coefficients;
//! the empty object is the zero complex. Species are listed sorted and
//! reactions follow the canonical order, so serialization is deterministic
//! byte for byte.

use std::str::FromStr;

use num_bigint::BigUint;
use serde_json::{Map, Number, Value};
use thiserror::Error;

use crate::model::{build_network, Complex, ModelError, Network, Reaction, SpeciesId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JsonError {
    #[error("malformed JSON: {0}")]
    Malformed(String),
    #[error("expected {expected} at {context}")]
    Schema {
        context: String,
        expected: &'static str,
    },
    #[error("{0}")]
    Model(#[from] ModelError),
    #[error("declared species list does not match the species used in reactions")]
    SpeciesMismatch,
}

fn coefficient_to_number(coeff: &BigUint) -> Number {
    Number::from_str(&coeff.to_string()).expect("decimal digits parse as a JSON number")
}

fn complex_to_json(complex: &Complex) -> Value {
    let mut map = Map::new();
    for (species, coeff) in complex.terms() {
        map.insert(
            species.as_str().to_string(),
            Value::Number(coefficient_to_number(coeff)),
        );
    }
    Value::Object(map)
}

/// The JSON form of a network.
pub fn network_to_json(network: &Network) -> Value {
    let species: Vec<Value> = network
        .species()
        .iter()
        .map(|s| Value::String(s.as_str().to_string()))
        .collect();
    let reactions: Vec<Value> = network
        .reactions()
        .map(|r| {
            let mut obj = Map::new();
            obj.insert("source".to_string(), complex_to_json(r.source()));
            obj.insert("target".to_string(), complex_to_json(r.target()));
            Value::Object(obj)
        })
        .collect();
    let mut root = Map::new();
    root.insert("species".to_string(), Value::Array(species));
    root.insert("reactions".to_string(), Value::Array(reactions));
    Value::Object(root)
}

fn schema_error(context: impl Into<String>, expected: &'static str) -> JsonError {
    JsonError::Schema {
        context: context.into(),
        expected,
    }
}

/// Reads a coefficient: a nonnegative JSON integer of any size.
pub(crate) fn value_to_biguint(value: &Value, context: &str) -> Result<BigUint, JsonError> {
    let number = value
        .as_number()
        .ok_or_else(|| schema_error(context, "a nonnegative integer"))?;
    BigUint::from_str(&number.to_string())
        .map_err(|_| schema_error(context, "a nonnegative integer"))
}

pub(crate) fn value_to_complex(value: &Value, context: &str) -> Result<Complex, JsonError> {
    let object = value
        .as_object()
        .ok_or_else(|| schema_error(context, "a complex object"))?;
    let mut terms = Vec::new();
    for (name, coeff) in object {
        let species = SpeciesId::new(name.clone())?;
        terms.push((species, value_to_biguint(coeff, context)?));
    }
    Ok(Complex::from_terms(terms))
}

/// Parses the JSON network form back into a [`Network`]. The declared
/// species list must match the species inferred from the reactions.
pub fn json_to_network(value: &Value) -> Result<Network, JsonError> {
    let root = value
        .as_object()
        .ok_or_else(|| schema_error("document", "a network object"))?;
    let reactions_value = root
        .get("reactions")
        .ok_or_else(|| schema_error("document", "a 'reactions' array"))?
        .as_array()
        .ok_or_else(|| schema_error("reactions", "an array"))?;

    let mut reactions = Vec::new();
    for (i, entry) in reactions_value.iter().enumerate() {
        let context = format!("reactions[{i}]");
        let object = entry
            .as_object()
            .ok_or_else(|| schema_error(&context, "an object with source and target"))?;
        let source = value_to_complex(
            object
                .get("source")
                .ok_or_else(|| schema_error(&context, "a 'source' complex"))?,
            &context,
        )?;
        let target = value_to_complex(
            object
                .get("target")
                .ok_or_else(|| schema_error(&context, "a 'target' complex"))?,
            &context,
        )?;
        reactions.push(Reaction::new(source, target)?);
    }
    let network = build_network(reactions)?;

    if let Some(declared) = root.get("species") {
        let declared = declared
            .as_array()
            .ok_or_else(|| schema_error("species", "an array of names"))?;
        let mut names: Vec<&str> = Vec::new();
        for value in declared {
            names.push(
                value
                    .as_str()
                    .ok_or_else(|| schema_error("species", "an array of names"))?,
            );
        }
        let actual: Vec<&str> = network.species().iter().map(|s| s.as_str()).collect();
        if names != actual {
            return Err(JsonError::SpeciesMismatch);
        }
    }
    Ok(network)
}

/// Parses JSON text into a network.
pub fn parse_network_json(text: &str) -> Result<Network, JsonError> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| JsonError::Malformed(e.to_string()))?;
    json_to_network(&value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textio::crn::parse_crn;

    #[test]
    fn export_schema_and_round_trip() {
        let network = parse_crn("2A -> A + 2B -> 2A + 2B").unwrap();
        let json = network_to_json(&network);
        assert_eq!(
            serde_json::to_string(&json).unwrap(),
            r#"{"species":["A","B"],"reactions":[{"source":{"A":2},"target":{"A":1,"B":2}},{"source":{"A":1,"B":2},"target":{"A":2,"B":2}}]}"#
        );
        assert_eq!(json_to_network(&json).unwrap(), network);
    }

    #[test]
    fn zero_complex_is_empty_object() {
        let network = parse_crn("0 <-> A").unwrap();
        let json = network_to_json(&network);
        let text = serde_json::to_string(&json).unwrap();
        assert!(text.contains(r#""source":{}"#));
        assert_eq!(json_to_network(&json).unwrap(), network);
    }

    #[test]
    fn species_mismatch_is_rejected() {
        let text = r#"{"species":["A","B","Z"],"reactions":[{"source":{"A":1},"target":{"B":1}}]}"#;
        assert_eq!(parse_network_json(text), Err(JsonError::SpeciesMismatch));
    }

    #[test]
    fn coefficients_beyond_u64_survive_json() {
        // 30 digits, far past u64; must not degrade to floating point.
        let big = "123456789012345678901234567890";
        let network = parse_crn(&format!("{big}A -> B")).unwrap();
        let json = network_to_json(&network);
        let text = serde_json::to_string(&json).unwrap();
        assert!(text.contains(big));
        assert_eq!(json_to_network(&json).unwrap(), network);
    }

    #[test]
    fn self_loop_in_json_is_rejected() {
        let text = r#"{"reactions":[{"source":{"A":1},"target":{"A":1}}]}"#;
        assert!(matches!(
            parse_network_json(text),
            Err(JsonError::Model(ModelError::SelfLoop(_)))
        ));
    }
}
