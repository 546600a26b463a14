//! JSON enlargement scripts.
//!
//! A script is a JSON array of operation objects, applied in order:
//!
//! ```json
//! [
//!   { "op": "E1", "reaction": "2A + 2B -> 3A + 3B" },
//!   { "op": "E2" },
//!   { "op": "E3", "new_species": "Y",
//!     "assignment": [ { "reaction": "A -> B", "source_coeff": 1, "target_coeff": 1 } ] },
//!   { "op": "E5", "pairs": [ { "left": "B", "right": "C + D" } ] },
//!   { "op": "E6", "splits": [ { "reaction": "A -> B", "intermediate": "Z" } ] }
//! ]
//! ```
//!
//! `E4` takes the same fields as `E3`; `E5prime` the same as `E5`. Complexes
//! and reactions are written in the `.crn` arrow syntax.

use serde_json::{json, Map, Value};
use thiserror::Error;

use super::crn::{format_reaction, parse_complex, parse_reaction, CrnError};
use super::json::value_to_biguint;
use crate::enlarge::{EnlargementSpec, OpKind, ReactionAssignment};
use crate::model::{ModelError, SpeciesId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScriptError {
    #[error("malformed script JSON: {0}")]
    Malformed(String),
    #[error("script must be a JSON array of operation objects")]
    NotAnArray,
    #[error("step {index}: expected an object with an \"op\" field")]
    NotAnOperation { index: usize },
    #[error("step {index}: unknown operation {op:?}")]
    UnknownOp { index: usize, op: String },
    #[error("step {index}: {op} is missing field {field:?}")]
    MissingParameter {
        index: usize,
        op: OpKind,
        field: &'static str,
    },
    #[error("step {index}: bad value for {field:?}: {detail}")]
    BadParameter {
        index: usize,
        field: &'static str,
        detail: String,
    },
}

struct Step<'a> {
    index: usize,
    op: OpKind,
    fields: &'a Map<String, Value>,
}

impl<'a> Step<'a> {
    fn get(&self, field: &'static str) -> Result<&'a Value, ScriptError> {
        self.fields.get(field).ok_or(ScriptError::MissingParameter {
            index: self.index,
            op: self.op,
            field,
        })
    }

    fn bad(&self, field: &'static str, detail: impl ToString) -> ScriptError {
        ScriptError::BadParameter {
            index: self.index,
            field,
            detail: detail.to_string(),
        }
    }

    fn string(&self, field: &'static str) -> Result<&'a str, ScriptError> {
        self.get(field)?
            .as_str()
            .ok_or_else(|| self.bad(field, "expected a string"))
    }

    fn array(&self, field: &'static str) -> Result<&'a [Value], ScriptError> {
        self.get(field)?
            .as_array()
            .map(Vec::as_slice)
            .ok_or_else(|| self.bad(field, "expected an array"))
    }

    fn reaction(
        &self,
        value: &Value,
        field: &'static str,
    ) -> Result<crate::model::Reaction, ScriptError> {
        let text = value
            .as_str()
            .ok_or_else(|| self.bad(field, "expected a reaction string"))?;
        parse_reaction(text).map_err(|e: CrnError| self.bad(field, e))
    }

    fn complex(
        &self,
        value: &Value,
        field: &'static str,
    ) -> Result<crate::model::Complex, ScriptError> {
        let text = value
            .as_str()
            .ok_or_else(|| self.bad(field, "expected a complex string"))?;
        parse_complex(text).map_err(|e: CrnError| self.bad(field, e))
    }
}

fn parse_assignment(step: &Step) -> Result<(SpeciesId, Vec<ReactionAssignment>), ScriptError> {
    let name = step.string("new_species")?;
    let new_species = SpeciesId::new(name).map_err(|e: ModelError| step.bad("new_species", e))?;
    let mut assignment = Vec::new();
    for entry in step.array("assignment")? {
        let object = entry.as_object().ok_or_else(|| {
            step.bad(
                "assignment",
                "expected objects with reaction and coefficients",
            )
        })?;
        let reaction = step.reaction(
            object
                .get("reaction")
                .ok_or(ScriptError::MissingParameter {
                    index: step.index,
                    op: step.op,
                    field: "assignment.reaction",
                })?,
            "assignment.reaction",
        )?;
        let source_coeff = object
            .get("source_coeff")
            .map(|v| {
                value_to_biguint(v, "source_coeff")
                    .map_err(|e| step.bad("assignment.source_coeff", e))
            })
            .transpose()?
            .ok_or(ScriptError::MissingParameter {
                index: step.index,
                op: step.op,
                field: "assignment.source_coeff",
            })?;
        let target_coeff = object
            .get("target_coeff")
            .map(|v| {
                value_to_biguint(v, "target_coeff")
                    .map_err(|e| step.bad("assignment.target_coeff", e))
            })
            .transpose()?
            .ok_or(ScriptError::MissingParameter {
                index: step.index,
                op: step.op,
                field: "assignment.target_coeff",
            })?;
        assignment.push(ReactionAssignment {
            reaction,
            source_coeff,
            target_coeff,
        });
    }
    Ok((new_species, assignment))
}

fn parse_pairs(
    step: &Step,
) -> Result<Vec<(crate::model::Complex, crate::model::Complex)>, ScriptError> {
    let mut pairs = Vec::new();
    for entry in step.array("pairs")? {
        let object = entry
            .as_object()
            .ok_or_else(|| step.bad("pairs", "expected objects with left and right"))?;
        let left = step.complex(
            object.get("left").ok_or(ScriptError::MissingParameter {
                index: step.index,
                op: step.op,
                field: "pairs.left",
            })?,
            "pairs.left",
        )?;
        let right = step.complex(
            object.get("right").ok_or(ScriptError::MissingParameter {
                index: step.index,
                op: step.op,
                field: "pairs.right",
            })?,
            "pairs.right",
        )?;
        pairs.push((left, right));
    }
    Ok(pairs)
}

/// Parses a JSON script into a sequence of operation specs.
pub fn parse_script(text: &str) -> Result<Vec<EnlargementSpec>, ScriptError> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| ScriptError::Malformed(e.to_string()))?;
    let steps = value.as_array().ok_or(ScriptError::NotAnArray)?;
    let mut specs = Vec::new();
    for (index, entry) in steps.iter().enumerate() {
        let fields = entry
            .as_object()
            .ok_or(ScriptError::NotAnOperation { index })?;
        let op_name = fields
            .get("op")
            .and_then(Value::as_str)
            .ok_or(ScriptError::NotAnOperation { index })?;
        let op = OpKind::parse(op_name).ok_or_else(|| ScriptError::UnknownOp {
            index,
            op: op_name.to_string(),
        })?;
        let step = Step { index, op, fields };
        let spec = match op {
            OpKind::E1 => EnlargementSpec::E1 {
                reaction: step.reaction(step.get("reaction")?, "reaction")?,
            },
            OpKind::E2 => EnlargementSpec::E2,
            OpKind::E3 => {
                let (new_species, assignment) = parse_assignment(&step)?;
                EnlargementSpec::E3 {
                    new_species,
                    assignment,
                }
            }
            OpKind::E4 => {
                let (new_species, assignment) = parse_assignment(&step)?;
                EnlargementSpec::E4 {
                    new_species,
                    assignment,
                }
            }
            OpKind::E5 => EnlargementSpec::E5 {
                pairs: parse_pairs(&step)?,
            },
            OpKind::E5Prime => EnlargementSpec::E5Prime {
                pairs: parse_pairs(&step)?,
            },
            OpKind::E6 => {
                let mut splits = Vec::new();
                for entry in step.array("splits")? {
                    let object = entry.as_object().ok_or_else(|| {
                        step.bad("splits", "expected objects with reaction and intermediate")
                    })?;
                    let reaction = step.reaction(
                        object
                            .get("reaction")
                            .ok_or(ScriptError::MissingParameter {
                                index,
                                op,
                                field: "splits.reaction",
                            })?,
                        "splits.reaction",
                    )?;
                    let intermediate = step.complex(
                        object
                            .get("intermediate")
                            .ok_or(ScriptError::MissingParameter {
                                index,
                                op,
                                field: "splits.intermediate",
                            })?,
                        "splits.intermediate",
                    )?;
                    splits.push((reaction, intermediate));
                }
                EnlargementSpec::E6 { splits }
            }
        };
        specs.push(spec);
    }
    Ok(specs)
}

/// The JSON form of one spec, in the same schema [`parse_script`] reads.
pub fn spec_to_json(spec: &EnlargementSpec) -> Value {
    match spec {
        EnlargementSpec::E1 { reaction } => json!({
            "op": "E1",
            "reaction": format_reaction(reaction),
        }),
        EnlargementSpec::E2 => json!({ "op": "E2" }),
        EnlargementSpec::E3 {
            new_species,
            assignment,
        }
        | EnlargementSpec::E4 {
            new_species,
            assignment,
        } => {
            let entries: Vec<Value> = assignment
                .iter()
                .map(|a| {
                    json!({
                        "reaction": format_reaction(&a.reaction),
                        "source_coeff": coeff_value(&a.source_coeff),
                        "target_coeff": coeff_value(&a.target_coeff),
                    })
                })
                .collect();
            json!({
                "op": spec.kind().name(),
                "new_species": new_species.as_str(),
                "assignment": entries,
            })
        }
        EnlargementSpec::E5 { pairs } | EnlargementSpec::E5Prime { pairs } => {
            let entries: Vec<Value> = pairs
                .iter()
                .map(|(left, right)| {
                    json!({
                        "left": left.canonical_text(),
                        "right": right.canonical_text(),
                    })
                })
                .collect();
            json!({ "op": spec.kind().name(), "pairs": entries })
        }
        EnlargementSpec::E6 { splits } => {
            let entries: Vec<Value> = splits
                .iter()
                .map(|(reaction, intermediate)| {
                    json!({
                        "reaction": format_reaction(reaction),
                        "intermediate": intermediate.canonical_text(),
                    })
                })
                .collect();
            json!({ "op": "E6", "splits": entries })
        }
    }
}

fn coeff_value(coeff: &num_bigint::BigUint) -> Value {
    use std::str::FromStr;
    Value::Number(serde_json::Number::from_str(&coeff.to_string()).expect("decimal digits"))
}

/// The JSON form of a whole script.
pub fn script_to_json(specs: &[EnlargementSpec]) -> Value {
    Value::Array(specs.iter().map(spec_to_json).collect())
}
