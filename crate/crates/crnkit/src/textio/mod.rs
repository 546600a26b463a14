//! Text and JSON interchange for networks and enlargement scripts.
//!
//! The `.crn` format is a line-oriented arrow notation: one statement per
//! line, `#` comments, complexes written `2A + B` (or `0` for the empty
//! complex), and `->` / `<->` arrows that may be chained. Serialization is
//! canonical, so `parse_crn(serialize_crn(n)) == n` for every network.
//!
//! Enlargement scripts and the network export format are JSON; their schemas
//! are documented on [`parse_script`] and [`network_to_json`].

mod crn;
mod json;
mod script;

pub use crn::{
    format_reaction, parse_complex, parse_crn, parse_crn_with_warnings, parse_reaction,
    serialize_crn, CrnError,
};
pub use json::{json_to_network, network_to_json, parse_network_json, JsonError};
pub use script::{parse_script, script_to_json, spec_to_json, ScriptError};
