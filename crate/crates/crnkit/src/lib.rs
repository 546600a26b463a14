//! Structural analysis of chemical reaction networks.
//!
//! `crnkit` models a reaction network as a triple of species, complexes, and
//! reactions, computes its structural invariants exactly (stoichiometric
//! rank, deficiency, cyclomatic number, linkage classes), and implements a
//! family of deficiency-monotone enlargement operations together with the
//! closed-form prediction of how each one changes the deficiency. Every
//! prediction is re-checked against a from-scratch recomputation, and a
//! deterministic fuzz harness exercises the whole theory at scale.
//!
//! ```
//! use crnkit::{compute_metrics, parse_crn};
//!
//! let network = parse_crn("2A -> A + 2B -> 2A + 2B").unwrap();
//! let metrics = compute_metrics(&network);
//! assert_eq!(metrics.rank, 2);
//! assert_eq!(metrics.deficiency, 0);
//! assert_eq!(metrics.cyclomatic, 0);
//! ```
//!
//! Module map:
//!
//! * [`model`] - species, complexes, reactions, and the canonical [`Network`]
//! * [`textio`] - the `.crn` arrow notation, JSON interchange, and scripts
//! * [`exactla`] - exact integer matrices, dual rank routes, span membership
//! * [`metrics`] - linkage classes, rank, deficiency, cyclomatic number
//! * [`enlarge`] - the operations E1-E6 and E5' with delta predictions
//! * [`fuzz`] - seeded generation, oracles, and the verification suite
//!
//! The `book/` directory of the repository holds a narrative guide; its code
//! blocks compile and run as doctests of this crate.

mod book;
pub mod enlarge;
pub mod exactla;
pub mod fuzz;
pub mod metrics;
pub mod model;
pub mod textio;

pub use enlarge::{apply, predict_delta, EnlargementResult, EnlargementSpec, OpKind};
pub use exactla::{in_column_span, rank, rank_oracle, stoichiometric_matrix, IntMatrix};
pub use metrics::{compute_metrics, linkage_classes, same_linkage_class, NetworkMetrics};
pub use model::{build_network, validate, Complex, Network, Reaction, SpeciesId};
pub use textio::{parse_crn, parse_script, serialize_crn};
