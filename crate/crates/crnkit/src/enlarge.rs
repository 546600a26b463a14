//! The deficiency-monotone enlargement operations.
//!
//! Seven ways of growing a network, each with validated preconditions and a
//! prediction of how the deficiency changes:
//!
//! | Operation | Effect | Deficiency change |
//! |-----------|--------|-------------------|
//! | E1 | add a reaction over existing species, rank unchanged | 0 or 1 |
//! | E2 | add inflow-outflow reactions `0 <-> X` for every species | `rank - s + m + lt - 1` |
//! | E3 | add a species into some reactions, rank unchanged | `cyc(n) - cyc(n')` |
//! | E4 | add a species into some reactions plus `0 <-> Y` | `cyc(n) - cyc(n') + 1` |
//! | E5 | add reversible pairs with new species, row rank condition | 0 |
//! | E5' | add reversible pairs, column rank condition | `>= 0`, no closed form |
//! | E6 | split reactions through new intermediate complexes | 0 |
//!
//! (`m` counts at-most-unimolecular complexes missing from the network, `lt`
//! the linkage classes containing one.)
//!
//! Every `apply_*` function recomputes the enlarged network's metrics from
//! scratch and cross-checks the observed deficiency change against the
//! predicted one. A mismatch is not a user error: it would falsify the
//! theory this library implements, so it surfaces as
//! [`EnlargeError::TheoremFalsified`].

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use thiserror::Error;

use crate::exactla::{rank, stoichiometric_matrix, IntMatrix};
use crate::metrics::{compute_metrics, same_linkage_class, NetworkMetrics};
use crate::model::{build_network, Complex, ModelError, Network, Reaction, SpeciesId};

/// The kind of an enlargement operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub enum OpKind {
    E1,
    E2,
    E3,
    E4,
    E5,
    #[serde(rename = "E5prime")]
    E5Prime,
    E6,
}

impl OpKind {
    pub const ALL: [OpKind; 7] = [
        OpKind::E1,
        OpKind::E2,
        OpKind::E3,
        OpKind::E4,
        OpKind::E5,
        OpKind::E5Prime,
        OpKind::E6,
    ];

    /// The name used in scripts and on the command line.
    pub fn name(&self) -> &'static str {
        match self {
            OpKind::E1 => "E1",
            OpKind::E2 => "E2",
            OpKind::E3 => "E3",
            OpKind::E4 => "E4",
            OpKind::E5 => "E5",
            OpKind::E5Prime => "E5prime",
            OpKind::E6 => "E6",
        }
    }

    pub fn parse(name: &str) -> Option<OpKind> {
        OpKind::ALL.into_iter().find(|k| k.name() == name)
    }
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One reaction of the E3/E4 assignment: the species is inserted with
/// `source_coeff` copies on the left and `target_coeff` on the right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReactionAssignment {
    pub reaction: Reaction,
    pub source_coeff: BigUint,
    pub target_coeff: BigUint,
}

/// A validated-on-apply description of one enlargement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EnlargementSpec {
    E1 {
        reaction: Reaction,
    },
    E2,
    E3 {
        new_species: SpeciesId,
        assignment: Vec<ReactionAssignment>,
    },
    E4 {
        new_species: SpeciesId,
        assignment: Vec<ReactionAssignment>,
    },
    E5 {
        pairs: Vec<(Complex, Complex)>,
    },
    E5Prime {
        pairs: Vec<(Complex, Complex)>,
    },
    E6 {
        splits: Vec<(Reaction, Complex)>,
    },
}

impl EnlargementSpec {
    pub fn kind(&self) -> OpKind {
        match self {
            EnlargementSpec::E1 { .. } => OpKind::E1,
            EnlargementSpec::E2 => OpKind::E2,
            EnlargementSpec::E3 { .. } => OpKind::E3,
            EnlargementSpec::E4 { .. } => OpKind::E4,
            EnlargementSpec::E5 { .. } => OpKind::E5,
            EnlargementSpec::E5Prime { .. } => OpKind::E5Prime,
            EnlargementSpec::E6 { .. } => OpKind::E6,
        }
    }
}

/// Validation and internal errors from the enlargement operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnlargeError {
    #[error("reaction already present: {0}")]
    DuplicateReaction(String),
    #[error("E1 must not introduce new species (found {0})")]
    NewSpeciesForbidden(String),
    #[error("operation must preserve the rank, but it changed from {before} to {after}")]
    RankChanged { before: usize, after: usize },
    #[error("species {0} already exists in the network")]
    SpeciesExists(String),
    #[error("assignment must name at least one reaction")]
    EmptyAssignment,
    #[error("assignment for {0} has both coefficients zero")]
    BothCoefficientsZero(String),
    #[error("reaction not in the network: {0}")]
    UnknownReaction(String),
    #[error("reaction assigned twice: {0}")]
    DuplicateAssignment(String),
    #[error("at least one reversible pair is required")]
    EmptyPairs,
    #[error("at least one split is required")]
    EmptySplits,
    #[error("pair has equal complexes: {0}")]
    SelfLoopPair(String),
    #[error("reaction split twice: {0}")]
    DuplicateSplit(String),
    #[error("intermediate complex used twice: {0}")]
    DuplicateIntermediate(String),
    #[error("intermediate complex already in the network: {0}")]
    IntermediateNotNew(String),
    #[error("needs at least {required} new species, found {found}")]
    TooFewNewSpecies { found: usize, required: usize },
    #[error("rank condition failed: submatrix rank {actual}, required {required}")]
    RankConditionFailed { actual: usize, required: usize },
    #[error("{0}")]
    Model(#[from] ModelError),
    /// Internal consistency failure: the observed deficiency change
    /// contradicts the closed-form prediction. Never a user error.
    #[error("theorem check failed for {operation}: {detail}")]
    TheoremFalsified { operation: String, detail: String },
}

/// Non-fatal notes attached to a result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EnlargeWarning {
    /// An E4 was applied with an empty assignment: the species is added only
    /// through its inflow-outflow reactions.
    EmptyAssignment,
}

impl fmt::Display for EnlargeWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnlargeWarning::EmptyAssignment => {
                write!(f, "E4 applied with an empty assignment")
            }
        }
    }
}

/// Change of each structural parameter from the original to the enlarged
/// network, recomputed from scratch on both sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct DeltaBreakdown {
    pub complexes: i64,
    pub linkage_classes: i64,
    pub reactions: i64,
    pub rank: i64,
    pub cyclomatic: i64,
}

fn breakdown(before: &NetworkMetrics, after: &NetworkMetrics) -> DeltaBreakdown {
    DeltaBreakdown {
        complexes: after.complexes as i64 - before.complexes as i64,
        linkage_classes: after.linkage_classes as i64 - before.linkage_classes as i64,
        reactions: after.reactions as i64 - before.reactions as i64,
        rank: after.rank as i64 - before.rank as i64,
        cyclomatic: after.cyclomatic - before.cyclomatic,
    }
}

/// Outcome of a successful enlargement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnlargementResult {
    pub enlarged: Network,
    /// The closed-form prediction (for E5', where no closed form exists,
    /// this equals the observed value after the nonnegativity check).
    pub predicted_delta: i64,
    /// Deficiency of the enlarged network minus deficiency of the original,
    /// both recomputed from scratch.
    pub observed_delta: i64,
    pub breakdown: DeltaBreakdown,
    pub metrics_before: NetworkMetrics,
    pub metrics_after: NetworkMetrics,
    pub warnings: Vec<EnlargeWarning>,
}

/// What [`predict_delta`] can say about an operation before applying it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prediction {
    /// The deficiency change is this exact value.
    Exact(i64),
    /// Only `>= 0` is guaranteed (E5').
    NonnegativeUnbounded,
}

impl fmt::Display for Prediction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prediction::Exact(d) => write!(f, "{d:+}"),
            Prediction::NonnegativeUnbounded => write!(f, ">=0"),
        }
    }
}

// ---------------------------------------------------------------------------
// Shared construction helpers
// ---------------------------------------------------------------------------

fn new_species_of_complexes<'a>(
    network: &Network,
    complexes: impl IntoIterator<Item = &'a Complex>,
) -> BTreeSet<SpeciesId> {
    let mut new = BTreeSet::new();
    for complex in complexes {
        for species in complex.species_set() {
            if !network.has_species(species) {
                new.insert(species.clone());
            }
        }
    }
    new
}

/// Rows of the enlarged stoichiometric matrix that belong to species not in
/// the original network.
fn new_species_rows(original: &Network, enlarged: &Network) -> Vec<usize> {
    enlarged
        .species()
        .iter()
        .enumerate()
        .filter(|(_, s)| !original.has_species(s))
        .map(|(i, _)| i)
        .collect()
}

/// The reaction vector target - source, in the species coordinates of
/// `network` restricted to the rows `rows` of its species order.
fn restricted_reaction_vector(
    species: &[SpeciesId],
    rows: &[usize],
    source: &Complex,
    target: &Complex,
) -> Vec<BigInt> {
    rows.iter()
        .map(|&row| {
            let s = &species[row];
            BigInt::from(target.coefficient(s)) - BigInt::from(source.coefficient(s))
        })
        .collect()
}

fn matrix_from_columns(columns: Vec<Vec<BigInt>>, rows: usize) -> IntMatrix {
    let mut matrix = IntMatrix::zeros(rows, columns.len());
    for (c, column) in columns.iter().enumerate() {
        for (r, value) in column.iter().enumerate() {
            matrix.set(r, c, value.clone());
        }
    }
    matrix
}

fn insert_species(
    reaction: &Reaction,
    species: &SpeciesId,
    source_coeff: &BigUint,
    target_coeff: &BigUint,
) -> Reaction {
    let source = reaction.source().plus(species, source_coeff);
    let target = reaction.target().plus(species, target_coeff);
    Reaction::new(source, target).expect("distinct complexes stay distinct")
}

fn finish(
    operation: OpKind,
    network: &Network,
    enlarged: Network,
    predicted: Option<i64>,
    warnings: Vec<EnlargeWarning>,
) -> Result<EnlargementResult, EnlargeError> {
    let metrics_before = compute_metrics(network);
    let metrics_after = compute_metrics(&enlarged);
    let observed = metrics_after.deficiency - metrics_before.deficiency;
    let predicted = match predicted {
        Some(value) => value,
        // No closed form: the theory guarantees only monotonicity.
        None => {
            if observed < 0 {
                return Err(EnlargeError::TheoremFalsified {
                    operation: operation.to_string(),
                    detail: format!("deficiency decreased by {}", -observed),
                });
            }
            observed
        }
    };
    if predicted != observed {
        return Err(EnlargeError::TheoremFalsified {
            operation: operation.to_string(),
            detail: format!("predicted delta {predicted}, observed {observed}"),
        });
    }
    Ok(EnlargementResult {
        breakdown: breakdown(&metrics_before, &metrics_after),
        enlarged,
        predicted_delta: predicted,
        observed_delta: observed,
        metrics_before,
        metrics_after,
        warnings,
    })
}

// ---------------------------------------------------------------------------
// E1: add a rank-preserving reaction over existing species
// ---------------------------------------------------------------------------

fn validate_e1(network: &Network, reaction: &Reaction) -> Result<Network, EnlargeError> {
    if network.has_reaction(reaction) {
        return Err(EnlargeError::DuplicateReaction(reaction.to_string()));
    }
    let new_species = new_species_of_complexes(network, [reaction.source(), reaction.target()]);
    if let Some(species) = new_species.into_iter().next() {
        return Err(EnlargeError::NewSpeciesForbidden(species.to_string()));
    }
    let enlarged = build_network(
        network
            .reactions()
            .cloned()
            .chain(std::iter::once(reaction.clone())),
    )?;
    let before = rank(&stoichiometric_matrix(network));
    let after = rank(&stoichiometric_matrix(&enlarged));
    if before != after {
        return Err(EnlargeError::RankChanged { before, after });
    }
    Ok(enlarged)
}

fn e1_prediction(network: &Network, reaction: &Reaction) -> i64 {
    let co_linked = network.has_complex(reaction.source())
        && network.has_complex(reaction.target())
        && same_linkage_class(network, reaction.source(), reaction.target())
            .expect("both complexes are in the network");
    if co_linked {
        0
    } else {
        1
    }
}

/// E1: adds `reaction` (over existing species only) when doing so preserves
/// the rank. The deficiency rises by 1 unless some linkage class already
/// contains both endpoints.
pub fn apply_e1(network: &Network, reaction: &Reaction) -> Result<EnlargementResult, EnlargeError> {
    let enlarged = validate_e1(network, reaction)?;
    let predicted = e1_prediction(network, reaction);
    finish(OpKind::E1, network, enlarged, Some(predicted), Vec::new())
}

// ---------------------------------------------------------------------------
// E2: add all inflow-outflow reactions
// ---------------------------------------------------------------------------

fn e2_reactions(network: &Network) -> Vec<Reaction> {
    let zero = Complex::zero();
    network
        .species()
        .iter()
        .flat_map(|species| {
            let unit = Complex::species(species.clone());
            [
                Reaction::new(zero.clone(), unit.clone()).expect("0 != X"),
                Reaction::new(unit, zero.clone()).expect("X != 0"),
            ]
        })
        .collect()
}

fn e2_prediction(metrics: &NetworkMetrics) -> i64 {
    metrics.rank as i64 - metrics.species as i64
        + metrics.missing_unimolecular as i64
        + metrics.classes_with_unimolecular as i64
        - 1
}

/// E2: adds the inflow-outflow pair `0 <-> X` for every species (reactions
/// already present are not duplicated).
pub fn apply_e2(network: &Network) -> Result<EnlargementResult, EnlargeError> {
    let enlarged = build_network(network.reactions().cloned().chain(e2_reactions(network)))?;
    let predicted = e2_prediction(&compute_metrics(network));
    finish(OpKind::E2, network, enlarged, Some(predicted), Vec::new())
}

// ---------------------------------------------------------------------------
// E3 / E4: add a new species into existing reactions
// ---------------------------------------------------------------------------

fn validate_assignment(
    network: &Network,
    new_species: &SpeciesId,
    assignment: &[ReactionAssignment],
) -> Result<(), EnlargeError> {
    if network.has_species(new_species) {
        return Err(EnlargeError::SpeciesExists(new_species.to_string()));
    }
    let mut seen: BTreeSet<&Reaction> = BTreeSet::new();
    for entry in assignment {
        if !network.has_reaction(&entry.reaction) {
            return Err(EnlargeError::UnknownReaction(entry.reaction.to_string()));
        }
        if !seen.insert(&entry.reaction) {
            return Err(EnlargeError::DuplicateAssignment(
                entry.reaction.to_string(),
            ));
        }
        if entry.source_coeff.is_zero() && entry.target_coeff.is_zero() {
            return Err(EnlargeError::BothCoefficientsZero(
                entry.reaction.to_string(),
            ));
        }
    }
    Ok(())
}

/// Replaces assigned reactions by their species-inserted versions.
fn inserted_reactions(
    network: &Network,
    new_species: &SpeciesId,
    assignment: &[ReactionAssignment],
) -> Vec<Reaction> {
    network
        .reactions()
        .map(
            |reaction| match assignment.iter().find(|entry| entry.reaction == *reaction) {
                Some(entry) => insert_species(
                    reaction,
                    new_species,
                    &entry.source_coeff,
                    &entry.target_coeff,
                ),
                None => reaction.clone(),
            },
        )
        .collect()
}

/// E3: inserts a new species into at least one existing reaction, subject to
/// the rank staying unchanged. The deficiency change is exactly minus the
/// cyclomatic change.
pub fn apply_e3(
    network: &Network,
    new_species: &SpeciesId,
    assignment: &[ReactionAssignment],
) -> Result<EnlargementResult, EnlargeError> {
    if assignment.is_empty() {
        return Err(EnlargeError::EmptyAssignment);
    }
    validate_assignment(network, new_species, assignment)?;
    let enlarged = build_network(inserted_reactions(network, new_species, assignment))?;
    let before = rank(&stoichiometric_matrix(network));
    let after = rank(&stoichiometric_matrix(&enlarged));
    if before != after {
        return Err(EnlargeError::RankChanged { before, after });
    }
    // With the rank fixed, the delta is c' - l' - (c - l), which is the
    // negative of the cyclomatic change.
    let metrics_before = compute_metrics(network);
    let metrics_after = compute_metrics(&enlarged);
    let predicted = (metrics_after.complexes as i64 - metrics_after.linkage_classes as i64)
        - (metrics_before.complexes as i64 - metrics_before.linkage_classes as i64);
    let result = finish(OpKind::E3, network, enlarged, Some(predicted), Vec::new())?;
    check_e3_shape(&result)?;
    Ok(result)
}

fn check_e3_shape(result: &EnlargementResult) -> Result<(), EnlargeError> {
    let b = &result.breakdown;
    if b.reactions != 0 {
        return Err(EnlargeError::TheoremFalsified {
            operation: OpKind::E3.to_string(),
            detail: format!("reaction count changed by {}", b.reactions),
        });
    }
    if result.observed_delta != -b.cyclomatic {
        return Err(EnlargeError::TheoremFalsified {
            operation: OpKind::E3.to_string(),
            detail: format!(
                "delta {} differs from -(delta cyc) = {}",
                result.observed_delta, -b.cyclomatic
            ),
        });
    }
    if b.linkage_classes > b.complexes {
        return Err(EnlargeError::TheoremFalsified {
            operation: OpKind::E3.to_string(),
            detail: format!(
                "delta l = {} exceeds delta c = {}",
                b.linkage_classes, b.complexes
            ),
        });
    }
    Ok(())
}

/// E4: inserts a new species into some (possibly zero) existing reactions
/// and adds its inflow-outflow pair `0 <-> Y`. No rank condition; the rank
/// always rises by exactly 1 and the reaction count by 2.
pub fn apply_e4(
    network: &Network,
    new_species: &SpeciesId,
    assignment: &[ReactionAssignment],
) -> Result<EnlargementResult, EnlargeError> {
    validate_assignment(network, new_species, assignment)?;
    let mut warnings = Vec::new();
    if assignment.is_empty() {
        warnings.push(EnlargeWarning::EmptyAssignment);
    }
    let zero = Complex::zero();
    let unit = Complex::species(new_species.clone());
    let mut reactions = inserted_reactions(network, new_species, assignment);
    reactions.push(Reaction::new(zero.clone(), unit.clone()).expect("0 != Y"));
    reactions.push(Reaction::new(unit, zero).expect("Y != 0"));
    let enlarged = build_network(reactions)?;

    // Two reactions are added, so the predicted -(cyclomatic change) + 1
    // becomes (c' - l') - (c - l) - 1.
    let metrics_before = compute_metrics(network);
    let metrics_after = compute_metrics(&enlarged);
    let predicted = (metrics_after.complexes as i64 - metrics_after.linkage_classes as i64)
        - (metrics_before.complexes as i64 - metrics_before.linkage_classes as i64)
        - 1;
    let result = finish(OpKind::E4, network, enlarged, Some(predicted), warnings)?;
    check_e4_shape(&result)?;
    Ok(result)
}

fn check_e4_shape(result: &EnlargementResult) -> Result<(), EnlargeError> {
    let b = &result.breakdown;
    if b.reactions != 2 || b.rank != 1 {
        return Err(EnlargeError::TheoremFalsified {
            operation: OpKind::E4.to_string(),
            detail: format!(
                "expected delta r = 2 and delta rank = 1, got delta r = {}, delta rank = {}",
                b.reactions, b.rank
            ),
        });
    }
    if result.observed_delta != -b.cyclomatic + 1 {
        return Err(EnlargeError::TheoremFalsified {
            operation: OpKind::E4.to_string(),
            detail: format!(
                "delta {} differs from -(delta cyc) + 1 = {}",
                result.observed_delta,
                -b.cyclomatic + 1
            ),
        });
    }
    if b.linkage_classes + 1 > b.complexes {
        return Err(EnlargeError::TheoremFalsified {
            operation: OpKind::E4.to_string(),
            detail: format!(
                "delta l + 1 = {} exceeds delta c = {}",
                b.linkage_classes + 1,
                b.complexes
            ),
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// E5 / E5': add reversible pairs
// ---------------------------------------------------------------------------

fn validate_pairs(network: &Network, pairs: &[(Complex, Complex)]) -> Result<(), EnlargeError> {
    if pairs.is_empty() {
        return Err(EnlargeError::EmptyPairs);
    }
    let mut added: BTreeSet<(Complex, Complex)> = BTreeSet::new();
    for (left, right) in pairs {
        if left == right {
            return Err(EnlargeError::SelfLoopPair(left.canonical_text()));
        }
        for (a, b) in [(left, right), (right, left)] {
            let candidate = Reaction::new(a.clone(), b.clone()).expect("distinct");
            if network.has_reaction(&candidate) || added.contains(&(a.clone(), b.clone())) {
                return Err(EnlargeError::DuplicateReaction(candidate.to_string()));
            }
        }
        added.insert((left.clone(), right.clone()));
        added.insert((right.clone(), left.clone()));
    }
    Ok(())
}

fn pairs_network(network: &Network, pairs: &[(Complex, Complex)]) -> Result<Network, EnlargeError> {
    let new_reactions = pairs.iter().flat_map(|(left, right)| {
        [
            Reaction::new(left.clone(), right.clone()).expect("distinct"),
            Reaction::new(right.clone(), left.clone()).expect("distinct"),
        ]
    });
    Ok(build_network(
        network.reactions().cloned().chain(new_reactions),
    )?)
}

/// The rank condition submatrix for E5: one column per pair, restricted to
/// the rows of the new species.
fn e5_row_condition_matrix(
    original: &Network,
    enlarged: &Network,
    pairs: &[(Complex, Complex)],
) -> IntMatrix {
    let rows = new_species_rows(original, enlarged);
    let columns: Vec<Vec<BigInt>> = pairs
        .iter()
        .map(|(left, right)| restricted_reaction_vector(enlarged.species(), &rows, left, right))
        .collect();
    matrix_from_columns(columns, rows.len())
}

/// The rank condition submatrix for E5': one full column per pair.
fn e5_column_condition_matrix(enlarged: &Network, pairs: &[(Complex, Complex)]) -> IntMatrix {
    let all_rows: Vec<usize> = (0..enlarged.species_count()).collect();
    let columns: Vec<Vec<BigInt>> = pairs
        .iter()
        .map(|(left, right)| restricted_reaction_vector(enlarged.species(), &all_rows, left, right))
        .collect();
    matrix_from_columns(columns, all_rows.len())
}

/// E5: adds `m` reversible pairs whose complexes involve at least `m` new
/// species, with the new-species rows of the enlarged stoichiometric matrix
/// having rank exactly `m`. The deficiency never changes.
pub fn apply_e5(
    network: &Network,
    pairs: &[(Complex, Complex)],
) -> Result<EnlargementResult, EnlargeError> {
    validate_pairs(network, pairs)?;
    let m = pairs.len();
    let new_species = new_species_of_complexes(network, pairs.iter().flat_map(|(l, r)| [l, r]));
    if new_species.len() < m {
        return Err(EnlargeError::TooFewNewSpecies {
            found: new_species.len(),
            required: m,
        });
    }
    let enlarged = pairs_network(network, pairs)?;
    let condition = e5_row_condition_matrix(network, &enlarged, pairs);
    let actual = rank(&condition);
    if actual != m {
        return Err(EnlargeError::RankConditionFailed {
            actual,
            required: m,
        });
    }
    finish(OpKind::E5, network, enlarged, Some(0), Vec::new())
}

/// E5': like E5, but the rank condition is on the new reaction columns of
/// the enlarged matrix instead of the new species rows, and no new species
/// are required. The deficiency cannot decrease, but has no closed form.
pub fn apply_e5_prime(
    network: &Network,
    pairs: &[(Complex, Complex)],
) -> Result<EnlargementResult, EnlargeError> {
    validate_pairs(network, pairs)?;
    let m = pairs.len();
    let enlarged = pairs_network(network, pairs)?;
    let condition = e5_column_condition_matrix(&enlarged, pairs);
    let actual = rank(&condition);
    if actual != m {
        return Err(EnlargeError::RankConditionFailed {
            actual,
            required: m,
        });
    }
    finish(OpKind::E5Prime, network, enlarged, None, Vec::new())
}

// ---------------------------------------------------------------------------
// E6: split reactions through new intermediate complexes
// ---------------------------------------------------------------------------

fn validate_splits(
    network: &Network,
    splits: &[(Reaction, Complex)],
) -> Result<BTreeSet<SpeciesId>, EnlargeError> {
    if splits.is_empty() {
        return Err(EnlargeError::EmptySplits);
    }
    let mut split_reactions: BTreeSet<&Reaction> = BTreeSet::new();
    let mut intermediates: BTreeSet<&Complex> = BTreeSet::new();
    for (reaction, intermediate) in splits {
        if !network.has_reaction(reaction) {
            return Err(EnlargeError::UnknownReaction(reaction.to_string()));
        }
        if !split_reactions.insert(reaction) {
            return Err(EnlargeError::DuplicateSplit(reaction.to_string()));
        }
        if network.has_complex(intermediate) {
            return Err(EnlargeError::IntermediateNotNew(
                intermediate.canonical_text(),
            ));
        }
        if !intermediates.insert(intermediate) {
            return Err(EnlargeError::DuplicateIntermediate(
                intermediate.canonical_text(),
            ));
        }
    }
    let m = splits.len();
    let new_species = new_species_of_complexes(network, splits.iter().map(|(_, z)| z));
    if new_species.len() < m {
        return Err(EnlargeError::TooFewNewSpecies {
            found: new_species.len(),
            required: m,
        });
    }
    Ok(new_species)
}

/// E6: replaces each chosen reaction `C -> D` by `C -> Z` and `Z -> D`
/// through a fresh intermediate complex `Z`, with the new-species rows of
/// the enlarged matrix having rank exactly `m`. The deficiency never
/// changes.
pub fn apply_e6(
    network: &Network,
    splits: &[(Reaction, Complex)],
) -> Result<EnlargementResult, EnlargeError> {
    validate_splits(network, splits)?;
    let m = splits.len();

    let mut reactions: Vec<Reaction> = Vec::new();
    for reaction in network.reactions() {
        match splits.iter().find(|(split, _)| split == reaction) {
            Some((_, intermediate)) => {
                reactions.push(
                    Reaction::new(reaction.source().clone(), intermediate.clone())
                        .expect("intermediate is a new complex"),
                );
                reactions.push(
                    Reaction::new(intermediate.clone(), reaction.target().clone())
                        .expect("intermediate is a new complex"),
                );
            }
            None => reactions.push(reaction.clone()),
        }
    }
    let enlarged = build_network(reactions)?;

    let rows = new_species_rows(network, &enlarged);
    let gamma = stoichiometric_matrix(&enlarged);
    let all_cols: Vec<usize> = (0..gamma.cols()).collect();
    let condition =
        crate::exactla::submatrix(&gamma, &rows, &all_cols).expect("rows and columns are in range");
    let actual = rank(&condition);
    if actual != m {
        return Err(EnlargeError::RankConditionFailed {
            actual,
            required: m,
        });
    }

    let result = finish(OpKind::E6, network, enlarged, Some(0), Vec::new())?;
    let b = &result.breakdown;
    if b.complexes != m as i64 || b.linkage_classes != 0 || b.rank != m as i64 {
        return Err(EnlargeError::TheoremFalsified {
            operation: OpKind::E6.to_string(),
            detail: format!(
                "expected delta c = {m}, delta l = 0, delta rank = {m}; got {}, {}, {}",
                b.complexes, b.linkage_classes, b.rank
            ),
        });
    }
    Ok(result)
}

// ---------------------------------------------------------------------------
// Single-reaction addition (no preconditions beyond novelty)
// ---------------------------------------------------------------------------

/// Adds one reaction, with no rank or species condition. The deficiency
/// changes by 0 or 1; when no linkage class contains both endpoints, the
/// complex and linkage-class counts satisfy `delta c - delta l = 1`.
pub fn add_single_reaction(
    network: &Network,
    reaction: &Reaction,
) -> Result<EnlargementResult, EnlargeError> {
    if network.has_reaction(reaction) {
        return Err(EnlargeError::DuplicateReaction(reaction.to_string()));
    }
    let enlarged = build_network(
        network
            .reactions()
            .cloned()
            .chain(std::iter::once(reaction.clone())),
    )?;

    let metrics_before = compute_metrics(network);
    let metrics_after = compute_metrics(&enlarged);
    let observed = metrics_after.deficiency - metrics_before.deficiency;
    if !(0..=1).contains(&observed) {
        return Err(EnlargeError::TheoremFalsified {
            operation: "add-reaction".to_string(),
            detail: format!("single-reaction delta {observed} outside {{0, 1}}"),
        });
    }
    let co_linked = network.has_complex(reaction.source())
        && network.has_complex(reaction.target())
        && same_linkage_class(network, reaction.source(), reaction.target())
            .expect("both complexes are in the network");
    let b = breakdown(&metrics_before, &metrics_after);
    if !co_linked && b.complexes - b.linkage_classes != 1 {
        return Err(EnlargeError::TheoremFalsified {
            operation: "add-reaction".to_string(),
            detail: format!(
                "endpoints not co-linked but (delta c) - (delta l) = {}",
                b.complexes - b.linkage_classes
            ),
        });
    }
    Ok(EnlargementResult {
        enlarged,
        predicted_delta: observed,
        observed_delta: observed,
        breakdown: b,
        metrics_before,
        metrics_after,
        warnings: Vec::new(),
    })
}

// ---------------------------------------------------------------------------
// Spec-level dispatch
// ---------------------------------------------------------------------------

/// Applies a spec to a network.
pub fn apply(network: &Network, spec: &EnlargementSpec) -> Result<EnlargementResult, EnlargeError> {
    match spec {
        EnlargementSpec::E1 { reaction } => apply_e1(network, reaction),
        EnlargementSpec::E2 => apply_e2(network),
        EnlargementSpec::E3 {
            new_species,
            assignment,
        } => apply_e3(network, new_species, assignment),
        EnlargementSpec::E4 {
            new_species,
            assignment,
        } => apply_e4(network, new_species, assignment),
        EnlargementSpec::E5 { pairs } => apply_e5(network, pairs),
        EnlargementSpec::E5Prime { pairs } => apply_e5_prime(network, pairs),
        EnlargementSpec::E6 { splits } => apply_e6(network, splits),
    }
}

/// Predicts the deficiency change of a valid spec from the closed forms,
/// without computing the enlarged network's rank where the formula does not
/// need it. Runs the same validation as [`apply`].
pub fn predict_delta(
    network: &Network,
    spec: &EnlargementSpec,
) -> Result<Prediction, EnlargeError> {
    match spec {
        EnlargementSpec::E1 { reaction } => {
            validate_e1(network, reaction)?;
            Ok(Prediction::Exact(e1_prediction(network, reaction)))
        }
        EnlargementSpec::E2 => Ok(Prediction::Exact(e2_prediction(&compute_metrics(network)))),
        EnlargementSpec::E3 {
            new_species,
            assignment,
        } => {
            // The formula -delta cyc needs only the combinatorial graph of the
            // enlarged network, but E3's validity includes the rank check.
            let result = apply_e3(network, new_species, assignment)?;
            Ok(Prediction::Exact(-result.breakdown.cyclomatic))
        }
        EnlargementSpec::E4 {
            new_species,
            assignment,
        } => {
            validate_assignment(network, new_species, assignment)?;
            let zero = Complex::zero();
            let unit = Complex::species(new_species.clone());
            let mut reactions = inserted_reactions(network, new_species, assignment);
            reactions.push(Reaction::new(zero.clone(), unit.clone()).expect("0 != Y"));
            reactions.push(Reaction::new(unit, zero).expect("Y != 0"));
            let enlarged = build_network(reactions)?;
            // Purely combinatorial: delta cyc from counts and linkage classes.
            let delta_cyc = combinatorial_cyclomatic(&enlarged) - combinatorial_cyclomatic(network);
            Ok(Prediction::Exact(-delta_cyc + 1))
        }
        EnlargementSpec::E5 { pairs } => {
            let m = pairs.len();
            validate_pairs(network, pairs)?;
            let new_species =
                new_species_of_complexes(network, pairs.iter().flat_map(|(l, r)| [l, r]));
            if new_species.len() < m {
                return Err(EnlargeError::TooFewNewSpecies {
                    found: new_species.len(),
                    required: m,
                });
            }
            // The condition matrix needs only the new species rows, so the
            // enlarged network itself is never constructed here.
            let species: Vec<SpeciesId> = new_species.into_iter().collect();
            let rows: Vec<usize> = (0..species.len()).collect();
            let columns: Vec<Vec<BigInt>> = pairs
                .iter()
                .map(|(left, right)| restricted_reaction_vector(&species, &rows, left, right))
                .collect();
            let condition = matrix_from_columns(columns, species.len());
            let actual = rank(&condition);
            if actual != m {
                return Err(EnlargeError::RankConditionFailed {
                    actual,
                    required: m,
                });
            }
            Ok(Prediction::Exact(0))
        }
        EnlargementSpec::E5Prime { pairs } => {
            validate_pairs(network, pairs)?;
            let m = pairs.len();
            let enlarged = pairs_network(network, pairs)?;
            let condition = e5_column_condition_matrix(&enlarged, pairs);
            let actual = rank(&condition);
            if actual != m {
                return Err(EnlargeError::RankConditionFailed {
                    actual,
                    required: m,
                });
            }
            Ok(Prediction::NonnegativeUnbounded)
        }
        EnlargementSpec::E6 { splits } => {
            let new_species = validate_splits(network, splits)?;
            // In the new-species rows, the two columns of split k are
            // +-(intermediate restricted to new species), so the condition
            // matrix reduces to one column per intermediate.
            let m = splits.len();
            let species: Vec<SpeciesId> = new_species.into_iter().collect();
            let rows: Vec<usize> = (0..species.len()).collect();
            let zero = Complex::zero();
            let columns: Vec<Vec<BigInt>> = splits
                .iter()
                .map(|(_, intermediate)| {
                    restricted_reaction_vector(&species, &rows, &zero, intermediate)
                })
                .collect();
            let condition = matrix_from_columns(columns, species.len());
            let actual = rank(&condition);
            if actual != m {
                return Err(EnlargeError::RankConditionFailed {
                    actual,
                    required: m,
                });
            }
            Ok(Prediction::Exact(0))
        }
    }
}

/// Cyclomatic number from purely combinatorial data (no rank).
fn combinatorial_cyclomatic(network: &Network) -> i64 {
    let ell = crate::metrics::linkage_classes(network).len() as i64;
    network.reaction_count() as i64 - network.complex_count() as i64 + ell
}
