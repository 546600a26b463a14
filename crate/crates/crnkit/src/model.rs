//! The immutable reaction-network data model.
//!
//! A [`Network`] is a triple of species, complexes, and reactions. Complexes
//! are formal nonnegative-integer combinations of species; reactions are
//! directed edges between two distinct complexes. Networks are always in
//! canonical form: species sorted by name, complexes and reactions held in
//! ordered sets, and every complex and species participating in at least one
//! reaction. [`build_network`] is the only public way to obtain one, so a
//! `Network` value in hand is valid by construction; [`validate`] re-checks
//! the rules and is used as an independent oracle by the fuzz harness.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

/// Errors raised while constructing model values.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid species name {0:?}: expected [A-Za-z_][A-Za-z0-9_]*")]
    InvalidSpeciesName(String),
    #[error("reaction source and target are the same complex: {0}")]
    SelfLoop(String),
    #[error("a network needs at least one reaction")]
    EmptyNetwork,
}

/// A species name. Valid names match `[A-Za-z_][A-Za-z0-9_]*`; the token `0`
/// is reserved for the empty complex.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpeciesId(String);

impl SpeciesId {
    pub fn new(name: impl Into<String>) -> Result<Self, ModelError> {
        let name = name.into();
        let mut chars = name.chars();
        let head_ok = chars
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
        if head_ok && chars.all(|c| c.is_ascii_alphanumeric() || c == '_') {
            Ok(SpeciesId(name))
        } else {
            Err(ModelError::InvalidSpeciesName(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SpeciesId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A complex: a multiset of species with positive integer coefficients.
/// The empty multiset is the zero complex, written `0`.
///
/// Stored coefficients are never zero, so structural equality coincides with
/// equality of the formal linear combinations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Complex {
    terms: BTreeMap<SpeciesId, BigUint>,
}

impl Complex {
    /// The zero complex.
    pub fn zero() -> Self {
        Complex {
            terms: BTreeMap::new(),
        }
    }

    /// Builds a complex from (species, coefficient) pairs. Repeated species
    /// are summed; zero coefficients are dropped (canonical form).
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (SpeciesId, BigUint)>,
    {
        let mut map: BTreeMap<SpeciesId, BigUint> = BTreeMap::new();
        for (species, coeff) in terms {
            if !coeff.is_zero() {
                *map.entry(species).or_insert_with(BigUint::zero) += coeff;
            }
        }
        Complex { terms: map }
    }

    /// Single species with coefficient 1.
    pub fn species(species: SpeciesId) -> Self {
        Complex::from_terms([(species, BigUint::one())])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The coefficient of `species` (zero if absent).
    pub fn coefficient(&self, species: &SpeciesId) -> BigUint {
        self.terms.get(species).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SpeciesId, &BigUint)> {
        self.terms.iter()
    }

    pub fn species_set(&self) -> impl Iterator<Item = &SpeciesId> {
        self.terms.keys()
    }

    /// True for the zero complex and for a bare species (coefficient 1):
    /// the "at-most-unimolecular" complexes.
    pub fn is_at_most_unimolecular(&self) -> bool {
        match self.terms.len() {
            0 => true,
            1 => self.terms.values().next().unwrap().is_one(),
            _ => false,
        }
    }

    /// This complex plus `coeff * species`. A zero `coeff` returns the
    /// complex unchanged.
    pub fn plus(&self, species: &SpeciesId, coeff: &BigUint) -> Complex {
        let mut terms = self.terms.clone();
        if !coeff.is_zero() {
            *terms.entry(species.clone()).or_insert_with(BigUint::zero) += coeff;
        }
        Complex { terms }
    }

    /// Canonical text form: terms sorted by species name, coefficient 1
    /// omitted, `0` for the zero complex. This is both the display syntax
    /// and the key for the canonical total order on complexes.
    pub fn canonical_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(species, coeff)| {
                if coeff.is_one() {
                    species.as_str().to_string()
                } else {
                    format!("{coeff}{species}")
                }
            })
            .collect();
        parts.join(" + ")
    }
}

impl fmt::Display for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_text())
    }
}

// The canonical order on complexes is byte order of the canonical text.
// The rendering is injective (names cannot start with a digit, coefficient 1
// is always omitted), so `cmp == Equal` agrees with structural equality.
impl Ord for Complex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.canonical_text().cmp(&other.canonical_text())
    }
}

impl PartialOrd for Complex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// A directed reaction between two distinct complexes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Reaction {
    source: Complex,
    target: Complex,
}

impl Reaction {
    pub fn new(source: Complex, target: Complex) -> Result<Self, ModelError> {
        if source == target {
            return Err(ModelError::SelfLoop(source.canonical_text()));
        }
        Ok(Reaction { source, target })
    }

    pub fn source(&self) -> &Complex {
        &self.source
    }

    pub fn target(&self) -> &Complex {
        &self.target
    }

    /// The same reaction with source and target swapped.
    pub fn reversed(&self) -> Reaction {
        Reaction {
            source: self.target.clone(),
            target: self.source.clone(),
        }
    }
}

impl fmt::Display for Reaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.source, self.target)
    }
}

/// A chemical reaction network in canonical form.
///
/// Immutable after construction; all analysis functions take `&Network` and
/// are pure, so values can be shared freely across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    species: Vec<SpeciesId>,
    complexes: BTreeSet<Complex>,
    reactions: BTreeSet<Reaction>,
}

/// Non-fatal observations made while building a network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BuildWarning {
    /// The same reaction appeared more than once in the input; the reaction
    /// set keeps a single copy.
    DuplicateReaction(Reaction),
}

impl fmt::Display for BuildWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuildWarning::DuplicateReaction(r) => write!(f, "duplicate reaction ignored: {r}"),
        }
    }
}

/// A violation of the network validity rules, as reported by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoSpecies,
    NoComplexes,
    NoReactions,
    /// A listed complex takes part in no reaction.
    ComplexUnused(Complex),
    /// A reaction endpoint is missing from the complex set.
    ComplexUnlisted(Complex),
    /// A listed species occurs in no complex.
    SpeciesUnused(SpeciesId),
    /// A species occurs in some complex but is not listed.
    SpeciesUnlisted(SpeciesId),
    /// The species sequence is not sorted by name.
    SpeciesOrder,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoSpecies => write!(f, "network has no species"),
            Violation::NoComplexes => write!(f, "network has no complexes"),
            Violation::NoReactions => write!(f, "network has no reactions"),
            Violation::ComplexUnused(c) => write!(f, "complex {c} takes part in no reaction"),
            Violation::ComplexUnlisted(c) => {
                write!(f, "complex {c} appears in a reaction but is not listed")
            }
            Violation::SpeciesUnused(s) => write!(f, "species {s} occurs in no complex"),
            Violation::SpeciesUnlisted(s) => {
                write!(f, "species {s} occurs in a complex but is not listed")
            }
            Violation::SpeciesOrder => write!(f, "species sequence is not sorted by name"),
        }
    }
}

impl Network {
    /// Species in row order (sorted by name).
    pub fn species(&self) -> &[SpeciesId] {
        &self.species
    }

    /// Row index of a species in the stoichiometric matrix.
    pub fn species_index(&self, species: &SpeciesId) -> Option<usize> {
        self.species.binary_search(species).ok()
    }

    pub fn has_species(&self, species: &SpeciesId) -> bool {
        self.species_index(species).is_some()
    }

    /// Complexes in canonical order.
    pub fn complexes(&self) -> impl ExactSizeIterator<Item = &Complex> {
        self.complexes.iter()
    }

    pub fn has_complex(&self, complex: &Complex) -> bool {
        self.complexes.contains(complex)
    }

    /// Reactions in canonical order (sorted by source, then target); this is
    /// the column order of the stoichiometric matrix.
    pub fn reactions(&self) -> impl ExactSizeIterator<Item = &Reaction> {
        self.reactions.iter()
    }

    pub fn has_reaction(&self, reaction: &Reaction) -> bool {
        self.reactions.contains(reaction)
    }

    pub fn species_count(&self) -> usize {
        self.species.len()
    }

    pub fn complex_count(&self) -> usize {
        self.complexes.len()
    }

    pub fn reaction_count(&self) -> usize {
        self.reactions.len()
    }

    /// Assembles a `Network` from raw parts without any checking.
    ///
    /// Only for tests of [`validate`]; everything else must go through
    /// [`build_network`].
    #[doc(hidden)]
    pub fn from_raw_parts(
        species: Vec<SpeciesId>,
        complexes: BTreeSet<Complex>,
        reactions: BTreeSet<Reaction>,
    ) -> Network {
        Network {
            species,
            complexes,
            reactions,
        }
    }
}

/// Builds a canonical [`Network`] from a sequence of reactions.
///
/// Complexes are the reaction endpoints, species are those occurring in any
/// complex (sorted by name), and duplicate reactions collapse to one.
pub fn build_network<I>(reactions: I) -> Result<Network, ModelError>
where
    I: IntoIterator<Item = Reaction>,
{
    build_network_with_warnings(reactions).map(|(network, _)| network)
}

/// Like [`build_network`] but also reports duplicate-input warnings.
pub fn build_network_with_warnings<I>(
    reactions: I,
) -> Result<(Network, Vec<BuildWarning>), ModelError>
where
    I: IntoIterator<Item = Reaction>,
{
    let mut warnings = Vec::new();
    let mut reaction_set: BTreeSet<Reaction> = BTreeSet::new();
    for reaction in reactions {
        if !reaction_set.insert(reaction.clone()) {
            warnings.push(BuildWarning::DuplicateReaction(reaction));
        }
    }
    if reaction_set.is_empty() {
        return Err(ModelError::EmptyNetwork);
    }

    let mut complexes: BTreeSet<Complex> = BTreeSet::new();
    for reaction in &reaction_set {
        complexes.insert(reaction.source().clone());
        complexes.insert(reaction.target().clone());
    }

    let mut species: BTreeSet<SpeciesId> = BTreeSet::new();
    for complex in &complexes {
        species.extend(complex.species_set().cloned());
    }

    Ok((
        Network {
            species: species.into_iter().collect(),
            complexes,
            reactions: reaction_set,
        },
        warnings,
    ))
}

/// Checks every network validity rule and reports all violations found.
/// Networks produced by [`build_network`] always pass.
pub fn validate(network: &Network) -> Vec<Violation> {
    let mut violations = Vec::new();

    if network.species.is_empty() {
        violations.push(Violation::NoSpecies);
    }
    if network.complexes.is_empty() {
        violations.push(Violation::NoComplexes);
    }
    if network.reactions.is_empty() {
        violations.push(Violation::NoReactions);
    }
    if !network.species.windows(2).all(|w| w[0] < w[1]) {
        violations.push(Violation::SpeciesOrder);
    }

    let mut used_complexes: BTreeSet<&Complex> = BTreeSet::new();
    for reaction in &network.reactions {
        for endpoint in [reaction.source(), reaction.target()] {
            used_complexes.insert(endpoint);
            if !network.complexes.contains(endpoint) {
                violations.push(Violation::ComplexUnlisted(endpoint.clone()));
            }
        }
    }
    for complex in &network.complexes {
        if !used_complexes.contains(complex) {
            violations.push(Violation::ComplexUnused(complex.clone()));
        }
    }

    let mut used_species: BTreeSet<&SpeciesId> = BTreeSet::new();
    for complex in &network.complexes {
        for species in complex.species_set() {
            used_species.insert(species);
            if !network.has_species(species) {
                violations.push(Violation::SpeciesUnlisted(species.clone()));
            }
        }
    }
    for species in &network.species {
        if !used_species.contains(species) {
            violations.push(Violation::SpeciesUnused(species.clone()));
        }
    }

    violations.sort_by_key(|v| format!("{v:?}"));
    violations.dedup();
    violations
}
