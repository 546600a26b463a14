//! Deterministic randomized verification of the enlargement theory.
//!
//! The harness generates networks and valid operation instances from a
//! seeded RNG, applies each operation, and checks every invariant the
//! library promises: the closed-form deficiency deltas, monotonicity, the
//! structural decompositions of E3/E4/E6, agreement between the two rank
//! routes, subspace membership of same-class complex differences, and a
//! brute-force circuit-rank oracle on small graphs.
//!
//! Each trial derives its own RNG stream from `(seed, trial)`, so trials are
//! order-independent and a replay with the same parameters produces byte
//! identical reports. Failures carry a reproduction case (network text plus
//! spec JSON) that replays through the command-line `apply`.

use num_bigint::{BigInt, BigUint};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;
use std::collections::BTreeSet;

use crate::enlarge::{
    apply, predict_delta, EnlargementResult, EnlargementSpec, OpKind, Prediction,
    ReactionAssignment,
};
use crate::exactla::{all_in_column_span, rank, stoichiometric_matrix, submatrix, IntMatrix};
use crate::metrics::{compute_metrics, linkage_classes, NetworkMetrics};
use crate::model::{build_network, validate, Complex, Network, Reaction, SpeciesId};
use crate::textio::{script_to_json, serialize_crn, spec_to_json};

/// Bounds and seed for network generation. Generation is a pure function of
/// `(params, trial index)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GenParams {
    pub seed: u64,
    pub max_species: usize,
    pub max_complexes: usize,
    pub max_reactions: usize,
    pub max_coefficient: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            seed: 0x5EED,
            max_species: 5,
            max_complexes: 8,
            max_reactions: 9,
            max_coefficient: 3,
        }
    }
}

impl GenParams {
    pub fn with_seed(seed: u64) -> Self {
        GenParams {
            seed,
            ..GenParams::default()
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const STREAM_NETWORK: u64 = 0;
const STREAM_SPEC: u64 = 1;
const STREAM_REACTION: u64 = 100;

/// Every trial gets an independent stream: hash of seed, trial, and purpose.
fn trial_rng(seed: u64, trial: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(
        splitmix64(seed) ^ splitmix64(trial.wrapping_mul(2).wrapping_add(stream << 32)),
    ))
}

fn species_pool(count: usize) -> Vec<SpeciesId> {
    (0..count)
        .map(|i| {
            let name = if i < 8 {
                char::from(b'A' + i as u8).to_string()
            } else {
                format!("S{i}")
            };
            SpeciesId::new(name).expect("generated names are valid")
        })
        .collect()
}

fn random_complex(rng: &mut ChaCha8Rng, names: &[SpeciesId], max_coefficient: u64) -> Complex {
    // Cover the zero complex and unimolecular complexes with decent odds.
    if rng.random_bool(0.08) {
        return Complex::zero();
    }
    let n_terms = rng.random_range(1..=names.len().min(3));
    let mut picked = BTreeSet::new();
    while picked.len() < n_terms {
        picked.insert(rng.random_range(0..names.len()));
    }
    Complex::from_terms(picked.into_iter().map(|i| {
        let coefficient = if rng.random_bool(0.55) {
            1
        } else {
            rng.random_range(1..=max_coefficient.max(1))
        };
        (names[i].clone(), BigUint::from(coefficient))
    }))
}

/// Generates a valid network within the parameter bounds.
pub fn random_network(params: &GenParams, trial: u64) -> Network {
    let mut rng = trial_rng(params.seed, trial, STREAM_NETWORK);
    let names = species_pool(rng.random_range(1..=params.max_species.max(1)));

    let pool_target = rng.random_range(2..=params.max_complexes.max(2));
    // Two guaranteed distinct members keep degenerate draws usable and give
    // the zero complex and a unimolecular complex a presence in every pool.
    let mut pool: BTreeSet<Complex> = BTreeSet::new();
    pool.insert(Complex::zero());
    pool.insert(Complex::species(names[0].clone()));
    for _ in 0..pool_target * 8 {
        if pool.len() >= pool_target.max(2) {
            break;
        }
        pool.insert(random_complex(&mut rng, &names, params.max_coefficient));
    }
    let pool: Vec<Complex> = pool.into_iter().collect();

    let reaction_target = rng.random_range(1..=params.max_reactions.max(1));
    let mut reactions: BTreeSet<Reaction> = BTreeSet::new();
    for _ in 0..reaction_target * 8 {
        if reactions.len() >= reaction_target {
            break;
        }
        let i = rng.random_range(0..pool.len());
        let j = rng.random_range(0..pool.len());
        if i == j {
            continue;
        }
        let reaction = Reaction::new(pool[i].clone(), pool[j].clone()).expect("i != j");
        let added = reactions.insert(reaction.clone());
        // Reversible pairs show up with fair probability.
        if added && reactions.len() < reaction_target && rng.random_bool(0.3) {
            reactions.insert(reaction.reversed());
        }
    }
    if reactions.is_empty() {
        reactions.insert(Reaction::new(pool[0].clone(), pool[1].clone()).expect("distinct"));
    }
    build_network(reactions).expect("generated reactions form a valid network")
}

fn fresh_species(network: &Network, count: usize) -> Vec<SpeciesId> {
    let mut out = Vec::new();
    let mut index = 0usize;
    while out.len() < count {
        let name = match index {
            0..=5 => ["Y", "Z", "W", "V", "U", "T"][index].to_string(),
            _ => format!("Y{}", index - 5),
        };
        index += 1;
        let species = SpeciesId::new(name).expect("valid name");
        if !network.has_species(&species) {
            out.push(species);
        }
    }
    out
}

fn pick<'a, T>(rng: &mut ChaCha8Rng, items: &'a [T]) -> &'a T {
    &items[rng.random_range(0..items.len())]
}

/// A complex shifted by an existing reaction vector, when the result stays
/// nonnegative. The difference to `base` is then inside the span.
fn shift_by_reaction(base: &Complex, reaction: &Reaction) -> Option<Complex> {
    let mut terms: Vec<(SpeciesId, BigUint)> = Vec::new();
    let mut species: BTreeSet<&SpeciesId> = base.species_set().collect();
    species.extend(reaction.source().species_set());
    species.extend(reaction.target().species_set());
    for s in species {
        let value = BigInt::from(base.coefficient(s))
            + BigInt::from(reaction.target().coefficient(s))
            - BigInt::from(reaction.source().coefficient(s));
        if value < BigInt::ZERO {
            return None;
        }
        let value: BigUint = value.try_into().expect("nonnegative");
        terms.push((s.clone(), value));
    }
    Some(Complex::from_terms(terms))
}

fn random_existing_complex(rng: &mut ChaCha8Rng, network: &Network) -> Complex {
    let complexes: Vec<&Complex> = network.complexes().collect();
    (*pick(rng, &complexes)).clone()
}

fn random_old_species_complex(
    rng: &mut ChaCha8Rng,
    network: &Network,
    params: &GenParams,
) -> Complex {
    random_complex(rng, network.species(), params.max_coefficient)
}

fn candidate_e1(rng: &mut ChaCha8Rng, network: &Network, params: &GenParams) -> EnlargementSpec {
    let reactions: Vec<&Reaction> = network.reactions().collect();
    let choice = rng.random_range(0..3u8);
    let (source, target) = match choice {
        // Two complexes of one linkage class: rank-safe by construction.
        0 => {
            let partition = linkage_classes(network);
            let classes: Vec<_> = partition
                .classes()
                .iter()
                .filter(|class| class.len() >= 2)
                .collect();
            if classes.is_empty() {
                (
                    random_existing_complex(rng, network),
                    random_existing_complex(rng, network),
                )
            } else {
                let class: Vec<&Complex> = pick(rng, &classes).iter().collect();
                ((*pick(rng, &class)).clone(), (*pick(rng, &class)).clone())
            }
        }
        // An existing complex shifted by an existing reaction vector.
        1 => {
            let base = random_existing_complex(rng, network);
            let reaction = *pick(rng, &reactions);
            match shift_by_reaction(&base, reaction) {
                Some(shifted) => (base, shifted),
                None => (
                    random_existing_complex(rng, network),
                    random_existing_complex(rng, network),
                ),
            }
        }
        // Anything over the old species; the validator filters.
        _ => (
            random_old_species_complex(rng, network, params),
            random_old_species_complex(rng, network, params),
        ),
    };
    match Reaction::new(source, target) {
        Ok(reaction) => EnlargementSpec::E1 { reaction },
        Err(_) => EnlargementSpec::E2, // placeholder; rejected upstream
    }
}

fn random_assignment(
    rng: &mut ChaCha8Rng,
    network: &Network,
    allow_empty: bool,
) -> Vec<ReactionAssignment> {
    let reactions: Vec<&Reaction> = network.reactions().collect();
    let balanced = rng.random_bool(0.6);
    let mut assignment: Vec<ReactionAssignment> = Vec::new();
    for reaction in &reactions {
        if !rng.random_bool(0.5) {
            continue;
        }
        let (source_coeff, target_coeff) = if balanced {
            let k = rng.random_range(1..=2u64);
            (k, k)
        } else {
            loop {
                let pair = (rng.random_range(0..=2u64), rng.random_range(0..=2u64));
                if pair != (0, 0) {
                    break pair;
                }
            }
        };
        assignment.push(ReactionAssignment {
            reaction: (*reaction).clone(),
            source_coeff: BigUint::from(source_coeff),
            target_coeff: BigUint::from(target_coeff),
        });
    }
    if assignment.is_empty() && !allow_empty {
        let reaction = *pick(rng, &reactions);
        let k = rng.random_range(1..=2u64);
        assignment.push(ReactionAssignment {
            reaction: reaction.clone(),
            source_coeff: BigUint::from(k),
            target_coeff: BigUint::from(k),
        });
    }
    assignment
}

fn candidate_pairs(
    rng: &mut ChaCha8Rng,
    network: &Network,
    params: &GenParams,
    for_e5_prime: bool,
) -> Vec<(Complex, Complex)> {
    if for_e5_prime && rng.random_bool(0.5) {
        // Old-species pair whose vector is an existing reaction vector, so
        // the column condition usually holds while no new species appear.
        let reactions: Vec<&Reaction> = network.reactions().collect();
        let base = if rng.random_bool(0.5) {
            random_existing_complex(rng, network)
        } else {
            random_old_species_complex(rng, network, params)
        };
        let reaction = *pick(rng, &reactions);
        if let Some(shifted) = shift_by_reaction(&base, reaction) {
            return vec![(base, shifted)];
        }
        return vec![(
            random_old_species_complex(rng, network, params),
            random_old_species_complex(rng, network, params),
        )];
    }

    let m = rng.random_range(1..=2usize);
    let extra = rng.random_range(0..=1usize);
    let fresh = fresh_species(network, m + extra);
    let mut pairs = Vec::new();
    for (k, fresh_k) in fresh.iter().take(m).enumerate() {
        let left = if rng.random_bool(0.5) {
            random_existing_complex(rng, network)
        } else {
            random_old_species_complex(rng, network, params)
        };
        let mut right = left.plus(fresh_k, &BigUint::from(rng.random_range(1..=2u64)));
        if k == 0 && extra > 0 && rng.random_bool(0.5) {
            right = right.plus(&fresh[m], &BigUint::from(1u64));
        }
        pairs.push((left, right));
    }
    pairs
}

fn candidate_e6(rng: &mut ChaCha8Rng, network: &Network) -> EnlargementSpec {
    let reactions: Vec<&Reaction> = network.reactions().collect();
    let m = rng.random_range(1..=reactions.len().min(2));
    let mut indices = BTreeSet::new();
    while indices.len() < m {
        indices.insert(rng.random_range(0..reactions.len()));
    }
    let fresh = fresh_species(network, m + 1);
    let mut splits = Vec::new();
    for (k, index) in indices.into_iter().enumerate() {
        let mut intermediate = Complex::species(fresh[k].clone());
        match rng.random_range(0..4u8) {
            0 => {
                let old = pick(rng, network.species()).clone();
                intermediate = intermediate.plus(&old, &BigUint::from(rng.random_range(1..=2u64)));
            }
            1 if k == 0 => {
                // Extra new species: the i > 0 case.
                intermediate = intermediate.plus(&fresh[m], &BigUint::from(1u64));
            }
            2 => {
                intermediate = Complex::from_terms([(
                    fresh[k].clone(),
                    BigUint::from(rng.random_range(1..=2u64)),
                )]);
            }
            _ => {}
        }
        splits.push((reactions[index].clone(), intermediate));
    }
    EnlargementSpec::E6 { splits }
}

/// Generates a spec of the given kind that passes the corresponding apply
/// preconditions, by bounded rejection sampling. `None` means no valid
/// instance was found within the attempt budget.
pub fn random_spec(
    network: &Network,
    kind: OpKind,
    params: &GenParams,
    trial: u64,
) -> Option<EnlargementSpec> {
    let stream =
        STREAM_SPEC + 10 * (OpKind::ALL.iter().position(|k| *k == kind).unwrap() as u64 + 1);
    let mut rng = trial_rng(params.seed, trial, stream);
    if kind == OpKind::E2 {
        return Some(EnlargementSpec::E2);
    }
    for _ in 0..200 {
        let candidate = match kind {
            OpKind::E1 => candidate_e1(&mut rng, network, params),
            OpKind::E2 => unreachable!(),
            OpKind::E3 => EnlargementSpec::E3 {
                new_species: fresh_species(network, 1).pop().unwrap(),
                assignment: random_assignment(&mut rng, network, false),
            },
            OpKind::E4 => {
                let empty = rng.random_bool(0.12);
                EnlargementSpec::E4 {
                    new_species: fresh_species(network, 1).pop().unwrap(),
                    assignment: if empty {
                        Vec::new()
                    } else {
                        random_assignment(&mut rng, network, true)
                    },
                }
            }
            OpKind::E5 => EnlargementSpec::E5 {
                pairs: candidate_pairs(&mut rng, network, params, false),
            },
            OpKind::E5Prime => EnlargementSpec::E5Prime {
                pairs: candidate_pairs(&mut rng, network, params, true),
            },
            OpKind::E6 => candidate_e6(&mut rng, network),
        };
        if candidate.kind() == kind && apply(network, &candidate).is_ok() {
            return Some(candidate);
        }
    }
    None
}

/// A random reaction not present in the network; sources and targets may be
/// existing complexes, fresh old-species complexes, or involve a new species.
pub fn random_new_reaction(network: &Network, params: &GenParams, trial: u64) -> Reaction {
    let mut rng = trial_rng(params.seed, trial, STREAM_REACTION);
    for _ in 0..200 {
        let endpoint = |rng: &mut ChaCha8Rng| match rng.random_range(0..3u8) {
            0 => random_existing_complex(rng, network),
            1 => random_old_species_complex(rng, network, params),
            _ => {
                let base = random_old_species_complex(rng, network, params);
                base.plus(&fresh_species(network, 1)[0], &BigUint::from(1u64))
            }
        };
        let (source, target) = (endpoint(&mut rng), endpoint(&mut rng));
        if let Ok(reaction) = Reaction::new(source, target) {
            if !network.has_reaction(&reaction) {
                return reaction;
            }
        }
    }
    // Guaranteed fallback: a reaction between two fresh species.
    let fresh = fresh_species(network, 2);
    Reaction::new(
        Complex::species(fresh[0].clone()),
        Complex::species(fresh[1].clone()),
    )
    .expect("distinct species")
}

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

/// Exhaustive circuit-rank oracle: the minimum number of edges to delete so
/// the undirected reaction multigraph becomes a forest, found by trying all
/// edge subsets. `None` when the network exceeds the oracle budget
/// (8 complexes, 12 reactions).
pub fn circuit_rank_brute_force(network: &Network) -> Option<i64> {
    let complexes: Vec<&Complex> = network.complexes().collect();
    let edge_count = network.reaction_count();
    if complexes.len() > 8 || edge_count > 12 {
        return None;
    }
    let index_of = |complex: &Complex| {
        complexes
            .binary_search_by(|probe| probe.cmp(&complex))
            .expect("endpoints are listed")
    };
    let edges: Vec<(usize, usize)> = network
        .reactions()
        .map(|r| (index_of(r.source()), index_of(r.target())))
        .collect();

    let mut best_forest = 0usize;
    for mask in 0u32..(1u32 << edge_count) {
        let mut parent: Vec<usize> = (0..complexes.len()).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut root = x;
            while parent[root] != root {
                root = parent[root];
            }
            root
        }
        let mut kept = 0usize;
        let mut is_forest = true;
        for (i, &(u, v)) in edges.iter().enumerate() {
            if mask & (1 << i) == 0 {
                continue;
            }
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru == rv {
                is_forest = false;
                break;
            }
            parent[ru] = rv;
            kept += 1;
        }
        if is_forest {
            best_forest = best_forest.max(kept);
        }
    }
    Some(edge_count as i64 - best_forest as i64)
}

/// Checks that within every linkage class, complex differences lie in the
/// stoichiometric subspace: each class member minus a fixed base complex is
/// spanned by the reaction vectors (differences of arbitrary pairs follow).
pub fn linkage_subspace_check(network: &Network) -> bool {
    let gamma = stoichiometric_matrix(network);
    for class in linkage_classes(network).classes() {
        let mut members = class.iter();
        let base = members.next().expect("classes are nonempty");
        let diffs: Vec<Vec<BigInt>> = members
            .map(|member| complex_difference(network, member, base))
            .collect();
        if !all_in_column_span(&gamma, &diffs).expect("dimensions match") {
            return false;
        }
    }
    true
}

/// `a - b` in the species coordinates of `network`.
pub fn complex_difference(network: &Network, a: &Complex, b: &Complex) -> Vec<BigInt> {
    network
        .species()
        .iter()
        .map(|s| BigInt::from(a.coefficient(s)) - BigInt::from(b.coefficient(s)))
        .collect()
}

// ---------------------------------------------------------------------------
// Suite
// ---------------------------------------------------------------------------

/// A deliberate off-by-`offset` fault in the expected delta of one kind,
/// used to demonstrate that the suite actually detects wrong formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeltaMutation {
    pub kind: OpKind,
    pub offset: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub params: GenParams,
    pub trials: u64,
    pub kinds: Vec<OpKind>,
    /// When set, the expected delta (or bound, for E5') of the matching kind
    /// is shifted; a healthy implementation must then fail.
    pub mutation: Option<DeltaMutation>,
}

impl SuiteConfig {
    pub fn new(params: GenParams, trials: u64, kinds: &[OpKind]) -> Self {
        SuiteConfig {
            params,
            trials,
            kinds: kinds.to_vec(),
            mutation: None,
        }
    }
}

/// How one trial ended.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    /// No valid spec of the requested kind was found within the attempt
    /// budget; not a failure, but visible in the coverage summary.
    Skipped {
        reason: String,
    },
    Fail {
        invariant: String,
        repro: ReproCase,
    },
}

/// Everything needed to replay a failing trial through the CLI.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReproCase {
    pub network_crn: String,
    pub spec_json: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub trial: u64,
    pub kind: OpKind,
    pub network: String,
    pub spec: Option<Value>,
    pub predicted: Option<String>,
    pub observed: Option<i64>,
    pub verdict: Verdict,
}

/// Pass/fail/skip counts for one kind.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KindSummary {
    pub kind: OpKind,
    pub passed: u64,
    pub failed: u64,
    pub skipped: u64,
}

pub fn summarize(reports: &[TrialReport]) -> Vec<KindSummary> {
    let mut kinds: Vec<OpKind> = reports.iter().map(|r| r.kind).collect();
    kinds.sort();
    kinds.dedup();
    kinds
        .into_iter()
        .map(|kind| {
            let mut summary = KindSummary {
                kind,
                passed: 0,
                failed: 0,
                skipped: 0,
            };
            for report in reports.iter().filter(|r| r.kind == kind) {
                match report.verdict {
                    Verdict::Pass => summary.passed += 1,
                    Verdict::Skipped { .. } => summary.skipped += 1,
                    Verdict::Fail { .. } => summary.failed += 1,
                }
            }
            summary
        })
        .collect()
}

/// Runs `trials` trials of every kind with no fault injection.
pub fn run_suite(params: &GenParams, trials: u64, kinds: &[OpKind]) -> Vec<TrialReport> {
    run_suite_with(&SuiteConfig::new(params.clone(), trials, kinds))
}

/// Runs the suite with full control, including fault injection.
pub fn run_suite_with(config: &SuiteConfig) -> Vec<TrialReport> {
    let mut reports = Vec::new();
    for trial in 0..config.trials {
        for &kind in &config.kinds {
            reports.push(run_trial(config, trial, kind));
        }
    }
    reports
}

struct TrialContext<'a> {
    network: &'a Network,
    spec: Option<&'a EnlargementSpec>,
}

impl TrialContext<'_> {
    fn repro(&self) -> ReproCase {
        ReproCase {
            network_crn: serialize_crn(self.network),
            spec_json: match self.spec {
                Some(spec) => serde_json::to_string(&script_to_json(std::slice::from_ref(spec)))
                    .expect("spec serializes"),
                None => "[]".to_string(),
            },
        }
    }

    fn fail(&self, invariant: &str) -> Verdict {
        Verdict::Fail {
            invariant: invariant.to_string(),
            repro: self.repro(),
        }
    }
}

fn network_invariants(network: &Network, metrics: &NetworkMetrics) -> Result<(), String> {
    if !validate(network).is_empty() {
        return Err("network-validate".into());
    }
    if metrics.deficiency < 0 {
        return Err("deficiency-nonnegative".into());
    }
    if metrics.cyclomatic < 0 {
        return Err("cyclomatic-nonnegative".into());
    }
    if let Some(oracle) = circuit_rank_brute_force(network) {
        if oracle != metrics.cyclomatic {
            return Err("circuit-rank-oracle".into());
        }
    }
    if rank_cross_check(network).is_err() {
        return Err("rank-oracle-agreement".into());
    }
    if !linkage_subspace_check(network) {
        return Err("linkage-subspace".into());
    }
    Ok(())
}

fn rank_cross_check(network: &Network) -> Result<usize, ()> {
    let gamma = stoichiometric_matrix(network);
    let a = crate::exactla::rank(&gamma);
    let b = crate::exactla::rank_oracle(&gamma);
    if a == b {
        Ok(a)
    } else {
        Err(())
    }
}

fn kind_specific_checks(
    kind: OpKind,
    network: &Network,
    spec: &EnlargementSpec,
    result: &EnlargementResult,
) -> Result<(), String> {
    let b = &result.breakdown;
    match kind {
        OpKind::E1 => {
            if !(result.observed_delta == 0 || result.observed_delta == 1) {
                return Err("e1-delta-range".into());
            }
        }
        OpKind::E2 => {
            // All inflow-outflows present, so the rank saturates the species
            // count.
            if result.metrics_after.rank != result.metrics_after.species {
                return Err("e2-full-rank".into());
            }
        }
        OpKind::E3 => {
            if b.reactions != 0
                || result.observed_delta != -b.cyclomatic
                || b.linkage_classes > b.complexes
            {
                return Err("e3-decomposition".into());
            }
        }
        OpKind::E4 => {
            if b.reactions != 2
                || b.rank != 1
                || result.observed_delta != -b.cyclomatic + 1
                || b.linkage_classes + 1 > b.complexes
            {
                return Err("e4-decomposition".into());
            }
        }
        OpKind::E5 => {
            if one_column_rank_mismatch(network, spec, &result.enlarged) {
                return Err("e5-rank-equivalence".into());
            }
            // Every E5 instance is also a valid E5' instance with delta 0.
            let EnlargementSpec::E5 { pairs } = spec else {
                return Err("e5-spec-shape".into());
            };
            match crate::enlarge::apply_e5_prime(network, pairs) {
                Ok(prime) if prime.observed_delta == 0 => {}
                _ => return Err("e5-subset-of-e5prime".into()),
            }
        }
        OpKind::E5Prime => {
            if result.observed_delta < 0 {
                return Err("e5prime-monotonicity".into());
            }
            let EnlargementSpec::E5Prime { pairs } = spec else {
                return Err("e5prime-spec-shape".into());
            };
            if column_condition_rank_mismatch(pairs, &result.enlarged) {
                return Err("e5prime-rank-equivalence".into());
            }
        }
        OpKind::E6 => {
            let EnlargementSpec::E6 { splits } = spec else {
                return Err("e6-spec-shape".into());
            };
            let m = splits.len() as i64;
            if b.complexes != m || b.linkage_classes != 0 || b.rank != m {
                return Err("e6-decomposition".into());
            }
            // Claim check: the intermediates are distinct and each involves
            // at least one new species.
            let mut seen = BTreeSet::new();
            for (_, intermediate) in splits {
                if !seen.insert(intermediate.clone()) {
                    return Err("e6-intermediates-distinct".into());
                }
                if !intermediate.species_set().any(|s| !network.has_species(s)) {
                    return Err("e6-intermediate-new-species".into());
                }
            }
        }
    }
    Ok(())
}

/// For E5: the rank condition computed on one column per pair must agree
/// with the rank of the new-species rows over the full enlarged matrix,
/// where each pair contributes both directions.
fn one_column_rank_mismatch(network: &Network, spec: &EnlargementSpec, enlarged: &Network) -> bool {
    let EnlargementSpec::E5 { pairs } = spec else {
        return true;
    };
    let gamma = stoichiometric_matrix(enlarged);
    let new_rows: Vec<usize> = enlarged
        .species()
        .iter()
        .enumerate()
        .filter(|(_, s)| !network.has_species(s))
        .map(|(i, _)| i)
        .collect();
    let all_cols: Vec<usize> = (0..gamma.cols()).collect();
    let two_column = submatrix(&gamma, &new_rows, &all_cols).expect("indices in range");

    let one_column_cols: Vec<Vec<BigInt>> = pairs
        .iter()
        .map(|(left, right)| {
            new_rows
                .iter()
                .map(|&row| {
                    let s = &enlarged.species()[row];
                    BigInt::from(right.coefficient(s)) - BigInt::from(left.coefficient(s))
                })
                .collect()
        })
        .collect();
    let mut one_column = IntMatrix::zeros(new_rows.len(), pairs.len());
    for (c, column) in one_column_cols.iter().enumerate() {
        for (r, value) in column.iter().enumerate() {
            one_column.set(r, c, value.clone());
        }
    }
    rank(&two_column) != rank(&one_column)
}

/// For E5': the column rank condition computed on one column per pair must
/// agree with the rank over both directions of every pair.
fn column_condition_rank_mismatch(pairs: &[(Complex, Complex)], enlarged: &Network) -> bool {
    let columns = |directions: bool| -> IntMatrix {
        let mut vectors: Vec<Vec<BigInt>> = Vec::new();
        for (left, right) in pairs {
            let forward = complex_difference(enlarged, right, left);
            if directions {
                vectors.push(forward.iter().map(|v| -v).collect());
            }
            vectors.push(forward);
        }
        let mut matrix = IntMatrix::zeros(enlarged.species_count(), vectors.len());
        for (c, column) in vectors.iter().enumerate() {
            for (r, value) in column.iter().enumerate() {
                matrix.set(r, c, value.clone());
            }
        }
        matrix
    };
    rank(&columns(false)) != rank(&columns(true))
}

fn run_trial(config: &SuiteConfig, trial: u64, kind: OpKind) -> TrialReport {
    let network = random_network(&config.params, trial);
    let network_text = serialize_crn(&network);
    let metrics = compute_metrics(&network);

    let context = TrialContext {
        network: &network,
        spec: None,
    };
    if let Err(invariant) = network_invariants(&network, &metrics) {
        return TrialReport {
            trial,
            kind,
            network: network_text,
            spec: None,
            predicted: None,
            observed: None,
            verdict: context.fail(&invariant),
        };
    }

    let Some(spec) = random_spec(&network, kind, &config.params, trial) else {
        return TrialReport {
            trial,
            kind,
            network: network_text,
            spec: None,
            predicted: None,
            observed: None,
            verdict: Verdict::Skipped {
                reason: "no valid instance found within the attempt budget".into(),
            },
        };
    };
    let spec_json = spec_to_json(&spec);
    let context = TrialContext {
        network: &network,
        spec: Some(&spec),
    };

    let report = |predicted: Option<String>, observed: Option<i64>, verdict: Verdict| TrialReport {
        trial,
        kind,
        network: network_text.clone(),
        spec: Some(spec_json.clone()),
        predicted,
        observed,
        verdict,
    };

    let prediction = match predict_delta(&network, &spec) {
        Ok(p) => p,
        Err(_) => return report(None, None, context.fail("spec-validation")),
    };
    let result = match apply(&network, &spec) {
        Ok(r) => r,
        Err(_) => return report(Some(prediction.to_string()), None, context.fail("apply")),
    };
    let observed = result.observed_delta;

    // The expectation the suite enforces; fault injection shifts it here.
    let (expected_exact, expected_bound) = match prediction {
        Prediction::Exact(value) => (Some(value), None),
        Prediction::NonnegativeUnbounded => (None, Some(0i64)),
    };
    let offset = match config.mutation {
        Some(mutation) if mutation.kind == kind => mutation.offset,
        _ => 0,
    };
    let predicted_text = Some(prediction.to_string());

    if let Some(expected) = expected_exact {
        if observed != expected + offset {
            return report(
                predicted_text,
                Some(observed),
                context.fail("delta-formula"),
            );
        }
    }
    if let Some(bound) = expected_bound {
        if observed < bound + offset {
            return report(
                predicted_text,
                Some(observed),
                context.fail("delta-monotonicity"),
            );
        }
    }
    if observed < 0 {
        return report(
            predicted_text,
            Some(observed),
            context.fail("delta-monotonicity"),
        );
    }

    if let Err(invariant) = kind_specific_checks(kind, &network, &spec, &result) {
        return report(predicted_text, Some(observed), context.fail(&invariant));
    }
    if let Err(invariant) = network_invariants(&result.enlarged, &result.metrics_after) {
        return report(
            predicted_text,
            Some(observed),
            context.fail(&format!("enlarged-{invariant}")),
        );
    }

    report(predicted_text, Some(observed), Verdict::Pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        let params = GenParams::default();
        assert_eq!(random_network(&params, 0), random_network(&params, 0));
        assert_ne!(random_network(&params, 0), random_network(&params, 1));
    }

    #[test]
    fn generated_networks_validate_and_respect_bounds() {
        let params = GenParams::default();
        for trial in 0..200 {
            let network = random_network(&params, trial);
            assert!(validate(&network).is_empty(), "trial {trial}");
            assert!(network.species_count() <= params.max_species);
            assert!(network.complex_count() <= params.max_complexes);
            assert!(network.reaction_count() <= params.max_reactions);
        }
    }

    #[test]
    fn single_reaction_bound_forces_single_reactions() {
        let params = GenParams {
            max_reactions: 1,
            ..GenParams::default()
        };
        for trial in 0..20 {
            assert_eq!(random_network(&params, trial).reaction_count(), 1);
        }
    }

    #[test]
    fn e6_specs_always_constructible() {
        let params = GenParams::default();
        let network = crate::textio::parse_crn("A -> B").unwrap();
        let spec = random_spec(&network, OpKind::E6, &params, 0).expect("a split always exists");
        assert!(matches!(spec, EnlargementSpec::E6 { .. }));
    }

    #[test]
    fn e2_specs_always_available() {
        let params = GenParams::default();
        let network = random_network(&params, 3);
        assert_eq!(
            random_spec(&network, OpKind::E2, &params, 3),
            Some(EnlargementSpec::E2)
        );
    }

    #[test]
    fn suite_smoke_run_passes() {
        let params = GenParams::default();
        let reports = run_suite(&params, 25, &OpKind::ALL);
        assert_eq!(reports.len(), 25 * 7);
        for report in &reports {
            assert!(
                !matches!(report.verdict, Verdict::Fail { .. }),
                "trial {} kind {} failed: {:?}",
                report.trial,
                report.kind,
                report.verdict
            );
        }
        // Starvation stays visible in the summary rather than failing.
        let summary = summarize(&reports);
        assert_eq!(summary.len(), 7);
    }

    #[test]
    fn suite_replay_is_byte_identical() {
        let params = GenParams::with_seed(42);
        let a = serde_json::to_string(&run_suite(&params, 10, &OpKind::ALL)).unwrap();
        let b = serde_json::to_string(&run_suite(&params, 10, &OpKind::ALL)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn injected_mutation_is_detected() {
        let mut config = SuiteConfig::new(GenParams::default(), 40, &[OpKind::E6]);
        config.mutation = Some(DeltaMutation {
            kind: OpKind::E6,
            offset: 1,
        });
        let reports = run_suite_with(&config);
        let failures = reports
            .iter()
            .filter(|r| matches!(r.verdict, Verdict::Fail { .. }))
            .count();
        let applied = reports
            .iter()
            .filter(|r| !matches!(r.verdict, Verdict::Skipped { .. }))
            .count();
        assert_eq!(failures, applied, "every applied E6 trial must fail");
        assert!(failures > 0);
    }

    #[test]
    fn circuit_rank_oracle_matches_formula_on_goldens() {
        let reversible = crate::textio::parse_crn("A <-> B").unwrap();
        assert_eq!(circuit_rank_brute_force(&reversible), Some(1));
        let chain = crate::textio::parse_crn("A -> B -> C").unwrap();
        assert_eq!(circuit_rank_brute_force(&chain), Some(0));
        let triangle = crate::textio::parse_crn("A <-> B\nB <-> C\nC <-> A").unwrap();
        assert_eq!(circuit_rank_brute_force(&triangle), Some(4));
    }
}
