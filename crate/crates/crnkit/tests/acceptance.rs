//! Acceptance suite: the six release criteria, each as one test that prints
//! a single PASS line. Every expectation is an exact integer identity.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use num_bigint::BigInt;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crnkit::enlarge::{
    add_single_reaction, apply_e1, apply_e2, apply_e3, apply_e4, apply_e5, apply_e5_prime,
    apply_e6, EnlargeError, OpKind, ReactionAssignment,
};
use crnkit::exactla::{
    in_column_span, rank, rank_oracle, stoichiometric_matrix, submatrix, IntMatrix,
};
use crnkit::fuzz::{
    circuit_rank_brute_force, complex_difference, random_network, random_new_reaction, run_suite,
    run_suite_with, summarize, DeltaMutation, GenParams, SuiteConfig, Verdict,
};
use crnkit::metrics::{compute_metrics, linkage_classes};
use crnkit::model::SpeciesId;
use crnkit::textio::{
    json_to_network, network_to_json, parse_complex, parse_crn, parse_reaction, serialize_crn,
};

fn assignment(reaction: &str, source: u64, target: u64) -> ReactionAssignment {
    ReactionAssignment {
        reaction: parse_reaction(reaction).unwrap(),
        source_coeff: source.into(),
        target_coeff: target.into(),
    }
}

fn pair(left: &str, right: &str) -> (crnkit::Complex, crnkit::Complex) {
    (parse_complex(left).unwrap(), parse_complex(right).unwrap())
}

/// Criterion 1: the library reproduces every printed value of the worked
/// examples, exactly.
#[test]
fn criterion_1_golden_examples() {
    // Running example: rank 2, deficiency 0, cyclomatic 0.
    let running = parse_crn("2A -> A + 2B -> 2A + 2B").unwrap();
    let m = compute_metrics(&running);
    assert_eq!((m.species, m.complexes, m.reactions), (2, 3, 2));
    assert_eq!((m.rank, m.deficiency, m.cyclomatic), (2, 0, 0));
    assert_eq!(
        (m.missing_unimolecular, m.classes_with_unimolecular),
        (3, 0)
    );
    // The variant starting from a bare A pins the printed matrix columns.
    let variant = parse_crn("A -> A + 2B -> 2A + 2B").unwrap();
    assert_eq!(
        stoichiometric_matrix(&variant),
        IntMatrix::from_rows(&[&[0, 1], &[2, 0]])
    );

    // E1: deficiency 0 -> 1.
    let e1 = apply_e1(&running, &parse_reaction("2A + 2B -> 3A + 3B").unwrap()).unwrap();
    assert_eq!(e1.metrics_before.deficiency, 0);
    assert_eq!(e1.metrics_after.deficiency, 1);

    // Reversibilization: deficiency 0 -> 0.
    let one_way = parse_crn("A + B -> 2A").unwrap();
    let reversed = apply_e1(&one_way, &parse_reaction("2A -> A + B").unwrap()).unwrap();
    assert_eq!(reversed.metrics_before.deficiency, 0);
    assert_eq!(reversed.metrics_after.deficiency, 0);

    // E2: deficiency 0 -> 2 and the closed form 3 - 4 + 2 + 2 - 1 = 2.
    let funnel = parse_crn("A -> 2C\nC -> 2D\nC -> B").unwrap();
    let before = compute_metrics(&funnel);
    assert_eq!(
        (before.complexes, before.linkage_classes, before.rank),
        (5, 2, 3)
    );
    assert_eq!(before.deficiency, 0);
    assert_eq!(
        (
            before.missing_unimolecular,
            before.classes_with_unimolecular
        ),
        (2, 2)
    );
    let formula = before.rank as i64 - before.species as i64
        + before.missing_unimolecular as i64
        + before.classes_with_unimolecular as i64
        - 1;
    assert_eq!(formula, 2);
    let e2 = apply_e2(&funnel).unwrap();
    assert_eq!(e2.observed_delta, 2);
    assert_eq!(e2.metrics_after.deficiency, 2);
    assert_eq!(
        (
            e2.metrics_after.complexes,
            e2.metrics_after.linkage_classes,
            e2.metrics_after.rank
        ),
        (7, 1, 4)
    );

    // E3 on the bidirectional triangle: deficiency 0 -> 2, cyclomatic 4 -> 2.
    let triangle = parse_crn("A <-> B\nB <-> C\nC <-> A").unwrap();
    let e3 = apply_e3(
        &triangle,
        &SpeciesId::new("D").unwrap(),
        &[
            assignment("B -> A", 1, 1),
            assignment("C -> B", 1, 1),
            assignment("A -> C", 1, 1),
        ],
    )
    .unwrap();
    assert_eq!(e3.metrics_before.deficiency, 0);
    assert_eq!(e3.metrics_after.deficiency, 2);
    assert_eq!(e3.metrics_before.cyclomatic, 4);
    assert_eq!(e3.metrics_after.cyclomatic, 2);

    // E4: deficiency 0 -> 1, cyclomatic 1 -> 1.
    let reversible = parse_crn("A <-> B").unwrap();
    let e4 = apply_e4(
        &reversible,
        &SpeciesId::new("C").unwrap(),
        &[assignment("A -> B", 0, 1)],
    )
    .unwrap();
    assert_eq!(e4.metrics_before.deficiency, 0);
    assert_eq!(e4.metrics_after.deficiency, 1);
    assert_eq!(e4.metrics_before.cyclomatic, 1);
    assert_eq!(e4.metrics_after.cyclomatic, 1);

    // E5: deficiency 1 -> 1, and the new-species rows form a rank-2
    // submatrix of the enlarged stoichiometric matrix.
    let base = parse_crn("A -> B\n2B -> 2A").unwrap();
    let e5 = apply_e5(&base, &[pair("B", "C + D"), pair("2A", "D + E")]).unwrap();
    assert_eq!(e5.metrics_before.deficiency, 1);
    assert_eq!(e5.metrics_after.deficiency, 1);
    let gamma = stoichiometric_matrix(&e5.enlarged);
    let new_rows: Vec<usize> = e5
        .enlarged
        .species()
        .iter()
        .enumerate()
        .filter(|(_, s)| !base.has_species(s))
        .map(|(i, _)| i)
        .collect();
    assert_eq!(new_rows.len(), 3);
    let all_cols: Vec<usize> = (0..gamma.cols()).collect();
    assert_eq!(rank(&submatrix(&gamma, &new_rows, &all_cols).unwrap()), 2);
    assert_eq!(e5.metrics_after.rank, 3);

    // E6: rank 1 -> 3, deficiency 1 -> 1, new-species rows rank 2.
    let split_base = parse_crn("2A -> A + B\n2B -> A + B").unwrap();
    assert_eq!(
        stoichiometric_matrix(&split_base),
        IntMatrix::from_rows(&[&[-1, 1], &[1, -1]])
    );
    let e6 = apply_e6(
        &split_base,
        &[
            (
                parse_reaction("2A -> A + B").unwrap(),
                parse_complex("A + C").unwrap(),
            ),
            (
                parse_reaction("2B -> A + B").unwrap(),
                parse_complex("2C + D").unwrap(),
            ),
        ],
    )
    .unwrap();
    assert_eq!(e6.metrics_before.rank, 1);
    assert_eq!(e6.metrics_after.rank, 3);
    assert_eq!(e6.metrics_before.deficiency, 1);
    assert_eq!(e6.metrics_after.deficiency, 1);
    let gamma = stoichiometric_matrix(&e6.enlarged);
    let new_rows: Vec<usize> = e6
        .enlarged
        .species()
        .iter()
        .enumerate()
        .filter(|(_, s)| !split_base.has_species(s))
        .map(|(i, _)| i)
        .collect();
    assert_eq!(new_rows.len(), 2);
    let all_cols: Vec<usize> = (0..gamma.cols()).collect();
    assert_eq!(rank(&submatrix(&gamma, &new_rows, &all_cols).unwrap()), 2);

    println!("ACCEPTANCE 1 golden examples: PASS");
}

/// Criterion 2: per-theorem fuzz suites, 1000 trials per kind, plus 2000
/// single-reaction additions, all exact.
#[test]
fn criterion_2_per_theorem_fuzz() {
    let params = GenParams::default();
    let reports = run_suite(&params, 1000, &OpKind::ALL);
    let failures: Vec<_> = reports
        .iter()
        .filter(|r| matches!(r.verdict, Verdict::Fail { .. }))
        .collect();
    assert!(
        failures.is_empty(),
        "unexpected failures: {:?}",
        failures.first()
    );
    for summary in summarize(&reports) {
        assert!(
            summary.passed >= 950,
            "kind {} passed only {} of 1000 trials",
            summary.kind,
            summary.passed
        );
    }

    // Single-reaction additions keep the delta in {0, 1}; the complex and
    // linkage-class bookkeeping is checked inside add_single_reaction.
    for trial in 0..2000u64 {
        let network = random_network(&params, trial);
        let reaction = random_new_reaction(&network, &params, trial);
        let result = add_single_reaction(&network, &reaction)
            .unwrap_or_else(|e| panic!("trial {trial}: {e}"));
        assert!(
            result.observed_delta == 0 || result.observed_delta == 1,
            "trial {trial}: delta {}",
            result.observed_delta
        );
    }

    println!("ACCEPTANCE 2 per-theorem fuzz (7x1000 trials + 2000 additions): PASS");
}

/// Criterion 3: independent oracles agree with the implementation.
#[test]
fn criterion_3_oracle_cross_checks() {
    // Dual rank routes on 1000 random matrices.
    let mut rng = ChaCha8Rng::seed_from_u64(0x0DD5);
    for _ in 0..1000 {
        let rows = rng.random_range(1..=6);
        let cols = rng.random_range(1..=8);
        let mut matrix = IntMatrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                matrix.set(r, c, BigInt::from(rng.random_range(-5i64..=5)));
            }
        }
        assert_eq!(rank(&matrix), rank_oracle(&matrix));
    }

    let params = GenParams::default();

    // Rank agreement, circuit-rank brute force, and the one-column-per-pair
    // equivalence run on every trial inside the suite; a clean E5/E5' run
    // certifies them on those instances.
    let reports = run_suite(&params, 300, &[OpKind::E5, OpKind::E5Prime]);
    assert!(
        reports
            .iter()
            .all(|r| !matches!(r.verdict, Verdict::Fail { .. })),
        "E5/E5' oracle checks failed"
    );

    // Circuit rank equals the exhaustive minimum-edge-removal count on
    // every generated network (defaults keep them inside the oracle budget).
    for trial in 0..500u64 {
        let network = random_network(&params, trial);
        let metrics = compute_metrics(&network);
        let oracle = circuit_rank_brute_force(&network)
            .expect("default bounds stay within the oracle budget");
        assert_eq!(metrics.cyclomatic, oracle, "trial {trial}");
    }

    // Same-class complex differences lie in the stoichiometric subspace,
    // for every pair in 500 generated networks.
    for trial in 0..500u64 {
        let network = random_network(&params, trial);
        let gamma = stoichiometric_matrix(&network);
        for class in linkage_classes(&network).classes() {
            let members: Vec<_> = class.iter().collect();
            for a in &members {
                for b in &members {
                    let diff = complex_difference(&network, a, b);
                    assert!(
                        in_column_span(&gamma, &diff).unwrap(),
                        "trial {trial}: {} - {} left the subspace",
                        a.canonical_text(),
                        b.canonical_text()
                    );
                }
            }
        }
    }

    println!("ACCEPTANCE 3 oracle cross-checks: PASS");
}

/// Criterion 4: the pair (C, A + C) on {A -> B, 2A + B -> 3A} separates E5
/// from E5'.
#[test]
fn criterion_4_e5_discriminator() {
    let network = parse_crn("A -> B\n2A + B -> 3A").unwrap();
    let pairs = [pair("C", "A + C")];
    assert_eq!(
        apply_e5(&network, &pairs),
        Err(EnlargeError::RankConditionFailed {
            actual: 0,
            required: 1
        })
    );
    let accepted = apply_e5_prime(&network, &pairs).unwrap();
    assert!(accepted.observed_delta >= 0);
    assert_eq!(accepted.observed_delta, 0);
    println!("ACCEPTANCE 4 E5 vs E5' discriminator: PASS");
}

/// Criterion 5: a wrong delta formula in any operation is caught within 100
/// trials of that kind.
#[test]
fn criterion_5_harness_sensitivity() {
    for kind in OpKind::ALL {
        let mut config = SuiteConfig::new(GenParams::default(), 100, &[kind]);
        config.mutation = Some(DeltaMutation { kind, offset: 1 });
        let reports = run_suite_with(&config);
        let caught = reports.iter().any(|r| {
            matches!(
                &r.verdict,
                Verdict::Fail { invariant, .. }
                    if invariant == "delta-formula" || invariant == "delta-monotonicity"
            )
        });
        assert!(caught, "mutant in {kind} escaped 100 trials");
    }
    println!("ACCEPTANCE 5 harness sensitivity (7 mutants): PASS");
}

/// Criterion 6: round-trips are the identity and suite runs are bytewise
/// reproducible.
#[test]
fn criterion_6_round_trip_and_determinism() {
    let params = GenParams::default();
    for trial in 0..1000u64 {
        let network = random_network(&params, trial);
        assert_eq!(parse_crn(&serialize_crn(&network)).unwrap(), network);
        assert_eq!(
            json_to_network(&network_to_json(&network)).unwrap(),
            network
        );
    }

    let first = serde_json::to_string(&run_suite(&params, 100, &OpKind::ALL)).unwrap();
    let second = serde_json::to_string(&run_suite(&params, 100, &OpKind::ALL)).unwrap();
    assert_eq!(first, second, "suite reports must be byte-identical");

    println!("ACCEPTANCE 6 round-trips and determinism: PASS");
}
