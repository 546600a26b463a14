//! Heavier randomized campaigns than the acceptance gate; run on demand with
//! `cargo test -p crnkit --test stress -- --ignored`.

use crnkit::enlarge::OpKind;
use crnkit::fuzz::{run_suite, GenParams, Verdict};

#[test]
#[ignore = "heavy; several minutes in debug builds"]
fn wide_parameter_sweep_stays_clean() {
    for (seed, species, complexes, reactions, coeff) in [
        (1u64, 8usize, 8usize, 12usize, 9u64),
        (0xFACE, 6, 8, 12, 5),
        (77, 3, 4, 5, 2),
        (0xA11CE, 8, 8, 12, 3),
    ] {
        let params = GenParams {
            seed,
            max_species: species,
            max_complexes: complexes,
            max_reactions: reactions,
            max_coefficient: coeff,
        };
        let reports = run_suite(&params, 2000, &OpKind::ALL);
        let failure = reports
            .iter()
            .find(|r| matches!(r.verdict, Verdict::Fail { .. }));
        assert!(
            failure.is_none(),
            "seed {seed:#x}: first failure {failure:?}"
        );
    }
}
