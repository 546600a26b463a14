//! Property tests for the exact linear algebra and the text formats.

use num_bigint::BigInt;
use proptest::prelude::*;

use crnkit::exactla::{in_column_span, rank, rank_oracle, IntMatrix};
use crnkit::fuzz::{random_network, GenParams};
use crnkit::textio::{json_to_network, network_to_json, parse_crn, serialize_crn};

fn matrix_strategy(
    rows: std::ops::RangeInclusive<usize>,
    cols: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (rows, cols).prop_flat_map(|(r, c)| {
        proptest::collection::vec(proptest::collection::vec(-5i64..=5, c), r)
    })
}

fn to_matrix(rows: &[Vec<i64>]) -> IntMatrix {
    let slices: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
    IntMatrix::from_rows(&slices)
}

proptest! {
    // The two structurally different rank routes agree everywhere.
    #[test]
    fn rank_matches_oracle(rows in matrix_strategy(1..=6, 1..=8)) {
        let m = to_matrix(&rows);
        prop_assert_eq!(rank(&m), rank_oracle(&m));
    }

    #[test]
    fn rank_is_permutation_and_negation_invariant(
        rows in matrix_strategy(2..=5, 2..=6),
        row_perm_seed in any::<u64>(),
    ) {
        let m = to_matrix(&rows);
        let base = rank(&m);

        // Deterministic pseudo-shuffle of rows and columns from the seed.
        let mut permuted = rows.clone();
        let n = permuted.len();
        for i in 0..n {
            let j = (row_perm_seed as usize).wrapping_mul(31).wrapping_add(i * 7) % n;
            permuted.swap(i, j);
        }
        let cols = permuted[0].len();
        for c in 0..cols {
            let swap_with = (row_perm_seed as usize).wrapping_add(c * 13) % cols;
            for row in permuted.iter_mut() {
                row.swap(c, swap_with);
            }
        }
        // Negate a column as well; spans are unchanged.
        let negate = (row_perm_seed as usize) % cols;
        for row in permuted.iter_mut() {
            row[negate] = -row[negate];
        }
        prop_assert_eq!(rank(&to_matrix(&permuted)), base);
    }

    // rank(C) = v forces rank([[A, B], [0, C]]) = rank(A) + v.
    #[test]
    fn block_upper_triangular_rank(
        a_rows in matrix_strategy(1..=4, 1..=4),
        c_cols in 1usize..=3,
        seed in any::<i64>(),
    ) {
        let p = a_rows.len();
        let u = a_rows[0].len();
        let v = c_cols;
        let q = v + 1;
        // A deterministic C with full column rank: identity stacked on a
        // dense row derived from the seed.
        let mut c = vec![vec![0i64; v]; q];
        for (i, row) in c.iter_mut().enumerate().take(v) {
            row[i] = 1;
        }
        for (j, value) in c[v].iter_mut().enumerate() {
            *value = (seed.wrapping_add(j as i64)) % 5;
        }
        let b: Vec<Vec<i64>> = (0..p)
            .map(|i| (0..v).map(|j| (seed.wrapping_mul(3).wrapping_add((i * v + j) as i64)) % 5).collect())
            .collect();

        let mut assembled: Vec<Vec<i64>> = Vec::new();
        for i in 0..p {
            let mut row = a_rows[i].clone();
            row.extend(&b[i]);
            assembled.push(row);
        }
        for c_row in &c {
            let mut row = vec![0i64; u];
            row.extend(c_row);
            assembled.push(row);
        }

        let c_matrix = to_matrix(&c);
        prop_assert_eq!(rank(&c_matrix), v);
        prop_assert_eq!(
            rank(&to_matrix(&assembled)),
            rank(&to_matrix(&a_rows)) + v
        );
    }

    // Low-rank products force pivot-column skips in the elimination; the
    // fraction-free route must stay exact and agree with the oracle there.
    #[test]
    fn rank_of_low_rank_products(
        left in matrix_strategy(3..=6, 1..=2),
        right in matrix_strategy(1..=2, 4..=8),
    ) {
        let inner = left[0].len().min(right.len());
        let product: Vec<Vec<i64>> = left
            .iter()
            .map(|row| {
                (0..right[0].len())
                    .map(|c| (0..inner).map(|k| row[k] * right[k][c]).sum())
                    .collect()
            })
            .collect();
        let m = to_matrix(&product);
        let r = rank(&m);
        prop_assert_eq!(r, rank_oracle(&m));
        prop_assert!(r <= inner);
    }

    // A vector assembled from the columns is always inside the span.
    #[test]
    fn matrix_times_vector_is_in_span(
        rows in matrix_strategy(1..=5, 1..=6),
        coeffs in proptest::collection::vec(-3i64..=3, 6),
    ) {
        let m = to_matrix(&rows);
        let product: Vec<BigInt> = (0..m.rows())
            .map(|r| {
                (0..m.cols())
                    .map(|c| m.entry(r, c) * BigInt::from(coeffs[c]))
                    .sum()
            })
            .collect();
        prop_assert!(in_column_span(&m, &product).unwrap());
    }

    // Text and JSON round-trips are the identity on generated networks.
    #[test]
    fn crn_round_trip(seed in any::<u64>(), trial in 0u64..50) {
        let network = random_network(&GenParams::with_seed(seed), trial);
        prop_assert_eq!(&parse_crn(&serialize_crn(&network)).unwrap(), &network);
    }

    #[test]
    fn json_round_trip(seed in any::<u64>(), trial in 0u64..50) {
        let network = random_network(&GenParams::with_seed(seed), trial);
        prop_assert_eq!(&json_to_network(&network_to_json(&network)).unwrap(), &network);
    }

    // Arbitrary input never panics the parser, and whatever it accepts is a
    // valid network that round-trips.
    #[test]
    fn parser_is_total_on_arbitrary_text(
        chars in proptest::collection::vec(
            proptest::sample::select(&[
                'A', 'B', '0', '1', ' ', '+', '-', '>', '<', '#', '\n', '\t', '_', 'x', '9', '$',
            ][..]),
            0..40,
        ),
    ) {
        let text: String = chars.into_iter().collect();
        if let Ok(network) = parse_crn(&text) {
            prop_assert!(crnkit::validate(&network).is_empty());
            prop_assert_eq!(&parse_crn(&serialize_crn(&network)).unwrap(), &network);
        }
    }

    // Statement order and extra spaces do not change the parsed network.
    #[test]
    fn parse_is_line_order_and_whitespace_insensitive(
        seed in any::<u64>(),
        trial in 0u64..50,
        pad in 1usize..=3,
    ) {
        let network = random_network(&GenParams::with_seed(seed), trial);
        let text = serialize_crn(&network);
        let mut lines: Vec<&str> = text.lines().collect();
        lines.reverse();
        let padded = lines.join("\n").replace(' ', &" ".repeat(pad));
        prop_assert_eq!(&parse_crn(&padded).unwrap(), &network);
    }
}
