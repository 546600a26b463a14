//! Exact integer linear algebra over arbitrary-precision integers.
//!
//! Everything here is exact: ranks are computed by fraction-free (Bareiss)
//! elimination over `BigInt`, with an independent rational Gauss-Jordan
//! oracle ([`rank_oracle`]) used to cross-check it. No floating point is
//! involved anywhere, since the downstream invariants are exact integer
//! identities that rounding would destroy.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::model::Network;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinAlgError {
    #[error("vector length {vector} does not match matrix row count {rows}")]
    DimensionMismatch { rows: usize, vector: usize },
    #[error("index {index} out of range for {axis} of size {size}")]
    IndexOutOfRange {
        axis: &'static str,
        index: usize,
        size: usize,
    },
    #[error("duplicate {axis} index {index}")]
    DuplicateIndex { axis: &'static str, index: usize },
}

/// A dense row-major matrix of arbitrary-precision integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    /// Zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    /// Builds a matrix from rows of machine integers (test convenience).
    pub fn from_rows(rows: &[&[i64]]) -> Self {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == width), "ragged rows");
        IntMatrix {
            rows: height,
            cols: width,
            entries: rows
                .iter()
                .flat_map(|r| r.iter().map(|&x| BigInt::from(x)))
                .collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, row: usize, col: usize) -> &BigInt {
        &self.entries[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: BigInt) {
        self.entries[row * self.cols + col] = value;
    }

    pub fn column(&self, col: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self.entry(r, col).clone()).collect()
    }

    /// This matrix with extra columns appended on the right.
    pub fn augment_columns(&self, columns: &[Vec<BigInt>]) -> Result<IntMatrix, LinAlgError> {
        for column in columns {
            if column.len() != self.rows {
                return Err(LinAlgError::DimensionMismatch {
                    rows: self.rows,
                    vector: column.len(),
                });
            }
        }
        let mut out = IntMatrix::zeros(self.rows, self.cols + columns.len());
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.entry(r, c).clone());
            }
            for (k, column) in columns.iter().enumerate() {
                out.set(r, self.cols + k, column[r].clone());
            }
        }
        Ok(out)
    }
}

/// The submatrix selected by the given row and column indices, in the given
/// order. Indices must be in range and duplicate-free; empty selections give
/// a 0-sized matrix.
pub fn submatrix(
    matrix: &IntMatrix,
    row_indices: &[usize],
    col_indices: &[usize],
) -> Result<IntMatrix, LinAlgError> {
    check_indices(row_indices, matrix.rows(), "row")?;
    check_indices(col_indices, matrix.cols(), "column")?;
    let mut out = IntMatrix::zeros(row_indices.len(), col_indices.len());
    for (i, &r) in row_indices.iter().enumerate() {
        for (j, &c) in col_indices.iter().enumerate() {
            out.set(i, j, matrix.entry(r, c).clone());
        }
    }
    Ok(out)
}

fn check_indices(indices: &[usize], size: usize, axis: &'static str) -> Result<(), LinAlgError> {
    let mut seen = vec![false; size];
    for &index in indices {
        if index >= size {
            return Err(LinAlgError::IndexOutOfRange { axis, index, size });
        }
        if seen[index] {
            return Err(LinAlgError::DuplicateIndex { axis, index });
        }
        seen[index] = true;
    }
    Ok(())
}

/// The stoichiometric matrix of a network: one row per species (sorted by
/// name), one column per reaction (canonical order), column = target minus
/// source of the reaction.
pub fn stoichiometric_matrix(network: &Network) -> IntMatrix {
    let mut matrix = IntMatrix::zeros(network.species_count(), network.reaction_count());
    for (col, reaction) in network.reactions().enumerate() {
        for (species, coeff) in reaction.target().terms() {
            let row = network.species_index(species).expect("species listed");
            matrix.set(row, col, BigInt::from(coeff.clone()));
        }
        for (species, coeff) in reaction.source().terms() {
            let row = network.species_index(species).expect("species listed");
            let value = matrix.entry(row, col) - BigInt::from(coeff.clone());
            matrix.set(row, col, value);
        }
    }
    matrix
}

/// Exact rank over the rationals, by fraction-free Bareiss elimination.
///
/// Pivots are chosen among the nonzero entries of the current column with
/// smallest absolute value, ties broken by lowest row index; this keeps the
/// intermediate integers small and the elimination deterministic.
pub fn rank(matrix: &IntMatrix) -> usize {
    let mut m = matrix.clone();
    let (rows, cols) = (m.rows, m.cols);
    let mut previous_pivot = BigInt::from(1);
    let mut pivot_row = 0usize;

    for col in 0..cols {
        if pivot_row == rows {
            break;
        }
        let Some(best) = (pivot_row..rows)
            .filter(|&r| !m.entry(r, col).is_zero())
            .min_by_key(|&r| (m.entry(r, col).abs(), r))
        else {
            continue;
        };
        if best != pivot_row {
            for c in 0..cols {
                m.entries.swap(pivot_row * cols + c, best * cols + c);
            }
        }
        let pivot = m.entry(pivot_row, col).clone();
        for r in (pivot_row + 1)..rows {
            let factor = m.entry(r, col).clone();
            for c in 0..cols {
                let value = m.entry(r, c) * &pivot - &factor * m.entry(pivot_row, c);
                debug_assert!(
                    (&value % &previous_pivot).is_zero(),
                    "Bareiss division must be exact"
                );
                m.set(r, c, value / &previous_pivot);
            }
        }
        previous_pivot = pivot;
        pivot_row += 1;
    }
    pivot_row
}

/// Independent rank oracle: Gauss-Jordan elimination over exact rationals,
/// with every entry kept as a reduced fraction. Structurally different from
/// [`rank`]; the two must agree on every input.
pub fn rank_oracle(matrix: &IntMatrix) -> usize {
    let (rows, cols) = (matrix.rows, matrix.cols);
    let mut m: Vec<Vec<BigRational>> = (0..rows)
        .map(|r| {
            (0..cols)
                .map(|c| BigRational::from_integer(matrix.entry(r, c).clone()))
                .collect()
        })
        .collect();

    let mut pivot_row = 0usize;
    for col in 0..cols {
        if pivot_row == rows {
            break;
        }
        let Some(found) = (pivot_row..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(pivot_row, found);
        let pivot = m[pivot_row][col].clone();
        for entry in &mut m[pivot_row] {
            *entry /= pivot.clone();
        }
        let pivot_values = m[pivot_row].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != pivot_row && !row[col].is_zero() {
                let factor = row[col].clone();
                for (entry, pivot_value) in row.iter_mut().zip(&pivot_values) {
                    *entry -= &factor * pivot_value;
                }
            }
        }
        pivot_row += 1;
    }
    pivot_row
}

/// True iff `vector` lies in the rational column span of `matrix`, decided
/// by comparing the rank of the matrix with and without the extra column.
pub fn in_column_span(matrix: &IntMatrix, vector: &[BigInt]) -> Result<bool, LinAlgError> {
    let augmented = matrix.augment_columns(std::slice::from_ref(&vector.to_vec()))?;
    Ok(rank(&augmented) == rank(matrix))
}

/// True iff every given vector lies in the rational column span of `matrix`.
/// Appends all vectors at once, so only two rank computations are needed.
pub fn all_in_column_span(
    matrix: &IntMatrix,
    vectors: &[Vec<BigInt>],
) -> Result<bool, LinAlgError> {
    if vectors.is_empty() {
        return Ok(true);
    }
    let augmented = matrix.augment_columns(vectors)?;
    Ok(rank(&augmented) == rank(matrix))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_network, Complex, Reaction, SpeciesId};
    use num_bigint::BigUint;

    fn cx(pairs: &[(&str, u64)]) -> Complex {
        Complex::from_terms(
            pairs
                .iter()
                .map(|(n, k)| (SpeciesId::new(*n).unwrap(), BigUint::from(*k))),
        )
    }

    fn rx(source: &[(&str, u64)], target: &[(&str, u64)]) -> Reaction {
        Reaction::new(cx(source), cx(target)).unwrap()
    }

    fn big(values: &[i64]) -> Vec<BigInt> {
        values.iter().map(|&v| BigInt::from(v)).collect()
    }

    #[test]
    fn stoichiometric_matrix_of_running_example() {
        // A -> A + 2B -> 2A + 2B: columns (0,2) and (1,0).
        let network = build_network([
            rx(&[("A", 1)], &[("A", 1), ("B", 2)]),
            rx(&[("A", 1), ("B", 2)], &[("A", 2), ("B", 2)]),
        ])
        .unwrap();
        let gamma = stoichiometric_matrix(&network);
        assert_eq!((gamma.rows(), gamma.cols()), (2, 2));
        assert_eq!(gamma, IntMatrix::from_rows(&[&[0, 1], &[2, 0]]));
        assert_eq!(rank(&gamma), 2);
    }

    #[test]
    fn stoichiometric_matrix_of_two_to_one_funnel() {
        // 2A -> A + B and 2B -> A + B: both columns are (-1, 1) up to sign.
        let network = build_network([
            rx(&[("A", 2)], &[("A", 1), ("B", 1)]),
            rx(&[("B", 2)], &[("A", 1), ("B", 1)]),
        ])
        .unwrap();
        let gamma = stoichiometric_matrix(&network);
        assert_eq!(gamma, IntMatrix::from_rows(&[&[-1, 1], &[1, -1]]));
        assert_eq!(rank(&gamma), 1);
    }

    #[test]
    fn stoichiometric_matrix_single_reaction() {
        let network = build_network([rx(&[("A", 1)], &[("B", 1)])]).unwrap();
        let gamma = stoichiometric_matrix(&network);
        assert_eq!(gamma, IntMatrix::from_rows(&[&[-1], &[1]]));
    }

    #[test]
    fn rank_golden_values() {
        assert_eq!(rank(&IntMatrix::from_rows(&[&[0, 1], &[2, 0]])), 2);
        assert_eq!(rank(&IntMatrix::zeros(3, 4)), 0);
        assert_eq!(rank(&IntMatrix::zeros(0, 0)), 0);
        // The split network's 4x4 matrix has rank 3.
        let split = IntMatrix::from_rows(&[
            &[-1, 0, 1, 0],
            &[0, 1, 1, -2],
            &[1, -1, -2, 2],
            &[0, 0, -1, 1],
        ]);
        assert_eq!(rank(&split), 3);
        assert_eq!(rank_oracle(&split), 3);
    }

    #[test]
    fn oracle_agrees_on_golden_values() {
        for m in [
            IntMatrix::from_rows(&[&[0, 1], &[2, 0]]),
            IntMatrix::zeros(3, 4),
            IntMatrix::from_rows(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]),
        ] {
            assert_eq!(rank(&m), rank_oracle(&m));
        }
        let identity = IntMatrix::from_rows(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(rank_oracle(&identity), 3);
    }

    #[test]
    fn membership_golden_values() {
        let gamma = IntMatrix::from_rows(&[&[0, 1], &[2, 0]]);
        assert!(in_column_span(&gamma, &big(&[1, 2])).unwrap());
        let single = IntMatrix::from_rows(&[&[-1], &[1]]);
        assert!(!in_column_span(&single, &big(&[1, 0])).unwrap());
        assert!(in_column_span(&single, &big(&[2, -2])).unwrap());
        assert_eq!(
            in_column_span(&single, &big(&[1, 0, 0])),
            Err(LinAlgError::DimensionMismatch { rows: 2, vector: 3 })
        );
    }

    #[test]
    fn submatrix_selection_and_errors() {
        let m = IntMatrix::from_rows(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]);
        let sub = submatrix(&m, &[2, 0], &[1]).unwrap();
        assert_eq!(sub, IntMatrix::from_rows(&[&[8], &[2]]));
        let empty = submatrix(&m, &[], &[]).unwrap();
        assert_eq!((empty.rows(), empty.cols()), (0, 0));
        assert_eq!(rank(&empty), 0);
        assert_eq!(
            submatrix(&m, &[3], &[0]),
            Err(LinAlgError::IndexOutOfRange {
                axis: "row",
                index: 3,
                size: 3
            })
        );
        assert_eq!(
            submatrix(&m, &[1, 1], &[0]),
            Err(LinAlgError::DuplicateIndex {
                axis: "row",
                index: 1
            })
        );
    }

    #[test]
    fn bareiss_survives_large_intermediates() {
        // Hilbert-like integer matrix with big cofactors; rank must be exact.
        let m = IntMatrix::from_rows(&[
            &[60, 30, 20, 15],
            &[30, 20, 15, 12],
            &[20, 15, 12, 10],
            &[15, 12, 10, 60],
        ]);
        assert_eq!(rank(&m), rank_oracle(&m));
    }
}
