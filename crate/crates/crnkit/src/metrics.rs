//! Structural invariants of a network.
//!
//! [`compute_metrics`] bundles every parameter used by the enlargement
//! theory: the four basic counts, the exact stoichiometric rank, the
//! deficiency `c - l - rank`, the cyclomatic number `r - c + l`, and the two
//! unimolecular bookkeeping counts (how many of the complexes `0, X1, ...,
//! Xs` are missing, and how many linkage classes contain one).
//!
//! Linkage classes are connected components of the reaction graph with edge
//! direction ignored, computed with a union-find over the complex set.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::exactla::{rank, stoichiometric_matrix};
use crate::model::{Complex, Network};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("complex {0} is not part of the network")]
    UnknownComplex(String),
}

/// The computed invariant bundle for one network.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NetworkMetrics {
    /// Number of species.
    pub species: usize,
    /// Number of complexes.
    pub complexes: usize,
    /// Number of reactions.
    pub reactions: usize,
    /// Number of linkage classes.
    pub linkage_classes: usize,
    /// Rank of the stoichiometric matrix.
    pub rank: usize,
    /// Deficiency: complexes - linkage_classes - rank. Always nonnegative.
    pub deficiency: i64,
    /// Cyclomatic number: reactions - complexes + linkage_classes.
    /// Always nonnegative; the circuit rank of the reaction graph.
    pub cyclomatic: i64,
    /// How many of the at-most-unimolecular complexes (the zero complex and
    /// each bare species) are absent from the complex set.
    pub missing_unimolecular: usize,
    /// How many linkage classes contain at least one at-most-unimolecular
    /// complex.
    pub classes_with_unimolecular: usize,
}

/// The partition of the complex set into linkage classes, ordered by each
/// class's smallest complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkagePartition {
    classes: Vec<BTreeSet<Complex>>,
}

impl LinkagePartition {
    pub fn classes(&self) -> &[BTreeSet<Complex>] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Index of the class containing `complex`, if any.
    pub fn class_of(&self, complex: &Complex) -> Option<usize> {
        self.classes
            .iter()
            .position(|class| class.contains(complex))
    }
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(len: usize) -> Self {
        UnionFind {
            parent: (0..len).collect(),
            size: vec![1; len],
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        // Path compression.
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    /// Returns false if the two elements were already in the same set.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

/// Connected components of the undirected reaction graph.
pub fn linkage_classes(network: &Network) -> LinkagePartition {
    let complexes: Vec<&Complex> = network.complexes().collect();
    let index_of = |complex: &Complex| -> usize {
        complexes
            .binary_search_by(|probe| probe.cmp(&complex))
            .expect("reaction endpoints are listed complexes")
    };

    let mut dsu = UnionFind::new(complexes.len());
    for reaction in network.reactions() {
        dsu.union(index_of(reaction.source()), index_of(reaction.target()));
    }

    let mut classes: Vec<BTreeSet<Complex>> = Vec::new();
    let mut root_to_class: Vec<Option<usize>> = vec![None; complexes.len()];
    // Complexes come in canonical order, so each class is created when its
    // smallest member is seen; the class list ends up ordered by that member.
    for (i, complex) in complexes.iter().enumerate() {
        let root = dsu.find(i);
        let class = *root_to_class[root].get_or_insert_with(|| {
            classes.push(BTreeSet::new());
            classes.len() - 1
        });
        classes[class].insert((*complex).clone());
    }
    LinkagePartition { classes }
}

/// True iff `a` and `b` lie in the same linkage class.
pub fn same_linkage_class(
    network: &Network,
    a: &Complex,
    b: &Complex,
) -> Result<bool, MetricsError> {
    let partition = linkage_classes(network);
    let class_a = partition
        .class_of(a)
        .ok_or_else(|| MetricsError::UnknownComplex(a.canonical_text()))?;
    let class_b = partition
        .class_of(b)
        .ok_or_else(|| MetricsError::UnknownComplex(b.canonical_text()))?;
    Ok(class_a == class_b)
}

/// Computes the full invariant bundle for a network.
pub fn compute_metrics(network: &Network) -> NetworkMetrics {
    let partition = linkage_classes(network);
    let rank = rank(&stoichiometric_matrix(network));

    let complexes = network.complex_count();
    let reactions = network.reaction_count();
    let ell = partition.len();

    // The at-most-unimolecular complexes of this network: 0 and each X_i.
    let mut unimolecular: Vec<Complex> = vec![Complex::zero()];
    unimolecular.extend(
        network
            .species()
            .iter()
            .map(|s| Complex::species(s.clone())),
    );
    let missing_unimolecular = unimolecular
        .iter()
        .filter(|c| !network.has_complex(c))
        .count();
    let classes_with_unimolecular = partition
        .classes()
        .iter()
        .filter(|class| class.iter().any(Complex::is_at_most_unimolecular))
        .count();

    let deficiency = complexes as i64 - ell as i64 - rank as i64;
    let cyclomatic = reactions as i64 - complexes as i64 + ell as i64;
    debug_assert!(deficiency >= 0, "deficiency is a nonnegative invariant");
    debug_assert!(cyclomatic >= 0, "cyclomatic number is nonnegative");

    NetworkMetrics {
        species: network.species_count(),
        complexes,
        reactions,
        linkage_classes: ell,
        rank,
        deficiency,
        cyclomatic,
        missing_unimolecular,
        classes_with_unimolecular,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_network, Reaction, SpeciesId};
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

    fn running_example() -> Network {
        // 2A -> A + 2B -> 2A + 2B
        build_network([
            rx(&[("A", 2)], &[("A", 1), ("B", 2)]),
            rx(&[("A", 1), ("B", 2)], &[("A", 2), ("B", 2)]),
        ])
        .unwrap()
    }

    fn funnel_example() -> Network {
        // A -> 2C, C -> 2D, C -> B: two linkage classes.
        build_network([
            rx(&[("A", 1)], &[("C", 2)]),
            rx(&[("C", 1)], &[("D", 2)]),
            rx(&[("C", 1)], &[("B", 1)]),
        ])
        .unwrap()
    }

    #[test]
    fn linkage_classes_of_running_example() {
        assert_eq!(linkage_classes(&running_example()).len(), 1);
    }

    #[test]
    fn linkage_classes_of_funnel() {
        let partition = linkage_classes(&funnel_example());
        assert_eq!(partition.len(), 2);
        // Ordered by smallest member: {2C, A} before {2D, B, C}.
        assert!(partition.classes()[0].contains(&cx(&[("A", 1)])));
        assert!(partition.classes()[1].contains(&cx(&[("B", 1)])));
    }

    #[test]
    fn linkage_classes_single_reaction() {
        let network = build_network([rx(&[("A", 1)], &[("B", 1)])]).unwrap();
        assert_eq!(linkage_classes(&network).len(), 1);
    }

    #[test]
    fn metrics_of_running_example() {
        let m = compute_metrics(&running_example());
        assert_eq!(
            m,
            NetworkMetrics {
                species: 2,
                complexes: 3,
                reactions: 2,
                linkage_classes: 1,
                rank: 2,
                deficiency: 0,
                cyclomatic: 0,
                missing_unimolecular: 3,
                classes_with_unimolecular: 0,
            }
        );
    }

    #[test]
    fn metrics_of_funnel() {
        let m = compute_metrics(&funnel_example());
        assert_eq!(m.deficiency, 0);
        assert_eq!(m.rank, 3);
        assert_eq!(m.missing_unimolecular, 2); // 0 and D
        assert_eq!(m.classes_with_unimolecular, 2);
    }

    #[test]
    fn metrics_of_reversible_pair() {
        // A <-> B: one cycle in the undirected multigraph.
        let network =
            build_network([rx(&[("A", 1)], &[("B", 1)]), rx(&[("B", 1)], &[("A", 1)])]).unwrap();
        let m = compute_metrics(&network);
        assert_eq!(m.complexes, 2);
        assert_eq!(m.linkage_classes, 1);
        assert_eq!(m.rank, 1);
        assert_eq!(m.deficiency, 0);
        assert_eq!(m.cyclomatic, 1);
    }

    #[test]
    fn same_class_queries() {
        let network = running_example();
        let two_a = cx(&[("A", 2)]);
        let top = cx(&[("A", 2), ("B", 2)]);
        assert!(same_linkage_class(&network, &two_a, &top).unwrap());
        assert!(same_linkage_class(&network, &two_a, &two_a).unwrap());

        let funnel = funnel_example();
        assert!(same_linkage_class(&funnel, &cx(&[("A", 1)]), &cx(&[("C", 2)])).unwrap());
        assert!(!same_linkage_class(&funnel, &cx(&[("D", 2)]), &cx(&[("A", 1)])).unwrap());
        assert_eq!(
            same_linkage_class(&funnel, &cx(&[("Z", 1)]), &cx(&[("A", 1)])),
            Err(MetricsError::UnknownComplex("Z".into()))
        );
    }
}
