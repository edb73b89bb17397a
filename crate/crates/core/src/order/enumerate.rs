use std::collections::BTreeMap;

use rayon::prelude::*;

use super::completion::powerset_algebra;
use super::{canonical_form, CanonicalForm, FinitePoset, OrderedStructure, StructureKind};

/// All posets on `n` points up to isomorphism, in canonical order and canonical labeling.
pub fn enumerate_posets(n: usize) -> Vec<FinitePoset> {
    let mut level = vec![FinitePoset::antichain(0)];
    for _ in 0..n {
        let candidates: Vec<FinitePoset> = level
            .iter()
            .flat_map(|p| p.down_sets().into_iter().map(move |d| p.with_new_element(&d)))
            .collect();
        level = dedup_canonical(
            candidates
                .into_iter()
                .map(|p| OrderedStructure::from_poset(StructureKind::Poset, p).unwrap())
                .collect(),
        )
        .into_iter()
        .map(|s| s.poset().clone())
        .collect();
    }
    level
}

/// One canonical representative per isomorphism class, sorted by canonical form.
pub(crate) fn dedup_canonical(items: Vec<OrderedStructure>) -> Vec<OrderedStructure> {
    let forms: Vec<(CanonicalForm, OrderedStructure)> = items
        .into_par_iter()
        .map(|s| {
            let (f, perm) = canonical_form(&s);
            (f, s.permute(&perm))
        })
        .collect();
    let mut map = BTreeMap::new();
    for (f, s) in forms {
        map.entry(f).or_insert(s);
    }
    map.into_values().collect()
}

/// All structures of `kind` with exactly `size` elements, one per isomorphism class,
/// in canonical order. Elements are named `e0, e1, ...` in canonical position.
pub fn enumerate_structures(kind: StructureKind, size: usize) -> Vec<OrderedStructure> {
    let relabel = |s: OrderedStructure| {
        let mut s = s;
        s.rename(super::structure::default_names(s.len()));
        s
    };
    if kind.is_boolean() {
        if !size.is_power_of_two() {
            return Vec::new();
        }
        let k = size.trailing_zeros() as usize;
        let labels: Vec<String> = (0..k).map(|i| i.to_string()).collect();
        let ba = powerset_algebra(&labels);
        return dedup_canonical(vec![ba]).into_iter().map(relabel).collect();
    }
    if size == 0 {
        return if kind.allows_empty() {
            vec![OrderedStructure::from_poset(kind, FinitePoset::antichain(0)).unwrap()]
        } else {
            Vec::new()
        };
    }
    let candidates: Vec<FinitePoset> = if kind.is_lattice() {
        if size == 1 {
            vec![FinitePoset::antichain(1)]
        } else {
            enumerate_posets(size - 2).iter().map(|p| p.with_bounds()).collect()
        }
    } else if kind == StructureKind::JoinSemilattice {
        enumerate_posets(size - 1).iter().map(|p| p.with_top()).collect()
    } else if kind == StructureKind::MeetSemilattice {
        enumerate_posets(size - 1).iter().map(|p| p.dual().with_top().dual()).collect()
    } else {
        return enumerate_posets(size)
            .into_iter()
            .map(|p| OrderedStructure::from_poset(kind, p).unwrap())
            .collect();
    };
    let valid: Vec<OrderedStructure> = candidates
        .into_par_iter()
        .filter_map(|p| OrderedStructure::from_poset(kind, p).ok())
        .collect();
    dedup_canonical(valid).into_iter().map(relabel).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poset_counts() {
        let counts: Vec<usize> = (0..=5).map(|n| enumerate_posets(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 16, 63]);
    }

    #[test]
    fn lattice_and_boolean_counts() {
        assert_eq!(enumerate_structures(StructureKind::Lattice, 1).len(), 1);
        let lattices: Vec<usize> =
            (1..=6).map(|n| enumerate_structures(StructureKind::Lattice, n).len()).collect();
        assert_eq!(lattices, vec![1, 1, 1, 2, 5, 15]);
        assert!(enumerate_structures(StructureKind::BooleanAlgebra, 3).is_empty());
        assert_eq!(enumerate_structures(StructureKind::BooleanAlgebra, 8).len(), 1);
        let dl: Vec<usize> = (1..=6)
            .map(|n| enumerate_structures(StructureKind::DistributiveLattice, n).len())
            .collect();
        assert_eq!(dl, vec![1, 1, 1, 2, 3, 5]);
    }

    #[test]
    fn semilattice_counts_are_dual() {
        for n in 0..=5 {
            assert_eq!(
                enumerate_structures(StructureKind::JoinSemilattice, n).len(),
                enumerate_structures(StructureKind::MeetSemilattice, n).len()
            );
        }
        // join-semilattices with n elements = lattices with n + 1 elements
        for n in 1..=5 {
            assert_eq!(
                enumerate_structures(StructureKind::JoinSemilattice, n).len(),
                enumerate_structures(StructureKind::Lattice, n + 1).len()
            );
        }
    }

    #[test]
    fn deterministic() {
        assert_eq!(enumerate_posets(4), enumerate_posets(4));
    }
}
