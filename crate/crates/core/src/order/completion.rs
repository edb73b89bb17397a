use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

use super::{Embedding, FinitePoset, Order, OrderedStructure, StructureKind};

/// Smallest `#k` names not already taken.
pub(crate) fn fresh_names(taken: &[String], count: usize) -> Vec<String> {
    let used: BTreeSet<&str> = taken.iter().map(|s| s.as_str()).collect();
    let mut out = Vec::with_capacity(count);
    let mut k = 0usize;
    while out.len() < count {
        let cand = format!("#{k}");
        if !used.contains(cand.as_str()) {
            out.push(cand);
        }
        k += 1;
    }
    out
}

/// Dedekind–MacNeille completion. The original elements keep their indices and names;
/// the added cuts follow, ordered by size and then by membership, named `#0, #1, ...`.
/// The result is a bounded lattice; added operations are not carried over.
pub fn macneille_completion(s: &OrderedStructure) -> (OrderedStructure, Embedding) {
    let p = s.poset();
    let n = p.len();
    let principal: Vec<FixedBitSet> = (0..n).map(|x| p.down_set(x)).collect();
    let mut full = FixedBitSet::with_capacity(n);
    full.insert_range(..);

    let mut cuts: BTreeSet<Vec<usize>> = BTreeSet::new();
    let key = |b: &FixedBitSet| b.ones().collect::<Vec<usize>>();
    let mut all: Vec<FixedBitSet> = principal.clone();
    all.push(full);
    for c in &all {
        cuts.insert(key(c));
    }
    // Close under intersection; each cut is an intersection of principal ideals.
    let mut frontier: Vec<FixedBitSet> = all.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for f in &frontier {
            for pi in &principal {
                let mut c = f.clone();
                c.intersect_with(pi);
                if cuts.insert(key(&c)) {
                    next.push(c);
                }
            }
        }
        frontier = next;
    }

    let mut extra: Vec<Vec<usize>> = cuts
        .into_iter()
        .filter(|c| !(0..n).any(|x| principal[x].ones().eq(c.iter().copied())))
        .collect();
    extra.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));

    let mut members: Vec<FixedBitSet> = principal;
    for c in &extra {
        let mut b = FixedBitSet::with_capacity(n);
        for &x in c {
            b.insert(x);
        }
        members.push(b);
    }
    let m = members.len();
    let order = FinitePoset::from_fn(m, |a, b| members[a].is_subset(&members[b]));
    let mut names: Vec<String> = s.names().to_vec();
    names.extend(fresh_names(s.names(), extra.len()));
    let d = OrderedStructure::new(StructureKind::BoundedLattice, names, order)
        .expect("cuts form a bounded lattice");
    (d, Embedding::identity(n))
}

/// Elements with exactly one lower cover.
pub fn join_irreducibles(s: &OrderedStructure) -> Vec<usize> {
    (0..s.len()).filter(|&x| s.poset().lower_covers(x).len() == 1).collect()
}

/// The powerset algebra on `labels`; element `m` is the subset with bitmask `m`.
pub(crate) fn powerset_algebra(labels: &[String]) -> OrderedStructure {
    let k = labels.len();
    let size = 1usize << k;
    let names = (0..size)
        .map(|m| {
            let parts: Vec<&str> =
                (0..k).filter(|i| m >> i & 1 == 1).map(|i| labels[i].as_str()).collect();
            format!("{{{}}}", parts.join(","))
        })
        .collect();
    OrderedStructure::new(
        StructureKind::BooleanAlgebra,
        names,
        FinitePoset::from_fn(size, |a, b| a & b == a),
    )
    .expect("powerset is Boolean")
}

/// Embeds a finite distributive lattice into the powerset of its join-irreducibles,
/// `x ↦ {j ≤ x}`.
pub fn birkhoff_embedding(d: &OrderedStructure) -> Result<(OrderedStructure, Embedding)> {
    let n = d.len();
    let bounded =
        OrderedStructure::new(StructureKind::BoundedLattice, d.names().to_vec(), d.poset().clone())
            .map_err(|e| Error::Invalid(format!("not a bounded lattice: {e}")))?;
    if let Some((a, b, c)) = bounded.distributivity_failure() {
        return Err(Error::NotDistributive(
            d.name(a).to_string(),
            d.name(b).to_string(),
            d.name(c).to_string(),
        ));
    }
    let irr = join_irreducibles(d);
    if irr.len() >= usize::BITS as usize {
        return Err(Error::BoundExceeded(format!("{} join-irreducibles", irr.len())));
    }
    let labels: Vec<String> = irr.iter().map(|&j| d.name(j).to_string()).collect();
    let ba = powerset_algebra(&labels);
    let map = (0..n)
        .map(|x| {
            irr.iter()
                .enumerate()
                .filter(|&(_, &j)| d.leq(j, x))
                .fold(0usize, |m, (i, _)| m | 1 << i)
        })
        .collect();
    Ok((ba, Embedding { map }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poset(n: usize, pairs: &[(usize, usize)]) -> OrderedStructure {
        OrderedStructure::from_poset(StructureKind::Poset, FinitePoset::from_pairs(n, pairs).unwrap())
            .unwrap()
    }

    #[test]
    fn antichain_of_two_gives_four_element_lattice() {
        let (d, e) = macneille_completion(&poset(2, &[]));
        assert_eq!(d.len(), 4);
        assert_eq!(d.names()[2..], ["#0".to_string(), "#1".to_string()]);
        assert_eq!(d.bottom(), Some(2));
        assert_eq!(d.top(), Some(3));
        e.verify(&poset(2, &[]), &d, false).unwrap();
    }

    #[test]
    fn lattice_is_its_own_completion() {
        let s = poset(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]);
        let (d, _) = macneille_completion(&s);
        assert_eq!(d.len(), 4);
    }

    #[test]
    fn fork_fragment_completes_to_four() {
        // a < b, a < d, b and d incomparable
        let s = poset(3, &[(0, 1), (0, 2)]);
        let (d, e) = macneille_completion(&s);
        assert_eq!(d.len(), 4);
        e.verify(&s, &d, false).unwrap();
        assert!(d.poset().covers().contains(&(0, 1)));
        assert!(d.poset().covers().contains(&(0, 2)));
    }

    #[test]
    fn empty_poset_completes_to_a_point() {
        let (d, _) = macneille_completion(&poset(0, &[]));
        assert_eq!(d.len(), 1);
    }

    #[test]
    fn birkhoff_of_chain_and_square() {
        let chain =
            OrderedStructure::from_poset(StructureKind::DistributiveLattice, FinitePoset::chain(3))
                .unwrap();
        let (ba, e) = birkhoff_embedding(&chain).unwrap();
        assert_eq!(ba.len(), 4);
        e.verify(&chain, &ba.retag(StructureKind::BooleanAlgebra).unwrap(), false).unwrap();
        assert_eq!(join_irreducibles(&chain), vec![1, 2]);

        let sq = OrderedStructure::from_poset(
            StructureKind::BooleanAlgebra,
            FinitePoset::from_fn(4, |a, b| a & b == a),
        )
        .unwrap();
        let (ba, e) = birkhoff_embedding(&sq).unwrap();
        assert_eq!(ba.len(), 4);
        assert_eq!(e.map, vec![0, 1, 2, 3]);
    }

    #[test]
    fn birkhoff_rejects_diamond() {
        let p = FinitePoset::from_pairs(5, &[(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)]).unwrap();
        let m3 = OrderedStructure::from_poset(StructureKind::BoundedLattice, p).unwrap();
        assert!(matches!(birkhoff_embedding(&m3), Err(Error::NotDistributive(..))));
    }
}
