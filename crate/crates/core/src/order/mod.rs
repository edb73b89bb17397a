//! Finite posets, (semi)lattices and Boolean algebras.

mod canonical;
mod completion;
mod enumerate;
mod poset;
mod structure;

pub use canonical::{canonical_form, CanonicalForm};
pub use completion::{birkhoff_embedding, join_irreducibles, macneille_completion};
pub(crate) use completion::fresh_names;
pub(crate) use enumerate::dedup_canonical;
pub use enumerate::{enumerate_posets, enumerate_structures};
pub use poset::{FinitePoset, OrderViolation};
pub use structure::{
    all_tuples, default_names, Embedding, OpTable, Operation, OrderedStructure, StructureKind,
    ValidationReport, Violation,
};

/// Read access to a finite order on `0..len()`.
pub trait Order {
    fn len(&self) -> usize;

    fn leq(&self, a: usize, b: usize) -> bool;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Display name of an element, used in diagnostics.
    fn label(&self, a: usize) -> String {
        a.to_string()
    }

    /// Greatest lower bound of `elems`; the empty meet is the top.
    fn meet_of(&self, elems: &[usize]) -> Option<usize> {
        let lower: Vec<usize> =
            (0..self.len()).filter(|&x| elems.iter().all(|&e| self.leq(x, e))).collect();
        lower.iter().copied().find(|&g| lower.iter().all(|&l| self.leq(l, g)))
    }

    /// Least upper bound of `elems`; the empty join is the bottom.
    fn join_of(&self, elems: &[usize]) -> Option<usize> {
        let upper: Vec<usize> =
            (0..self.len()).filter(|&x| elems.iter().all(|&e| self.leq(e, x))).collect();
        upper.iter().copied().find(|&g| upper.iter().all(|&u| self.leq(g, u)))
    }

    fn meet(&self, a: usize, b: usize) -> Option<usize> {
        self.meet_of(&[a, b])
    }

    fn join(&self, a: usize, b: usize) -> Option<usize> {
        self.join_of(&[a, b])
    }
}

/// Direction argument for [`bound`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Meet,
    Join,
}

/// Meet or join of `subset`, if it exists.
pub fn bound<O: Order + ?Sized>(o: &O, subset: &[usize], dir: Direction) -> Option<usize> {
    match dir {
        Direction::Meet => o.meet_of(subset),
        Direction::Join => o.join_of(subset),
    }
}

/// The order-dual view of an order.
pub struct Dual<'a, O: ?Sized>(pub &'a O);

impl<O: Order + ?Sized> Order for Dual<'_, O> {
    fn len(&self) -> usize {
        self.0.len()
    }
    fn leq(&self, a: usize, b: usize) -> bool {
        self.0.leq(b, a)
    }
    fn label(&self, a: usize) -> String {
        self.0.label(a)
    }
    fn meet_of(&self, elems: &[usize]) -> Option<usize> {
        self.0.join_of(elems)
    }
    fn join_of(&self, elems: &[usize]) -> Option<usize> {
        self.0.meet_of(elems)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_in_small_orders() {
        let chain = FinitePoset::chain(3);
        assert_eq!(bound(&chain, &[0, 2], Direction::Meet), Some(0));
        assert_eq!(bound(&chain, &[], Direction::Meet), Some(2));
        assert_eq!(bound(&chain, &[], Direction::Join), Some(0));
        let anti = FinitePoset::antichain(2);
        assert_eq!(bound(&anti, &[0, 1], Direction::Join), None);
        assert_eq!(bound(&anti, &[], Direction::Meet), None);
    }

    #[test]
    fn boolean_join_of_atoms() {
        let ba = FinitePoset::from_pairs(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(bound(&ba, &[1, 2], Direction::Join), Some(3));
        assert_eq!(Dual(&ba).join_of(&[1, 2]), Some(0));
    }
}
