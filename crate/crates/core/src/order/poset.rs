use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

use super::Order;

/// A finite partial order on `0..len`, stored as a dense relation matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FinitePoset {
    n: usize,
    leq: Vec<bool>,
}

/// A failure of one of the partial order axioms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderViolation {
    Reflexivity(usize),
    Antisymmetry(usize, usize),
    Transitivity(usize, usize, usize),
}

impl fmt::Display for OrderViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderViolation::Reflexivity(a) => write!(f, "not reflexive at {a}"),
            OrderViolation::Antisymmetry(a, b) => write!(f, "antisymmetry fails at ({a}, {b})"),
            OrderViolation::Transitivity(a, b, c) => {
                write!(f, "transitivity fails at ({a}, {b}, {c})")
            }
        }
    }
}

impl fmt::Debug for FinitePoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FinitePoset({}; {:?})", self.n, self.covers())
    }
}

impl FinitePoset {
    /// The discrete order on `n` points.
    pub fn antichain(n: usize) -> Self {
        Self::from_fn(n, |a, b| a == b)
    }

    /// `0 < 1 < ... < n-1`.
    pub fn chain(n: usize) -> Self {
        Self::from_fn(n, |a, b| a <= b)
    }

    /// Builds the matrix directly from a predicate. No axioms are checked.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut leq = vec![false; n * n];
        for a in 0..n {
            for b in 0..n {
                leq[a * n + b] = f(a, b);
            }
        }
        FinitePoset { n, leq }
    }

    /// Raw row-major matrix, unchecked.
    pub fn from_matrix_unchecked(n: usize, leq: Vec<bool>) -> Self {
        assert_eq!(leq.len(), n * n);
        FinitePoset { n, leq }
    }

    /// Takes the reflexive-transitive closure of `pairs` and checks antisymmetry.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut p = Self::antichain(n);
        for &(a, b) in pairs {
            if a >= n || b >= n {
                return Err(Error::UnknownElement(format!("{}", a.max(b))));
            }
            p.leq[a * n + b] = true;
        }
        p.close_transitively();
        for a in 0..n {
            for b in (a + 1)..n {
                if p.leq(a, b) && p.leq(b, a) {
                    return Err(Error::Invalid(OrderViolation::Antisymmetry(a, b).to_string()));
                }
            }
        }
        Ok(p)
    }

    fn close_transitively(&mut self) {
        let n = self.n;
        for k in 0..n {
            for a in 0..n {
                if self.leq[a * n + k] {
                    for b in 0..n {
                        if self.leq[k * n + b] {
                            self.leq[a * n + b] = true;
                        }
                    }
                }
            }
        }
    }

    /// Every axiom failure, in index order.
    pub fn violations(&self) -> Vec<OrderViolation> {
        let n = self.n;
        let mut out = Vec::new();
        for a in 0..n {
            if !self.leq(a, a) {
                out.push(OrderViolation::Reflexivity(a));
            }
        }
        for a in 0..n {
            for b in (a + 1)..n {
                if self.leq(a, b) && self.leq(b, a) {
                    out.push(OrderViolation::Antisymmetry(a, b));
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                if !self.leq(a, b) {
                    continue;
                }
                for c in 0..n {
                    if self.leq(b, c) && !self.leq(a, c) {
                        out.push(OrderViolation::Transitivity(a, b, c));
                    }
                }
            }
        }
        out
    }

    pub fn is_partial_order(&self) -> bool {
        self.violations().is_empty()
    }

    pub fn matrix(&self) -> &[bool] {
        &self.leq
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq(a, b)
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.leq(a, b) || self.leq(b, a)
    }

    /// Pairs `(a, b)` with `a` covered by `b`.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in 0..self.n {
                if self.lt(a, b) && !(0..self.n).any(|c| self.lt(a, c) && self.lt(c, b)) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn lower_covers(&self, x: usize) -> Vec<usize> {
        (0..self.n)
            .filter(|&a| self.lt(a, x) && !(0..self.n).any(|c| self.lt(a, c) && self.lt(c, x)))
            .collect()
    }

    pub fn down_set(&self, x: usize) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.n);
        for a in 0..self.n {
            if self.leq(a, x) {
                s.insert(a);
            }
        }
        s
    }

    pub fn up_set(&self, x: usize) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.n);
        for a in 0..self.n {
            if self.leq(x, a) {
                s.insert(a);
            }
        }
        s
    }

    pub fn minimum(&self) -> Option<usize> {
        (0..self.n).find(|&a| (0..self.n).all(|b| self.leq(a, b)))
    }

    pub fn maximum(&self) -> Option<usize> {
        (0..self.n).find(|&a| (0..self.n).all(|b| self.leq(b, a)))
    }

    pub fn minimal_elements(&self) -> Vec<usize> {
        (0..self.n).filter(|&a| !(0..self.n).any(|b| self.lt(b, a))).collect()
    }

    pub fn maximal_elements(&self) -> Vec<usize> {
        (0..self.n).filter(|&a| !(0..self.n).any(|b| self.lt(a, b))).collect()
    }

    /// Order on the reversed relation.
    pub fn dual(&self) -> Self {
        Self::from_fn(self.n, |a, b| self.leq(b, a))
    }

    /// Relabels so that old element `i` becomes `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        let n = self.n;
        let mut leq = vec![false; n * n];
        for a in 0..n {
            for b in 0..n {
                leq[perm[a] * n + perm[b]] = self.leq(a, b);
            }
        }
        FinitePoset { n, leq }
    }

    /// The suborder on `subset`, re-indexed in the given order.
    pub fn induced(&self, subset: &[usize]) -> Self {
        Self::from_fn(subset.len(), |a, b| self.leq(subset[a], subset[b]))
    }

    /// Adds one element on top of a given down-closed set; the new element has index `len`.
    pub fn with_new_element(&self, below: &[usize]) -> Self {
        let m = self.n + 1;
        Self::from_fn(m, |a, b| {
            if a == self.n {
                b == self.n
            } else if b == self.n {
                below.contains(&a)
            } else {
                self.leq(a, b)
            }
        })
    }

    /// Adjoins a new least and a new greatest element (indices `len` and `len + 1`).
    pub fn with_bounds(&self) -> Self {
        let n = self.n;
        Self::from_fn(n + 2, |a, b| {
            if a == b || a == n || b == n + 1 {
                true
            } else if a == n + 1 || b == n {
                false
            } else {
                self.leq(a, b)
            }
        })
    }

    /// Adjoins a new greatest element at index `len`.
    pub fn with_top(&self) -> Self {
        let n = self.n;
        Self::from_fn(n + 1, |a, b| if b == n { true } else if a == n { false } else { self.leq(a, b) })
    }

    /// Every down-closed subset, as sorted index lists.
    pub fn down_sets(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut current = Vec::new();
        self.down_sets_rec(0, &mut current, &mut out);
        out
    }

    fn down_sets_rec(&self, i: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == self.n {
            out.push(current.clone());
            return;
        }
        // Exclude i: nothing above i may already be in (indices < i only).
        if !current.iter().any(|&c| self.leq(i, c)) {
            self.down_sets_rec(i + 1, current, out);
        }
        // Include i: all elements below i must be included or come later.
        if (0..i).all(|a| !self.lt(a, i) || current.contains(&a)) {
            current.push(i);
            self.down_sets_rec(i + 1, current, out);
            current.pop();
        }
    }
}

impl Order for FinitePoset {
    fn len(&self) -> usize {
        self.n
    }

    fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a * self.n + b]
    }

    fn meet_of(&self, elems: &[usize]) -> Option<usize> {
        let lower: Vec<usize> = (0..self.n).filter(|&x| elems.iter().all(|&e| self.leq(x, e))).collect();
        // scanning upwards ends at the greatest element whenever one exists
        let mut c = *lower.first()?;
        for &l in &lower {
            if self.leq(c, l) {
                c = l;
            }
        }
        lower.iter().all(|&l| self.leq(l, c)).then_some(c)
    }

    fn join_of(&self, elems: &[usize]) -> Option<usize> {
        let upper: Vec<usize> = (0..self.n).filter(|&x| elems.iter().all(|&e| self.leq(e, x))).collect();
        let mut c = *upper.first()?;
        for &u in &upper {
            if self.leq(u, c) {
                c = u;
            }
        }
        upper.iter().all(|&u| self.leq(c, u)).then_some(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_from_covers() {
        let p = FinitePoset::from_pairs(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(p.leq(0, 2));
        assert_eq!(p, FinitePoset::chain(3));
        assert!(p.is_partial_order());
    }

    #[test]
    fn two_cycle_rejected() {
        let err = FinitePoset::from_pairs(2, &[(0, 1), (1, 0)]).unwrap_err();
        assert!(err.to_string().contains("(0, 1)"));
        let raw = FinitePoset::from_fn(2, |_, _| true);
        assert_eq!(raw.violations(), vec![OrderViolation::Antisymmetry(0, 1)]);
    }

    #[test]
    fn covers_of_diamond() {
        let p = FinitePoset::from_pairs(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(p.covers(), vec![(0, 1), (0, 2), (1, 3), (2, 3)]);
        assert_eq!(p.lower_covers(3), vec![1, 2]);
        assert_eq!(p.minimum(), Some(0));
        assert_eq!(p.maximum(), Some(3));
    }

    #[test]
    fn down_sets_of_small_orders() {
        assert_eq!(FinitePoset::chain(3).down_sets().len(), 4);
        assert_eq!(FinitePoset::antichain(3).down_sets().len(), 8);
        let v = FinitePoset::from_pairs(3, &[(0, 1), (0, 2)]).unwrap();
        assert_eq!(v.down_sets().len(), 5);
    }

    #[test]
    fn permute_roundtrip() {
        let p = FinitePoset::from_pairs(3, &[(0, 2)]).unwrap();
        let q = p.permute(&[2, 0, 1]);
        assert!(q.leq(2, 1));
        assert_eq!(q.permute(&[1, 2, 0]), p);
    }

    #[test]
    fn empty_poset_is_fine() {
        let p = FinitePoset::antichain(0);
        assert!(p.is_partial_order());
        assert!(p.is_empty());
        assert_eq!(p.down_sets(), vec![Vec::<usize>::new()]);
    }
}
