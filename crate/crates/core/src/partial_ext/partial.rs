use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::order::OpTable;

/// A partial n-ary operation: a finite map from argument tuples to elements.
/// The carrier it lives on is passed separately to every algorithm.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PartialOp {
    arity: usize,
    entries: BTreeMap<Vec<usize>, usize>,
}

impl PartialOp {
    pub fn new(arity: usize) -> Self {
        PartialOp { arity, entries: BTreeMap::new() }
    }

    /// Unary partial operation from `(argument, value)` pairs.
    pub fn unary(pairs: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::new(1);
        for &(a, v) in pairs {
            g.insert(vec![a], v)?;
        }
        Ok(g)
    }

    pub fn from_entries(arity: usize, entries: impl IntoIterator<Item = (Vec<usize>, usize)>) -> Result<Self> {
        let mut g = Self::new(arity);
        for (args, v) in entries {
            g.insert(args, v)?;
        }
        Ok(g)
    }

    /// The whole table as a partial operation.
    pub fn from_table(t: &OpTable) -> Self {
        let entries = t.tuples().map(|args| {
            let v = t.get(&args);
            (args, v)
        });
        PartialOp { arity: t.arity(), entries: entries.collect() }
    }

    /// Adds an entry; a different value for an existing tuple is an error.
    pub fn insert(&mut self, args: Vec<usize>, value: usize) -> Result<()> {
        if args.len() != self.arity {
            return Err(Error::Arity { expected: self.arity, found: args.len() });
        }
        match self.entries.get(&args) {
            Some(&old) if old != value => Err(Error::Rejected(format!(
                "conflicting values {old} and {value} at {args:?}"
            ))),
            _ => {
                self.entries.insert(args, value);
                Ok(())
            }
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, args: &[usize]) -> Option<usize> {
        self.entries.get(args).copied()
    }

    pub fn get1(&self, x: usize) -> Option<usize> {
        self.entries.get(&[x][..]).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, usize)> {
        self.entries.iter().map(|(k, &v)| (k, v))
    }

    pub fn domain(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.entries.keys()
    }

    /// Domain of a unary operation, in increasing order.
    pub fn domain1(&self) -> Vec<usize> {
        self.entries.keys().map(|k| k[0]).collect()
    }

    pub fn values(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.values().copied()
    }

    /// Checks that every argument and value lies in `0..size`.
    pub fn check_carrier(&self, size: usize) -> Result<()> {
        for (args, v) in self.entries() {
            if let Some(&bad) = args.iter().chain(std::iter::once(&v)).find(|&&x| x >= size) {
                return Err(Error::UnknownElement(bad.to_string()));
            }
        }
        Ok(())
    }

    /// Whether `t` agrees with every entry.
    pub fn extended_by(&self, t: &OpTable) -> bool {
        t.arity() == self.arity && self.entries().all(|(args, v)| t.get(args) == v)
    }

    /// Renames arguments and values through `f`.
    pub fn map(&self, f: impl Fn(usize) -> usize) -> Self {
        PartialOp {
            arity: self.arity,
            entries: self
                .entries
                .iter()
                .map(|(k, &v)| (k.iter().map(|&a| f(a)).collect(), f(v)))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conflicting_insert_rejected() {
        let mut g = PartialOp::unary(&[(0, 1)]).unwrap();
        assert!(g.insert(vec![0], 1).is_ok());
        assert!(g.insert(vec![0], 2).is_err());
        assert!(g.insert(vec![0, 1], 2).is_err());
    }

    #[test]
    fn table_roundtrip() {
        let t = OpTable::unary(vec![1, 1, 2]).unwrap();
        let g = PartialOp::from_table(&t);
        assert_eq!(g.len(), 3);
        assert!(g.extended_by(&t));
        assert!(g.check_carrier(3).is_ok());
        assert!(g.check_carrier(2).is_err());
    }
}
