use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

/// How a unary operation must interact with the relation R.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Monotonicity {
    /// `x R y ⇒ Kx R Ky`
    Isotone,
    /// `x R y ⇒ Ky R Kx`
    Antitone,
}

/// A finite set with a binary relation (not necessarily an order) and unary operations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationalStructure {
    pub names: Vec<String>,
    /// Row-major `n × n` relation matrix.
    pub rel: Vec<bool>,
    pub ops: BTreeMap<String, (Monotonicity, Vec<usize>)>,
}

impl RelationalStructure {
    pub fn new(names: Vec<String>, pairs: &[(usize, usize)]) -> Result<Self> {
        let n = names.len();
        let mut rel = vec![false; n * n];
        for &(a, b) in pairs {
            if a >= n || b >= n {
                return Err(Error::UnknownElement(a.max(b).to_string()));
            }
            rel[a * n + b] = true;
        }
        Ok(RelationalStructure { names, rel, ops: BTreeMap::new() })
    }

    pub fn with_op(mut self, name: &str, m: Monotonicity, table: Vec<usize>) -> Result<Self> {
        if table.len() != self.len() || table.iter().any(|&v| v >= self.len()) {
            return Err(Error::Invalid(format!("operation {name} does not map the carrier into itself")));
        }
        self.ops.insert(name.to_string(), (m, table));
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn r(&self, a: usize, b: usize) -> bool {
        self.rel[a * self.len() + b]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// First `(a, b, c)` with `a R b`, `b R c` but not `a R c`.
    pub fn transitivity_failure(&self) -> Option<(usize, usize, usize)> {
        let n = self.len();
        for a in 0..n {
            for b in 0..n {
                if !self.r(a, b) {
                    continue;
                }
                for c in 0..n {
                    if self.r(b, c) && !self.r(a, c) {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }

    /// First operation and pair breaking its monotonicity.
    pub fn monotonicity_failure(&self) -> Option<(String, usize, usize)> {
        let n = self.len();
        for (name, (m, t)) in &self.ops {
            for a in 0..n {
                for b in 0..n {
                    if !self.r(a, b) {
                        continue;
                    }
                    let ok = match m {
                        Monotonicity::Isotone => self.r(t[a], t[b]),
                        Monotonicity::Antitone => self.r(t[b], t[a]),
                    };
                    if !ok {
                        return Some((name.clone(), a, b));
                    }
                }
            }
        }
        None
    }
}

/// The amalgam over `A ∪ B` with the maps of A and B into it and the interpolants of every
/// cross pair `x R y`.
#[derive(Clone, Debug)]
pub struct RelationalAmalgam {
    pub d: RelationalStructure,
    pub a_into_d: Vec<usize>,
    pub b_into_d: Vec<usize>,
    pub interpolants: Vec<super::Interpolant>,
}

/// Amalgamation into union for transitive relations with R-isotone/antitone operations.
/// `C` is given by the shared names of `a` and `b`.
pub fn union_relational_amalgam(
    a: &RelationalStructure,
    b: &RelationalStructure,
    c: &RelationalStructure,
) -> Result<RelationalAmalgam> {
    let na: BTreeSet<&String> = a.names.iter().collect();
    let nb: BTreeSet<&String> = b.names.iter().collect();
    let nc: BTreeSet<&String> = c.names.iter().collect();
    if na.intersection(&nb).copied().collect::<BTreeSet<_>>() != nc {
        return Err(Error::Invalid("C must be exactly the shared part of A and B".into()));
    }
    for (label, s) in [("A", a), ("B", b), ("C", c)] {
        if let Some((x, y, z)) = s.transitivity_failure() {
            return Err(Error::Rejected(format!(
                "R is not transitive in {label}: ({}, {}, {})",
                s.names[x], s.names[y], s.names[z]
            )));
        }
        if let Some((op, x, y)) = s.monotonicity_failure() {
            return Err(Error::Rejected(format!(
                "{op} breaks its monotonicity in {label} at ({}, {})",
                s.names[x], s.names[y]
            )));
        }
    }
    let keys = |s: &RelationalStructure| s.ops.iter().map(|(k, (m, _))| (k.clone(), *m)).collect::<Vec<_>>();
    if keys(a) != keys(b) || keys(a) != keys(c) {
        return Err(Error::Invalid("A, B and C carry different operations".into()));
    }
    let ca: Vec<usize> = c.names.iter().map(|n| a.index_of(n).unwrap()).collect();
    let cb: Vec<usize> = c.names.iter().map(|n| b.index_of(n).unwrap()).collect();
    for (label, host, inc) in [("A", a, &ca), ("B", b, &cb)] {
        for x in 0..c.len() {
            for y in 0..c.len() {
                if c.r(x, y) != host.r(inc[x], inc[y]) {
                    return Err(Error::Invalid(format!("C's relation differs from {label}'s")));
                }
            }
            for (name, (_, t)) in &c.ops {
                if host.ops[name].1[inc[x]] != inc[t[x]] {
                    return Err(Error::Invalid(format!("{name} on C differs from {label}'s")));
                }
            }
        }
    }

    // union carrier: A, then B-only
    let mut names = a.names.clone();
    let b_into: Vec<usize> = (0..b.len())
        .map(|y| match c.index_of(&b.names[y]) {
            Some(z) => ca[z],
            None => {
                names.push(b.names[y].clone());
                names.len() - 1
            }
        })
        .collect();
    let a_into: Vec<usize> = (0..a.len()).collect();
    let n = names.len();
    let mut from_a = vec![None; n];
    let mut from_b = vec![None; n];
    for x in 0..a.len() {
        from_a[x] = Some(x);
    }
    for y in 0..b.len() {
        from_b[b_into[y]] = Some(y);
    }
    let via = |x: usize, y: usize, a_first: bool| -> Option<usize> {
        (0..c.len()).find(|&z| {
            if a_first {
                a.r(x, ca[z]) && b.r(cb[z], y)
            } else {
                b.r(x, cb[z]) && a.r(ca[z], y)
            }
        })
    };
    let mut rel = vec![false; n * n];
    for u in 0..n {
        for v in 0..n {
            let mut hit = matches!((from_a[u], from_a[v]), (Some(x), Some(y)) if a.r(x, y))
                || matches!((from_b[u], from_b[v]), (Some(x), Some(y)) if b.r(x, y));
            if !hit {
                if let (Some(x), Some(y)) = (from_a[u], from_b[v]) {
                    hit = via(x, y, true).is_some();
                }
            }
            if !hit {
                if let (Some(x), Some(y)) = (from_b[u], from_a[v]) {
                    hit = via(x, y, false).is_some();
                }
            }
            rel[u * n + v] = hit;
        }
    }
    let mut d = RelationalStructure { names, rel, ops: BTreeMap::new() };
    if let Some((x, y, z)) = d.transitivity_failure() {
        return Err(Error::Rejected(format!(
            "four-piece relation is not transitive at ({}, {}, {})",
            d.names[x], d.names[y], d.names[z]
        )));
    }
    for (name, (m, ta)) in &a.ops {
        let tb = &b.ops[name].1;
        let mut t = vec![0; n];
        t[..a.len()].copy_from_slice(&ta[..a.len()]);
        for y in 0..b.len() {
            t[b_into[y]] = b_into[tb[y]];
        }
        d.ops.insert(name.clone(), (*m, t));
    }
    if let Some((op, x, y)) = d.monotonicity_failure() {
        return Err(Error::Rejected(format!(
            "glued {op} breaks its monotonicity at ({}, {})",
            d.names[x], d.names[y]
        )));
    }

    let mut interpolants = Vec::new();
    for u in a.len()..n {
        let y = from_b[u].unwrap();
        for x in 0..a.len() {
            if from_b[x].is_some() {
                continue;
            }
            if d.r(x, u) {
                let z = via(x, y, true).unwrap();
                interpolants.push(super::Interpolant {
                    lower: a.names[x].clone(),
                    upper: b.names[y].clone(),
                    via: c.names[z].clone(),
                });
            }
            if d.r(u, x) {
                let z = via(y, x, false).unwrap();
                interpolants.push(super::Interpolant {
                    lower: b.names[y].clone(),
                    upper: a.names[x].clone(),
                    via: c.names[z].clone(),
                });
            }
        }
    }
    Ok(RelationalAmalgam { d, a_into_d: a_into, b_into_d: b_into, interpolants })
}
