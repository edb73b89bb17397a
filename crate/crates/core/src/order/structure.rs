use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::partial_ext::{verify_property, PropertySpec};

use super::{FinitePoset, Order, OrderViolation};

/// The base classes handled by the library, weakest first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StructureKind {
    Poset,
    MeetSemilattice,
    JoinSemilattice,
    Lattice,
    BoundedLattice,
    DistributiveLattice,
    BooleanAlgebra,
}

impl StructureKind {
    pub const ALL: [StructureKind; 7] = [
        StructureKind::Poset,
        StructureKind::MeetSemilattice,
        StructureKind::JoinSemilattice,
        StructureKind::Lattice,
        StructureKind::BoundedLattice,
        StructureKind::DistributiveLattice,
        StructureKind::BooleanAlgebra,
    ];

    pub fn has_meet(self) -> bool {
        !matches!(self, StructureKind::Poset | StructureKind::JoinSemilattice)
    }

    pub fn has_join(self) -> bool {
        !matches!(self, StructureKind::Poset | StructureKind::MeetSemilattice)
    }

    pub fn is_lattice(self) -> bool {
        self.has_meet() && self.has_join()
    }

    pub fn is_bounded(self) -> bool {
        self >= StructureKind::BoundedLattice
    }

    pub fn is_distributive(self) -> bool {
        self >= StructureKind::DistributiveLattice
    }

    pub fn is_boolean(self) -> bool {
        self == StructureKind::BooleanAlgebra
    }

    pub fn allows_empty(self) -> bool {
        !self.is_bounded()
    }

    /// Whether every structure of kind `self` is also one of kind `weaker`.
    pub fn implies(self, weaker: StructureKind) -> bool {
        (!weaker.has_meet() || self.has_meet())
            && (!weaker.has_join() || self.has_join())
            && (!weaker.is_bounded() || self.is_bounded())
            && (!weaker.is_distributive() || self.is_distributive())
            && (!weaker.is_boolean() || self.is_boolean())
    }

    pub fn name(self) -> &'static str {
        match self {
            StructureKind::Poset => "poset",
            StructureKind::MeetSemilattice => "meet-semilattice",
            StructureKind::JoinSemilattice => "join-semilattice",
            StructureKind::Lattice => "lattice",
            StructureKind::BoundedLattice => "bounded-lattice",
            StructureKind::DistributiveLattice => "distributive-lattice",
            StructureKind::BooleanAlgebra => "boolean-algebra",
        }
    }
}

impl fmt::Display for StructureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StructureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "poset" => StructureKind::Poset,
            "meet-semilattice" | "msl" => StructureKind::MeetSemilattice,
            "join-semilattice" | "jsl" => StructureKind::JoinSemilattice,
            "lattice" => StructureKind::Lattice,
            "bounded-lattice" => StructureKind::BoundedLattice,
            "distributive-lattice" | "distributive" | "dl" => StructureKind::DistributiveLattice,
            "boolean-algebra" | "boolean" | "ba" => StructureKind::BooleanAlgebra,
            other => return Err(Error::Invalid(format!("unknown kind `{other}`"))),
        })
    }
}

/// A total operation table on `0..size`; arguments are read most-significant first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OpTable {
    arity: usize,
    size: usize,
    values: Vec<usize>,
}

impl OpTable {
    pub fn new(arity: usize, size: usize, values: Vec<usize>) -> Result<Self> {
        if arity == 0 {
            return Err(Error::Invalid("operations must have arity at least 1".into()));
        }
        if values.len() != size.pow(arity as u32) {
            return Err(Error::Invalid(format!(
                "table has {} entries, expected {}",
                values.len(),
                size.pow(arity as u32)
            )));
        }
        if let Some(&v) = values.iter().find(|&&v| v >= size) {
            return Err(Error::UnknownElement(v.to_string()));
        }
        Ok(OpTable { arity, size, values })
    }

    pub fn unary(values: Vec<usize>) -> Result<Self> {
        let n = values.len();
        Self::new(1, n, values)
    }

    pub fn from_fn(arity: usize, size: usize, mut f: impl FnMut(&[usize]) -> usize) -> Self {
        let total = size.pow(arity as u32);
        let mut values = Vec::with_capacity(total);
        let mut args = vec![0; arity];
        for idx in 0..total {
            decode(idx, size, &mut args);
            values.push(f(&args));
        }
        OpTable { arity, size, values }
    }

    pub fn identity(size: usize) -> Self {
        OpTable { arity: 1, size, values: (0..size).collect() }
    }

    pub fn constant(arity: usize, size: usize, c: usize) -> Self {
        Self::from_fn(arity, size, |_| c)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn index_of(&self, args: &[usize]) -> usize {
        debug_assert_eq!(args.len(), self.arity);
        args.iter().fold(0, |acc, &a| acc * self.size + a)
    }

    pub fn get(&self, args: &[usize]) -> usize {
        self.values[self.index_of(args)]
    }

    pub fn apply(&self, x: usize) -> usize {
        self.values[x]
    }

    /// All argument tuples in table order.
    pub fn tuples(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        all_tuples(self.size, self.arity)
    }

    /// Rewrites the table along a relabeling: new element `perm[i]` is old `i`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        let mut values = vec![0; self.values.len()];
        for args in self.tuples() {
            let image: Vec<usize> = args.iter().map(|&a| perm[a]).collect();
            values[self.index_of(&image)] = perm[self.get(&args)];
        }
        OpTable { arity: self.arity, size: self.size, values }
    }
}

pub(crate) fn decode(mut idx: usize, size: usize, args: &mut [usize]) {
    for slot in args.iter_mut().rev() {
        *slot = idx % size;
        idx /= size;
    }
}

/// Every `arity`-tuple over `0..size`, lexicographically.
pub fn all_tuples(size: usize, arity: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = if size == 0 { 0 } else { size.pow(arity as u32) };
    (0..total).map(move |idx| {
        let mut args = vec![0; arity];
        decode(idx, size, &mut args);
        args
    })
}

/// A named added operation: its table and, optionally, the property it must satisfy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Operation {
    pub property: Option<PropertySpec>,
    pub table: OpTable,
}

/// One failed invariant, with element names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Order(String),
    DuplicateName(String),
    EmptyBounded,
    MissingMeet(String, String),
    MissingJoin(String, String),
    MissingBottom,
    MissingTop,
    NotDistributive(String, String, String),
    MissingComplement(String),
    Operation { op: String, detail: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Order(s) => write!(f, "{s}"),
            Violation::DuplicateName(n) => write!(f, "duplicate element name `{n}`"),
            Violation::EmptyBounded => write!(f, "bounded kinds cannot be empty"),
            Violation::MissingMeet(a, b) => write!(f, "no meet of {a} and {b}"),
            Violation::MissingJoin(a, b) => write!(f, "no join of {a} and {b}"),
            Violation::MissingBottom => write!(f, "no least element"),
            Violation::MissingTop => write!(f, "no greatest element"),
            Violation::NotDistributive(a, b, c) => {
                write!(f, "distributive law fails at ({a}, {b}, {c})")
            }
            Violation::MissingComplement(a) => write!(f, "{a} has no complement"),
            Violation::Operation { op, detail } => write!(f, "operation {op}: {detail}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join("; "))
    }
}

/// A poset tagged with a kind, the tables that kind requires, and named added operations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedStructure {
    kind: StructureKind,
    names: Vec<String>,
    poset: FinitePoset,
    join: Option<Vec<usize>>,
    meet: Option<Vec<usize>>,
    complement: Option<Vec<usize>>,
    bottom: Option<usize>,
    top: Option<usize>,
    ops: BTreeMap<String, Operation>,
}

pub fn default_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("e{i}")).collect()
}

impl OrderedStructure {
    /// Builds and validates; fails with every violation listed.
    pub fn new(kind: StructureKind, names: Vec<String>, poset: FinitePoset) -> Result<Self> {
        let s = Self::new_unchecked(kind, names, poset);
        let report = s.validate();
        if report.is_valid() {
            Ok(s)
        } else {
            Err(Error::Invalid(report.to_string()))
        }
    }

    /// Like [`new`](Self::new) with names `e0, e1, ...`.
    pub fn from_poset(kind: StructureKind, poset: FinitePoset) -> Result<Self> {
        let n = poset.len();
        Self::new(kind, default_names(n), poset)
    }

    /// Fills in whatever tables exist without checking the kind's requirements.
    pub fn new_unchecked(kind: StructureKind, names: Vec<String>, poset: FinitePoset) -> Self {
        assert_eq!(names.len(), poset.len());
        let n = poset.len();
        let pair_table = |f: &dyn Fn(usize, usize) -> Option<usize>| -> Option<Vec<usize>> {
            let mut t = Vec::with_capacity(n * n);
            for a in 0..n {
                for b in 0..n {
                    t.push(f(a, b)?);
                }
            }
            Some(t)
        };
        let join = if kind.has_join() { pair_table(&|a, b| poset.join(a, b)) } else { None };
        let meet = if kind.has_meet() { pair_table(&|a, b| poset.meet(a, b)) } else { None };
        let bottom = poset.minimum();
        let top = poset.maximum();
        let mut s = OrderedStructure {
            kind,
            names,
            poset,
            join,
            meet,
            complement: None,
            bottom,
            top,
            ops: BTreeMap::new(),
        };
        if kind.is_boolean() {
            s.complement = s.compute_complements();
        }
        s
    }

    fn compute_complements(&self) -> Option<Vec<usize>> {
        let (bot, top) = (self.bottom?, self.top?);
        let n = self.len();
        (0..n)
            .map(|a| (0..n).find(|&c| self.meet2(a, c) == Some(bot) && self.join2(a, c) == Some(top)))
            .collect()
    }

    /// Takes precomputed join/meet tables (row-major, `n*n`) without recomputing or validating.
    pub(crate) fn from_tables(
        kind: StructureKind,
        names: Vec<String>,
        poset: FinitePoset,
        join: Option<Vec<usize>>,
        meet: Option<Vec<usize>>,
    ) -> Self {
        let n = poset.len();
        assert_eq!(names.len(), n);
        let mut s = OrderedStructure {
            kind,
            names,
            bottom: poset.minimum(),
            top: poset.maximum(),
            poset,
            join,
            meet,
            complement: None,
            ops: BTreeMap::new(),
        };
        if kind.is_boolean() {
            s.complement = s.compute_complements();
        }
        s
    }

    /// Checks every invariant of the kind and every added operation's property.
    pub fn validate(&self) -> ValidationReport {
        let mut v = Vec::new();
        let nm = |i: usize| self.names[i].clone();
        for ov in self.poset.violations() {
            let s = match ov {
                OrderViolation::Reflexivity(a) => format!("not reflexive at {}", nm(a)),
                OrderViolation::Antisymmetry(a, b) => {
                    format!("antisymmetry fails at ({}, {})", nm(a), nm(b))
                }
                OrderViolation::Transitivity(a, b, c) => {
                    format!("transitivity fails at ({}, {}, {})", nm(a), nm(b), nm(c))
                }
            };
            v.push(Violation::Order(s));
        }
        let mut seen = std::collections::BTreeSet::new();
        for n in &self.names {
            if !seen.insert(n) {
                v.push(Violation::DuplicateName(n.clone()));
            }
        }
        if !v.is_empty() {
            return ValidationReport { violations: v };
        }
        let n = self.len();
        let p = &self.poset;
        if n == 0 && !self.kind.allows_empty() {
            v.push(Violation::EmptyBounded);
        }
        if self.kind.has_join() && self.join.is_none() {
            if let Some((a, b)) = pairs(n).find(|&(a, b)| p.join(a, b).is_none()) {
                v.push(Violation::MissingJoin(nm(a), nm(b)));
            }
        }
        if self.kind.has_meet() && self.meet.is_none() {
            if let Some((a, b)) = pairs(n).find(|&(a, b)| p.meet(a, b).is_none()) {
                v.push(Violation::MissingMeet(nm(a), nm(b)));
            }
        }
        if self.kind.is_bounded() && n > 0 {
            if self.bottom.is_none() {
                v.push(Violation::MissingBottom);
            }
            if self.top.is_none() {
                v.push(Violation::MissingTop);
            }
        }
        if self.kind.is_distributive() && v.is_empty() {
            if let Some((a, b, c)) = self.distributivity_failure() {
                v.push(Violation::NotDistributive(nm(a), nm(b), nm(c)));
            }
        }
        if self.kind.is_boolean() && v.is_empty() {
            match &self.complement {
                Some(_) => {}
                None => {
                    let a = (0..n)
                        .find(|&a| {
                            !(0..n).any(|c| {
                                p.meet(a, c) == self.bottom && p.join(a, c) == self.top
                            })
                        })
                        .unwrap_or(0);
                    v.push(Violation::MissingComplement(nm(a)));
                }
            }
        }
        for (name, op) in &self.ops {
            if op.table.size() != n {
                v.push(Violation::Operation {
                    op: name.clone(),
                    detail: format!("table over {} elements, carrier has {n}", op.table.size()),
                });
                continue;
            }
            if let Some(w) = &op.property {
                if w.arity() != op.table.arity() {
                    v.push(Violation::Operation {
                        op: name.clone(),
                        detail: format!("property {w} needs arity {}", w.arity()),
                    });
                } else if let Some(bad) = verify_property(self, w, &op.table) {
                    v.push(Violation::Operation {
                        op: name.clone(),
                        detail: bad.describe(self),
                    });
                }
            }
        }
        ValidationReport { violations: v }
    }

    /// First triple violating `a ∧ (b ∨ c) = (a ∧ b) ∨ (a ∧ c)`.
    pub fn distributivity_failure(&self) -> Option<(usize, usize, usize)> {
        if self.is_atomic_powerset() {
            return None;
        }
        let n = self.len();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let lhs = self.join2(b, c).and_then(|bc| self.meet2(a, bc));
                    let rhs = match (self.meet2(a, b), self.meet2(a, c)) {
                        (Some(x), Some(y)) => self.join2(x, y),
                        _ => None,
                    };
                    if lhs != rhs {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }

    /// Whether `x ↦ {atoms below x}` is an order isomorphism onto the full powerset of atoms;
    /// a quick sufficient test for being Boolean (hence distributive).
    fn is_atomic_powerset(&self) -> bool {
        let n = self.len();
        let Some(bot) = self.bottom else { return false };
        let p = &self.poset;
        let atoms: Vec<usize> =
            (0..n).filter(|&x| p.lt(bot, x) && !(0..n).any(|c| p.lt(bot, c) && p.lt(c, x))).collect();
        if atoms.len() >= 20 || n != 1 << atoms.len() {
            return false;
        }
        let mask = |x: usize| {
            atoms.iter().enumerate().filter(|&(_, &a)| self.leq(a, x)).fold(0usize, |m, (i, _)| m | 1 << i)
        };
        let masks: Vec<usize> = (0..n).map(mask).collect();
        let mut seen = vec![false; n];
        for &m in &masks {
            if std::mem::replace(&mut seen[m], true) {
                return false;
            }
        }
        pairs(n).all(|(a, b)| self.leq(a, b) == (masks[a] & masks[b] == masks[a]))
    }

    pub fn len(&self) -> usize {
        self.poset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poset.len() == 0
    }

    pub fn kind(&self) -> StructureKind {
        self.kind
    }

    pub fn poset(&self) -> &FinitePoset {
        &self.poset
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn bottom(&self) -> Option<usize> {
        self.bottom
    }

    pub fn top(&self) -> Option<usize> {
        self.top
    }

    pub fn complement(&self, a: usize) -> Option<usize> {
        self.complement.as_ref().map(|c| c[a])
    }

    pub fn ops(&self) -> &BTreeMap<String, Operation> {
        &self.ops
    }

    pub fn op(&self, name: &str) -> Option<&Operation> {
        self.ops.get(name)
    }

    /// Adds or replaces an operation; the table must match the carrier.
    pub fn set_op(&mut self, name: &str, op: Operation) -> Result<()> {
        if op.table.size() != self.len() {
            return Err(Error::Invalid(format!(
                "operation {name} has a table over {} elements, carrier has {}",
                op.table.size(),
                self.len()
            )));
        }
        if let Some(w) = &op.property {
            if w.arity() != op.table.arity() {
                return Err(Error::Arity { expected: w.arity(), found: op.table.arity() });
            }
        }
        self.ops.insert(name.to_string(), op);
        Ok(())
    }

    pub fn with_op(mut self, name: &str, op: Operation) -> Result<Self> {
        self.set_op(name, op)?;
        Ok(self)
    }

    /// Drops every added operation.
    pub fn reduct(&self) -> Self {
        let mut s = self.clone();
        s.ops.clear();
        s
    }

    /// Reinterprets the same order as another kind, re-validating.
    pub fn retag(&self, kind: StructureKind) -> Result<Self> {
        let mut s = Self::new(kind, self.names.clone(), self.poset.clone())?;
        s.ops = self.ops.clone();
        Ok(s)
    }

    pub fn rename(&mut self, names: Vec<String>) {
        assert_eq!(names.len(), self.names.len());
        self.names = names;
    }

    /// Relabels so that old element `i` becomes `perm[i]`, carrying names and operations.
    pub fn permute(&self, perm: &[usize]) -> Self {
        let n = self.len();
        let mut names = vec![String::new(); n];
        for i in 0..n {
            names[perm[i]] = self.names[i].clone();
        }
        let mut s = Self::new_unchecked(self.kind, names, self.poset.permute(perm));
        for (k, op) in &self.ops {
            s.ops.insert(
                k.clone(),
                Operation { property: op.property.clone(), table: op.table.permute(perm) },
            );
        }
        s
    }

    /// Join of two elements, if it exists.
    pub fn join2(&self, a: usize, b: usize) -> Option<usize> {
        match &self.join {
            Some(t) => Some(t[a * self.len() + b]),
            None => self.poset.join(a, b),
        }
    }

    pub fn meet2(&self, a: usize, b: usize) -> Option<usize> {
        match &self.meet {
            Some(t) => Some(t[a * self.len() + b]),
            None => self.poset.meet(a, b),
        }
    }

    /// Closure of `gens` under the operations of the kind (and optionally the added ones),
    /// with the inclusion map. Members keep their original relative order.
    pub fn generated(&self, gens: &[usize], with_ops: bool) -> (OrderedStructure, Embedding) {
        let n = self.len();
        let mut inside = vec![false; n];
        let mut members: Vec<usize> = Vec::new();
        let push = |x: usize, inside: &mut Vec<bool>, members: &mut Vec<usize>| {
            if !inside[x] {
                inside[x] = true;
                members.push(x);
            }
        };
        for &g in gens {
            push(g, &mut inside, &mut members);
        }
        if self.kind.is_bounded() && n > 0 {
            push(self.bottom.unwrap(), &mut inside, &mut members);
            push(self.top.unwrap(), &mut inside, &mut members);
        }
        loop {
            let before = members.len();
            let snapshot = members.clone();
            for &a in &snapshot {
                if self.kind.is_boolean() {
                    push(self.complement(a).unwrap(), &mut inside, &mut members);
                }
                for &b in &snapshot {
                    if self.kind.has_join() {
                        push(self.join2(a, b).unwrap(), &mut inside, &mut members);
                    }
                    if self.kind.has_meet() {
                        push(self.meet2(a, b).unwrap(), &mut inside, &mut members);
                    }
                }
            }
            if with_ops {
                for op in self.ops.values() {
                    let k = op.table.arity();
                    let snap = members.clone();
                    for args in all_tuples(snap.len(), k) {
                        let real: Vec<usize> = args.iter().map(|&i| snap[i]).collect();
                        push(op.table.get(&real), &mut inside, &mut members);
                    }
                }
            }
            if members.len() == before {
                break;
            }
        }
        members.sort_unstable();
        let sub = self.induced(&members);
        let sub = if with_ops { sub } else { sub.reduct() };
        (sub, Embedding { map: members })
    }

    /// The substructure on `subset` (assumed closed under every operation that is kept).
    pub fn induced(&self, subset: &[usize]) -> OrderedStructure {
        let names = subset.iter().map(|&i| self.names[i].clone()).collect();
        let mut s = Self::new_unchecked(self.kind, names, self.poset.induced(subset));
        let mut pos = vec![usize::MAX; self.len()];
        for (i, &x) in subset.iter().enumerate() {
            pos[x] = i;
        }
        for (k, op) in &self.ops {
            let ar = op.table.arity();
            let closed = all_tuples(subset.len(), ar).all(|args| {
                let real: Vec<usize> = args.iter().map(|&i| subset[i]).collect();
                pos[op.table.get(&real)] != usize::MAX
            });
            if closed {
                let table = OpTable::from_fn(ar, subset.len(), |args| {
                    let real: Vec<usize> = args.iter().map(|&i| subset[i]).collect();
                    pos[op.table.get(&real)]
                });
                s.ops.insert(k.clone(), Operation { property: op.property.clone(), table });
            }
        }
        s
    }
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |a| (0..n).map(move |b| (a, b)))
}

impl Order for OrderedStructure {
    fn len(&self) -> usize {
        self.poset.len()
    }

    fn leq(&self, a: usize, b: usize) -> bool {
        self.poset.leq(a, b)
    }

    fn label(&self, a: usize) -> String {
        self.names[a].clone()
    }

    fn meet_of(&self, elems: &[usize]) -> Option<usize> {
        match (&self.meet, elems.split_first()) {
            (Some(_), Some((&first, rest))) => {
                Some(rest.iter().fold(first, |acc, &e| self.meet2(acc, e).unwrap()))
            }
            (_, None) => self.top,
            _ => self.poset.meet_of(elems),
        }
    }

    fn join_of(&self, elems: &[usize]) -> Option<usize> {
        match (&self.join, elems.split_first()) {
            (Some(_), Some((&first, rest))) => {
                Some(rest.iter().fold(first, |acc, &e| self.join2(acc, e).unwrap()))
            }
            (_, None) => self.bottom,
            _ => self.poset.join_of(elems),
        }
    }
}

/// An injective element map; correctness is checked against a source and target by
/// [`Embedding::verify`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub map: Vec<usize>,
}

impl Embedding {
    pub fn identity(n: usize) -> Self {
        Embedding { map: (0..n).collect() }
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    /// `other` after `self`.
    pub fn then(&self, other: &Embedding) -> Embedding {
        Embedding { map: self.map.iter().map(|&x| other.map[x]).collect() }
    }

    /// Checks injectivity, order embedding, the operations required by the source kind,
    /// and (when `with_ops`) every added operation of the source.
    pub fn verify(
        &self,
        src: &OrderedStructure,
        tgt: &OrderedStructure,
        with_ops: bool,
    ) -> std::result::Result<(), String> {
        let n = src.len();
        if self.map.len() != n {
            return Err(format!("map has {} entries for {n} elements", self.map.len()));
        }
        if let Some(&x) = self.map.iter().find(|&&x| x >= tgt.len()) {
            return Err(format!("image {x} outside the target"));
        }
        let f = |x: usize| self.map[x];
        for a in 0..n {
            for b in 0..n {
                if a != b && f(a) == f(b) {
                    return Err(format!("not injective: {} and {}", src.name(a), src.name(b)));
                }
                if src.leq(a, b) != tgt.leq(f(a), f(b)) {
                    return Err(format!("order not reflected at ({}, {})", src.name(a), src.name(b)));
                }
                if src.kind.has_join() && tgt.join2(f(a), f(b)) != src.join2(a, b).map(f) {
                    return Err(format!("join of {} and {} not preserved", src.name(a), src.name(b)));
                }
                if src.kind.has_meet() && tgt.meet2(f(a), f(b)) != src.meet2(a, b).map(f) {
                    return Err(format!("meet of {} and {} not preserved", src.name(a), src.name(b)));
                }
            }
        }
        if src.kind.is_bounded() && n > 0
            && (tgt.bottom() != src.bottom().map(f) || tgt.top() != src.top().map(f)) {
                return Err("bounds not preserved".into());
            }
        if src.kind.is_boolean() {
            for a in 0..n {
                if tgt.complement(f(a)) != src.complement(a).map(f) {
                    return Err(format!("complement of {} not preserved", src.name(a)));
                }
            }
        }
        if with_ops {
            for (name, op) in src.ops() {
                let Some(top) = tgt.op(name) else {
                    return Err(format!("target lacks operation {name}"));
                };
                for args in op.table.tuples() {
                    let image: Vec<usize> = args.iter().map(|&a| f(a)).collect();
                    if top.table.get(&image) != f(op.table.get(&args)) {
                        return Err(format!("operation {name} not preserved at {args:?}"));
                    }
                }
            }
        }
        Ok(())
    }
}
