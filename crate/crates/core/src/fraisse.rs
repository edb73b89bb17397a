//! Finite stages of a Fraïssé limit: the age of a class of expanded structures, a chain of
//! stages built by amalgamating over queued extension tasks, and a bounded check of the
//! extension property.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use rayon::prelude::*;

use crate::amalgam::{amalgamate_expanded, AmalgamationInstance};
use crate::error::{Error, Result};
use crate::order::{
    all_tuples, enumerate_structures, Embedding, FinitePoset, OpTable, Operation, Order, OrderedStructure,
    StructureKind,
};
use crate::partial_ext::{all_extensions, PartialOp, PropertySpec};

/// A class of finite structures: a base kind, added operations with their properties, an
/// optional fixed ∅-generated root, and a cap on stage sizes.
#[derive(Clone, Debug)]
pub struct ClassSpec {
    pub kind: StructureKind,
    pub ops: Vec<(String, PropertySpec)>,
    pub root: Option<OrderedStructure>,
    pub size_cap: usize,
}

impl ClassSpec {
    pub fn new(kind: StructureKind, ops: Vec<(String, PropertySpec)>) -> Self {
        ClassSpec { kind, ops, root: None, size_cap: 4096 }
    }

    pub fn with_root(mut self, root: OrderedStructure) -> Self {
        self.root = Some(root);
        self
    }

    /// Checks the kind is amalgamable here and that a root is present exactly when needed.
    pub fn check(&self) -> Result<()> {
        if self.kind == StructureKind::DistributiveLattice {
            return Err(Error::Unsupported("distributive lattices lack strong amalgamation".into()));
        }
        match &self.root {
            None if !self.kind.allows_empty() => Err(Error::Invalid(format!(
                "{} has constants: fix an ∅-generated root for joint embedding",
                self.kind
            ))),
            None => Ok(()),
            Some(r) => {
                if r.kind() != self.kind {
                    return Err(Error::Invalid("root has the wrong kind".into()));
                }
                if !self.is_member(r) {
                    return Err(Error::Invalid("root is not a member of the class".into()));
                }
                if r.generated(&[], true).0.len() != r.len() {
                    return Err(Error::Invalid("root is not ∅-generated".into()));
                }
                Ok(())
            }
        }
    }

    fn signature_matches(&self, s: &OrderedStructure) -> bool {
        s.ops().len() == self.ops.len()
            && self.ops.iter().all(|(name, w)| s.op(name).is_some_and(|op| op.property.as_ref() == Some(w)))
    }

    /// Kind, signature, validity and (with a root) containment of the root.
    pub fn is_member(&self, s: &OrderedStructure) -> bool {
        s.kind() == self.kind
            && self.signature_matches(s)
            && s.validate().is_valid()
            && self.root.as_ref().is_none_or(|r| {
                s.len() >= r.len() && find_embedding(r, s, &vec![None; r.len()]).is_some()
            })
    }

    fn empty_structure(&self) -> Result<OrderedStructure> {
        let mut s = OrderedStructure::new(self.kind, Vec::new(), FinitePoset::antichain(0))?;
        for (name, w) in &self.ops {
            s.set_op(name, Operation { property: Some(w.clone()), table: OpTable::from_fn(w.arity(), 0, |_| 0) })?;
        }
        Ok(s)
    }
}

/// All class members with at most `max_size` elements, one per isomorphism class, by size
/// and then canonical form.
pub fn age(spec: &ClassSpec, max_size: usize) -> Result<Vec<OrderedStructure>> {
    spec.check()?;
    let mut out = Vec::new();
    for size in 0..=max_size {
        let bases = enumerate_structures(spec.kind, size);
        let expanded: Vec<Vec<OrderedStructure>> = bases
            .par_iter()
            .map(|base| -> Result<Vec<OrderedStructure>> {
                let mut level = vec![base.clone()];
                for (name, w) in &spec.ops {
                    let tables = all_extensions(base, w, &PartialOp::new(w.arity()), 1 << 24)?;
                    let mut next = Vec::new();
                    for s in &level {
                        for t in &tables {
                            next.push(s.clone().with_op(name, Operation { property: Some(w.clone()), table: t.clone() })?);
                        }
                    }
                    level = next;
                }
                Ok(level)
            })
            .collect::<Result<_>>()?;
        let members: Vec<OrderedStructure> = expanded
            .into_iter()
            .flatten()
            .filter(|s| spec.root.is_none() || spec.is_member(s))
            .collect();
        out.extend(crate::order::dedup_canonical(members));
    }
    Ok(out)
}

/// First embedding `src → tgt` (preserving the kind's operations and every added operation
/// of `src`) that agrees with `fixed` where it is `Some`; candidates are tried in index order.
pub fn find_embedding(src: &OrderedStructure, tgt: &OrderedStructure, fixed: &[Option<usize>]) -> Option<Embedding> {
    let n = src.len();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; tgt.len()];
    for (x, f) in fixed.iter().enumerate() {
        if let Some(y) = *f {
            if used[y] {
                return None;
            }
            map[x] = y;
            used[y] = true;
        }
    }
    let free: Vec<usize> = (0..n).filter(|&x| fixed[x].is_none()).collect();
    fn go(
        i: usize,
        free: &[usize],
        src: &OrderedStructure,
        tgt: &OrderedStructure,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if i == free.len() {
            return Embedding { map: map.clone() }.verify(src, tgt, true).is_ok();
        }
        let x = free[i];
        for y in 0..tgt.len() {
            if used[y] {
                continue;
            }
            let consistent = (0..src.len()).all(|z| {
                map[z] == usize::MAX || (src.leq(x, z) == tgt.leq(y, map[z]) && src.leq(z, x) == tgt.leq(map[z], y))
            });
            if !consistent {
                continue;
            }
            map[x] = y;
            used[y] = true;
            if go(i + 1, free, src, tgt, map, used) {
                return true;
            }
            used[y] = false;
            map[x] = usize::MAX;
        }
        false
    }
    go(0, &free, src, tgt, &mut map, &mut used).then_some(Embedding { map })
}

/// Every embedding `src → tgt`, in lexicographic order of images.
pub fn all_embeddings(src: &OrderedStructure, tgt: &OrderedStructure) -> Vec<Embedding> {
    if src.is_empty() {
        return vec![Embedding { map: Vec::new() }];
    }
    all_tuples(tgt.len(), src.len())
        .filter(|m| {
            let mut seen = BTreeSet::new();
            m.iter().all(|&y| seen.insert(y))
        })
        .map(|map| Embedding { map })
        .filter(|e| e.verify(src, tgt, true).is_ok())
        .collect()
}

/// A class member `B` with a proper substructure `A`, given as the sorted subset of `B`.
#[derive(Clone, Debug)]
pub struct ClassPair {
    pub b: OrderedStructure,
    pub a_subset: Vec<usize>,
    pub a: OrderedStructure,
}

/// Every pair `A ⊊ B` with `|B| ≤ cap`, `B` from the age and `A` a substructure of `B`
/// that is itself a class member.
pub fn class_pairs(spec: &ClassSpec, cap: usize) -> Result<Vec<ClassPair>> {
    let mut out = Vec::new();
    for b in age(spec, cap)? {
        let mut seen = BTreeSet::new();
        for mask in 0u64..(1 << b.len()) {
            let gens: Vec<usize> = (0..b.len()).filter(|i| mask >> i & 1 == 1).collect();
            let (_, inc) = b.generated(&gens, true);
            let subset = inc.map;
            if subset.len() == b.len() || !seen.insert(subset.clone()) {
                continue;
            }
            let a = b.induced(&subset);
            if spec.is_member(&a) {
                out.push(ClassPair { b: b.clone(), a_subset: subset, a });
            }
        }
    }
    Ok(out)
}

/// "Extend `e: A → M_stage` to `B`", where `A ⊆ B` is `pairs[pair]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Task {
    pub pair: usize,
    pub stage: usize,
    pub e: Embedding,
}

/// An extension task that `m` cannot realize.
#[derive(Clone, Debug)]
pub struct MissingTask {
    pub pair: usize,
    pub b_size: usize,
    /// Names in `m` of the images of `A`'s elements.
    pub image: Vec<String>,
}

impl fmt::Display for MissingTask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pair #{} (|B| = {}) over [{}]", self.pair, self.b_size, self.image.join(", "))
    }
}

#[derive(Clone, Debug)]
pub struct ExtensionReport {
    pub holds: bool,
    pub checked: usize,
    pub missing: Vec<MissingTask>,
}

fn realizes(m: &OrderedStructure, p: &ClassPair, e: &Embedding) -> bool {
    let mut fixed = vec![None; p.b.len()];
    for (i, &x) in p.a_subset.iter().enumerate() {
        fixed[x] = Some(e.apply(i));
    }
    find_embedding(&p.b, m, &fixed).is_some()
}

fn extension_check(
    m: &OrderedStructure,
    pairs: &[ClassPair],
    within: Option<&BTreeSet<usize>>,
) -> ExtensionReport {
    let results: Vec<(usize, Vec<MissingTask>)> = pairs
        .par_iter()
        .enumerate()
        .map(|(pi, p)| {
            let mut checked = 0;
            let mut missing = Vec::new();
            for e in all_embeddings(&p.a, m) {
                if within.is_some_and(|w| !e.map.iter().all(|x| w.contains(x))) {
                    continue;
                }
                checked += 1;
                if !realizes(m, p, &e) {
                    missing.push(MissingTask {
                        pair: pi,
                        b_size: p.b.len(),
                        image: e.map.iter().map(|&x| m.name(x).to_string()).collect(),
                    });
                }
            }
            (checked, missing)
        })
        .collect();
    let checked = results.iter().map(|r| r.0).sum();
    let missing: Vec<MissingTask> = results.into_iter().flat_map(|r| r.1).collect();
    ExtensionReport { holds: missing.is_empty(), checked, missing }
}

/// Whether every embedding `A → m` of a class pair with `|B| ≤ cap` extends to `B → m`.
pub fn check_extension_property(m: &OrderedStructure, spec: &ClassSpec, cap: usize) -> Result<ExtensionReport> {
    Ok(extension_check(m, &class_pairs(spec, cap)?, None))
}

/// Like [`check_extension_property`], restricted to embeddings of `A` landing inside `within`.
pub fn check_extension_property_within(
    m: &OrderedStructure,
    spec: &ClassSpec,
    cap: usize,
    within: &[usize],
) -> Result<ExtensionReport> {
    let w: BTreeSet<usize> = within.iter().copied().collect();
    Ok(extension_check(m, &class_pairs(spec, cap)?, Some(&w)))
}

/// Stages `M_0 ⊆ M_1 ⊆ ...` with the inclusion of each stage into the next, the class
/// pairs tasks refer to, and the tasks left after the last round.
#[derive(Clone, Debug)]
pub struct FraisseChain {
    pub stages: Vec<OrderedStructure>,
    pub inclusions: Vec<Embedding>,
    pub pairs: Vec<ClassPair>,
    pub queue: VecDeque<Task>,
    /// Stage index current at the start of each round.
    pub round_starts: Vec<usize>,
    /// Tasks processed and how many of them needed a new stage.
    pub processed: usize,
    pub amalgamated: usize,
}

impl FraisseChain {
    pub fn last(&self) -> &OrderedStructure {
        self.stages.last().expect("a chain has a first stage")
    }

    /// Composite inclusion of stage `i` into stage `j ≥ i`.
    pub fn inclusion(&self, i: usize, j: usize) -> Embedding {
        (i..j).fold(Embedding::identity(self.stages[i].len()), |acc, k| acc.then(&self.inclusions[k]))
    }

    pub fn is_drained(&self) -> bool {
        self.queue.is_empty()
    }
}

fn tasks_for(pairs: &[ClassPair], m: &OrderedStructure, stage: usize, old: Option<&BTreeSet<usize>>) -> Vec<Task> {
    let per_pair: Vec<Vec<Task>> = pairs
        .par_iter()
        .enumerate()
        .map(|(pi, p)| {
            all_embeddings(&p.a, m)
                .into_iter()
                .filter(|e| old.is_none_or(|o| !e.map.iter().all(|x| o.contains(x))))
                .filter(|e| !realizes(m, p, e))
                .map(|e| Task { pair: pi, stage, e })
                .collect()
        })
        .collect();
    per_pair.into_iter().flatten().collect()
}

/// Renames every element of `d` outside `keep` to `n<counter>`.
fn fresh_rename(d: &mut OrderedStructure, keep: &[usize], counter: &mut usize) {
    let kept: BTreeSet<usize> = keep.iter().copied().collect();
    let taken: BTreeSet<String> = keep.iter().map(|&x| d.name(x).to_string()).collect();
    let mut names = d.names().to_vec();
    for (x, name) in names.iter_mut().enumerate() {
        if !kept.contains(&x) {
            loop {
                let cand = format!("n{counter}");
                *counter += 1;
                if !taken.contains(&cand) {
                    *name = cand;
                    break;
                }
            }
        }
    }
    d.rename(names);
}

/// Runs `steps` rounds. Each round takes the whole current queue in FIFO order; a task
/// already realized in the current stage is dropped, otherwise the stage is amalgamated with
/// `B` over `A`. After the round, tasks are queued for every embedding into the last stage
/// that does not land inside the stage the round started from.
pub fn build_chain(spec: &ClassSpec, steps: usize, pair_size_cap: usize) -> Result<FraisseChain> {
    spec.check()?;
    let pairs = class_pairs(spec, pair_size_cap)?;
    let mut counter = 0usize;
    let mut m0 = match &spec.root {
        Some(r) => r.clone(),
        None => spec.empty_structure()?,
    };
    let all: Vec<usize> = Vec::new();
    fresh_rename(&mut m0, &all, &mut counter);
    let queue: VecDeque<Task> = tasks_for(&pairs, &m0, 0, None).into();
    let mut chain = FraisseChain {
        stages: vec![m0],
        inclusions: Vec::new(),
        pairs,
        queue,
        round_starts: Vec::new(),
        processed: 0,
        amalgamated: 0,
    };
    for _ in 0..steps {
        let start = chain.stages.len() - 1;
        chain.round_starts.push(start);
        let batch: Vec<Task> = chain.queue.drain(..).collect();
        if batch.is_empty() {
            break;
        }
        for task in batch {
            chain.processed += 1;
            let cur = chain.stages.len() - 1;
            let e = task.e.then(&chain.inclusion(task.stage, cur));
            let p = &chain.pairs[task.pair];
            let m = chain.last();
            if realizes(m, p, &e) {
                continue;
            }
            let next = amalgamate_over(m, p, &e, &mut counter)?;
            if next.0.len() > spec.size_cap {
                return Err(Error::BoundExceeded(format!(
                    "stage {} would have {} elements, cap is {}",
                    cur + 1,
                    next.0.len(),
                    spec.size_cap
                )));
            }
            chain.stages.push(next.0);
            chain.inclusions.push(next.1);
            chain.amalgamated += 1;
        }
        let last = chain.stages.len() - 1;
        let old: BTreeSet<usize> = chain.inclusion(start, last).map.into_iter().collect();
        chain.queue = tasks_for(&chain.pairs, chain.last(), last, Some(&old)).into();
    }
    Ok(chain)
}

/// Amalgamates `m` and `B` over `A`, where `A` sits in `m` through `e`.
fn amalgamate_over(
    m: &OrderedStructure,
    p: &ClassPair,
    e: &Embedding,
    counter: &mut usize,
) -> Result<(OrderedStructure, Embedding)> {
    // B's copy: A's elements take their names in m, the rest get fresh names
    let mut in_a: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, &x) in p.a_subset.iter().enumerate() {
        in_a.insert(x, e.apply(i));
    }
    let taken: BTreeSet<&str> = m.names().iter().map(String::as_str).collect();
    let mut names = Vec::with_capacity(p.b.len());
    for y in 0..p.b.len() {
        match in_a.get(&y) {
            Some(&x) => names.push(m.name(x).to_string()),
            None => loop {
                let cand = format!("n{counter}");
                *counter += 1;
                if !taken.contains(cand.as_str()) {
                    names.push(cand);
                    break;
                }
            },
        }
    }
    let mut b = p.b.clone();
    b.rename(names);
    let c_subset: Vec<usize> = {
        let mut v: Vec<usize> = e.map.clone();
        v.sort_unstable();
        v
    };
    let c = m.induced(&c_subset);
    let inst = AmalgamationInstance::new(m.clone(), b, c)?;
    let r = amalgamate_expanded(&inst, &[])
        .map_err(|err| Error::Internal(format!("amalgamation failed inside the chain: {err}")))?;
    let mut d = r.d;
    fresh_rename(&mut d, &r.a_into_d.map, counter);
    Ok((d, r.a_into_d))
}
