use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::order::{Embedding, Order, OrderedStructure, StructureKind};

/// Three structures of one kind with `C = A ∩ B` as sets of element names, and C a
/// substructure of both.
#[derive(Clone, Debug)]
pub struct AmalgamationInstance {
    a: OrderedStructure,
    b: OrderedStructure,
    c: OrderedStructure,
    c_in_a: Embedding,
    c_in_b: Embedding,
}

impl AmalgamationInstance {
    pub fn new(a: OrderedStructure, b: OrderedStructure, c: OrderedStructure) -> Result<Self> {
        let kind = c.kind();
        if a.kind() != kind || b.kind() != kind {
            return Err(Error::Invalid(format!(
                "kinds differ: A is {}, B is {}, C is {}",
                a.kind(),
                b.kind(),
                kind
            )));
        }
        if c.is_empty() && !kind.allows_empty() {
            return Err(Error::Invalid(format!("empty base structure is not a {kind}")));
        }
        let names = |s: &OrderedStructure| s.names().iter().cloned().collect::<BTreeSet<String>>();
        let (na, nb, nc) = (names(&a), names(&b), names(&c));
        let shared: BTreeSet<String> = na.intersection(&nb).cloned().collect();
        if shared != nc {
            return Err(Error::Invalid(format!(
                "A ∩ B is {{{}}} but C is {{{}}}",
                join(&shared),
                join(&nc)
            )));
        }
        let signature = |s: &OrderedStructure| {
            s.ops().iter().map(|(k, op)| (k.clone(), op.property.clone(), op.table.arity())).collect::<Vec<_>>()
        };
        if signature(&a) != signature(&b) || signature(&a) != signature(&c) {
            return Err(Error::Invalid("A, B and C carry different added operations".into()));
        }
        let inclusion = |host: &OrderedStructure, side: &str| -> Result<Embedding> {
            let map = c.names().iter().map(|n| host.index_of(n).unwrap()).collect();
            let e = Embedding { map };
            e.verify(&c, host, true)
                .map_err(|msg| Error::Invalid(format!("C is not a substructure of {side}: {msg}")))?;
            Ok(e)
        };
        let c_in_a = inclusion(&a, "A")?;
        let c_in_b = inclusion(&b, "B")?;
        Ok(AmalgamationInstance { a, b, c, c_in_a, c_in_b })
    }

    pub fn kind(&self) -> StructureKind {
        self.c.kind()
    }

    pub fn a(&self) -> &OrderedStructure {
        &self.a
    }

    pub fn b(&self) -> &OrderedStructure {
        &self.b
    }

    pub fn c(&self) -> &OrderedStructure {
        &self.c
    }

    pub fn c_in_a(&self) -> &Embedding {
        &self.c_in_a
    }

    pub fn c_in_b(&self) -> &Embedding {
        &self.c_in_b
    }

    /// The same instance with every added operation dropped.
    pub fn reduct(&self) -> Self {
        AmalgamationInstance {
            a: self.a.reduct(),
            b: self.b.reduct(),
            c: self.c.reduct(),
            c_in_a: self.c_in_a.clone(),
            c_in_b: self.c_in_b.clone(),
        }
    }

    /// Index in A of each element of C, and `None` for A-only elements, per element of `side`.
    pub(crate) fn shared_in(&self, side: Side) -> Vec<Option<usize>> {
        let (host, inc) = match side {
            Side::A => (&self.a, &self.c_in_a),
            Side::B => (&self.b, &self.c_in_b),
        };
        let mut out = vec![None; host.len()];
        for (z, &x) in inc.map.iter().enumerate() {
            out[x] = Some(z);
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Side {
    A,
    B,
}

fn join(s: &BTreeSet<String>) -> String {
    s.iter().cloned().collect::<Vec<_>>().join(", ")
}

/// A cross inequality `lower ≤ upper` in D, one side from A and the other from B, with the
/// element of C between them.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Interpolant {
    pub lower: String,
    pub upper: String,
    pub via: String,
}

/// An amalgam D of an instance, with the embeddings of A and B and the interpolant table.
#[derive(Clone, Debug)]
pub struct SuperamalgamResult {
    pub d: OrderedStructure,
    pub a_into_d: Embedding,
    pub b_into_d: Embedding,
    pub interpolants: Vec<Interpolant>,
}

/// Every failure found by [`verify_superamalgam`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SuperamalgamReport {
    pub violations: Vec<String>,
}

impl SuperamalgamReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for SuperamalgamReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("ok");
        }
        f.write_str(&self.violations.join("; "))
    }
}

/// Cross pairs `(x, y)` with `x` in one side only and `y` in the other only, as indices
/// of A and B, together with the direction in which `x ≤_D y` should be read.
pub(crate) fn cross_pairs(inst: &AmalgamationInstance) -> Vec<(usize, usize)> {
    let sa = inst.shared_in(Side::A);
    let sb = inst.shared_in(Side::B);
    let a_only: Vec<usize> = (0..inst.a.len()).filter(|&x| sa[x].is_none()).collect();
    let b_only: Vec<usize> = (0..inst.b.len()).filter(|&y| sb[y].is_none()).collect();
    a_only.iter().flat_map(|&x| b_only.iter().map(move |&y| (x, y))).collect()
}

/// First `z` of C with `x ≤ z` in one side and `z ≤ y` in the other; `a_below` selects
/// whether `x` is from A (and `y` from B) or the reverse.
pub(crate) fn find_interpolant(inst: &AmalgamationInstance, x: usize, y: usize, a_below: bool) -> Option<usize> {
    let (ca, cb) = (&inst.c_in_a, &inst.c_in_b);
    (0..inst.c.len()).find(|&z| {
        if a_below {
            inst.a.leq(x, ca.apply(z)) && inst.b.leq(cb.apply(z), y)
        } else {
            inst.b.leq(y, cb.apply(z)) && inst.a.leq(ca.apply(z), x)
        }
    })
}

/// The interpolant table for every cross inequality of `d`.
pub(crate) fn interpolant_table(
    inst: &AmalgamationInstance,
    d: &OrderedStructure,
    fa: &Embedding,
    fb: &Embedding,
) -> Result<Vec<Interpolant>> {
    let mut out = Vec::new();
    for (x, y) in cross_pairs(inst) {
        for a_below in [true, false] {
            let holds = if a_below { d.leq(fa.apply(x), fb.apply(y)) } else { d.leq(fb.apply(y), fa.apply(x)) };
            if !holds {
                continue;
            }
            let z = find_interpolant(inst, x, y, a_below).ok_or_else(|| {
                Error::Internal(format!("no interpolant for {} and {}", inst.a.name(x), inst.b.name(y)))
            })?;
            let (lower, upper) = if a_below {
                (inst.a.name(x), inst.b.name(y))
            } else {
                (inst.b.name(y), inst.a.name(x))
            };
            out.push(Interpolant { lower: lower.into(), upper: upper.into(), via: inst.c.name(z).into() });
        }
    }
    Ok(out)
}

/// Checks embeddings, agreement on C, strong amalgamation and both interpolation clauses,
/// plus the recorded interpolant table.
pub fn verify_superamalgam(inst: &AmalgamationInstance, r: &SuperamalgamResult) -> SuperamalgamReport {
    let mut v = Vec::new();
    let d = &r.d;
    let with_ops = !d.ops().is_empty();
    if let Err(e) = r.a_into_d.verify(&inst.a, d, with_ops) {
        v.push(format!("A does not embed: {e}"));
    }
    if let Err(e) = r.b_into_d.verify(&inst.b, d, with_ops) {
        v.push(format!("B does not embed: {e}"));
    }
    if !v.is_empty() {
        return SuperamalgamReport { violations: v };
    }
    let (fa, fb) = (&r.a_into_d, &r.b_into_d);
    for z in 0..inst.c.len() {
        if fa.apply(inst.c_in_a.apply(z)) != fb.apply(inst.c_in_b.apply(z)) {
            v.push(format!("embeddings disagree on {}", inst.c.name(z)));
        }
    }
    let img_a: BTreeSet<usize> = fa.map.iter().copied().collect();
    let img_c: BTreeSet<usize> = inst.c_in_a.map.iter().map(|&x| fa.apply(x)).collect();
    for &y in &fb.map {
        if img_a.contains(&y) && !img_c.contains(&y) {
            v.push(format!("images of A and B meet outside C at {}", d.name(y)));
        }
    }
    let mut expected = Vec::new();
    for (x, y) in cross_pairs(inst) {
        for a_below in [true, false] {
            let holds = if a_below { d.leq(fa.apply(x), fb.apply(y)) } else { d.leq(fb.apply(y), fa.apply(x)) };
            if !holds {
                continue;
            }
            let (lower, upper) = if a_below {
                (inst.a.name(x), inst.b.name(y))
            } else {
                (inst.b.name(y), inst.a.name(x))
            };
            if find_interpolant(inst, x, y, a_below).is_none() {
                v.push(format!("{lower} <= {upper} in D without an interpolant in C"));
            }
            expected.push((lower.to_string(), upper.to_string()));
        }
    }
    let mut listed: Vec<(String, String)> = Vec::new();
    for it in &r.interpolants {
        let ok = match (inst.c.index_of(&it.via), idx(inst, &it.lower), idx(inst, &it.upper)) {
            (Some(z), Some(lo), Some(up)) => side_leq(inst, lo, z, true) && side_leq(inst, up, z, false),
            _ => false,
        };
        if !ok {
            v.push(format!("recorded interpolant {} for {} <= {} is wrong", it.via, it.lower, it.upper));
        }
        listed.push((it.lower.clone(), it.upper.clone()));
    }
    expected.sort();
    listed.sort();
    if expected != listed {
        v.push("interpolant table does not list exactly the cross inequalities".into());
    }
    SuperamalgamReport { violations: v }
}

/// Element by name: which side it comes from and its index there.
fn idx(inst: &AmalgamationInstance, name: &str) -> Option<(Side, usize)> {
    inst.a.index_of(name).map(|i| (Side::A, i)).or_else(|| inst.b.index_of(name).map(|i| (Side::B, i)))
}

/// `x ≤ z` (when `below`) or `z ≤ x` inside x's own side.
fn side_leq(inst: &AmalgamationInstance, (side, x): (Side, usize), z: usize, below: bool) -> bool {
    let (host, inc) = match side {
        Side::A => (&inst.a, &inst.c_in_a),
        Side::B => (&inst.b, &inst.c_in_b),
    };
    if below {
        host.leq(x, inc.apply(z))
    } else {
        host.leq(inc.apply(z), x)
    }
}
