//! Seeded random structures and amalgamation instances for sampled tests and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::amalgam::AmalgamationInstance;
use crate::error::{Error, Result};
use crate::fraisse::find_embedding;
use crate::order::{all_tuples, enumerate_structures, Operation, OrderedStructure, StructureKind};
use crate::partial_ext::{check_necessary, extend, first_extension_in_order, PartialOp, PropertySpec};

const TRIES: usize = 64;

/// Sizes a structure of `kind` can have, up to `max_size`.
pub fn sizes(kind: StructureKind, max_size: usize) -> Vec<usize> {
    (1..=max_size).filter(|&n| !kind.is_boolean() || n.is_power_of_two()).collect()
}

/// A uniformly chosen isomorphism type of the given size.
pub fn random_member<R: Rng + ?Sized>(kind: StructureKind, size: usize, rng: &mut R) -> Option<OrderedStructure> {
    enumerate_structures(kind, size).choose(rng).cloned()
}

/// Some extension of `g`, drawn by backtracking with random value orders. Covers posets,
/// where the meet/join construction can ask for bounds that do not exist.
fn searched_extension<R: Rng + ?Sized>(
    host: &OrderedStructure,
    w: &PropertySpec,
    g: &PartialOp,
    rng: &mut R,
) -> Result<Option<crate::order::OpTable>> {
    let n = host.len();
    let order: Vec<Vec<usize>> = (0..n.pow(w.arity() as u32))
        .map(|_| {
            let mut v: Vec<usize> = (0..n).collect();
            v.shuffle(rng);
            v
        })
        .collect();
    first_extension_in_order(host, w, g, &order)
}

fn extend_or_search<R: Rng + ?Sized>(
    host: &OrderedStructure,
    w: &PropertySpec,
    g: &PartialOp,
    rng: &mut R,
) -> Result<Option<crate::order::OpTable>> {
    match extend(host, w, g) {
        Ok(t) => Ok(Some(t)),
        Err(Error::MissingBound { .. }) => searched_extension(host, w, g, rng),
        Err(Error::Condition(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Extends `base` with up to `extra` random additional entries, keeping the result
/// extendable, and extends it to a total operation with property `w`.
pub fn random_extension<R: Rng + ?Sized>(
    host: &OrderedStructure,
    w: &PropertySpec,
    base: &PartialOp,
    extra: usize,
    rng: &mut R,
) -> Result<crate::order::OpTable> {
    let n = host.len();
    if n == 0 {
        return extend(host, w, base);
    }
    for _ in 0..TRIES {
        let mut g = base.clone();
        for _ in 0..rng.gen_range(0..=extra) {
            let args: Vec<usize> = (0..w.arity()).map(|_| rng.gen_range(0..n)).collect();
            if g.get(&args).is_none() {
                g.insert(args, rng.gen_range(0..n))?;
            }
        }
        if check_necessary(host, w, &g)?.is_none() {
            if let Some(t) = extend_or_search(host, w, &g, rng)? {
                return Ok(t);
            }
        }
    }
    extend_or_search(host, w, base, rng)?
        .ok_or_else(|| Error::Condition(format!("no {w} operation on this {} extends the given one", host.kind())))
}

/// A random structure of `kind` with the given size carrying random operations.
pub fn random_expanded<R: Rng + ?Sized>(
    kind: StructureKind,
    size: usize,
    ops: &[(String, PropertySpec)],
    rng: &mut R,
) -> Result<OrderedStructure> {
    let mut s = random_member(kind, size, rng)
        .ok_or_else(|| Error::Invalid(format!("no {kind} has {size} elements")))?;
    for (name, w) in ops {
        let table = random_extension(&s, w, &PartialOp::new(w.arity()), 3, rng)?;
        s.set_op(name, Operation { property: Some(w.clone()), table })?;
    }
    Ok(s)
}

fn rename(s: &mut OrderedStructure, shared: &[Option<usize>], prefix: &str) {
    let mut next = 0;
    let names = shared
        .iter()
        .map(|c| match c {
            Some(c) => format!("c{c}"),
            None => {
                next += 1;
                format!("{prefix}{}", next - 1)
            }
        })
        .collect();
    s.rename(names);
}

/// A random instance `C ⊆ A, B` of `kind` with `|A|, |B| ≤ max_size`: `A` is random, `C`
/// is generated by a random subset of `A`, and `B` is a random structure into which the
/// reduct of `C` embeds, with operations extending the image of `C`'s.
pub fn random_instance<R: Rng + ?Sized>(
    kind: StructureKind,
    max_size: usize,
    ops: &[(String, PropertySpec)],
    rng: &mut R,
) -> Result<AmalgamationInstance> {
    let sz = sizes(kind, max_size);
    if sz.is_empty() {
        return Err(Error::Invalid(format!("no {kind} has at most {max_size} elements")));
    }
    let mut a = random_expanded(kind, *sz.choose(rng).unwrap(), ops, rng)?;
    let gens: Vec<usize> = (0..a.len()).filter(|_| rng.gen_bool(0.4)).collect();
    let (mut c, c_in_a) = a.generated(&gens, true);
    if c.is_empty() && !kind.allows_empty() {
        return Err(Error::Internal("generated substructure of a bounded kind is empty".into()));
    }
    let mut b = None;
    for _ in 0..TRIES {
        let candidates: Vec<usize> = sz.iter().copied().filter(|&n| n >= c.len()).collect();
        let Some(b0) = random_member(kind, *candidates.choose(rng).unwrap(), rng) else { continue };
        let Some(e) = find_embedding(&c.reduct(), &b0, &vec![None; c.len()]) else { continue };
        let mut cand = b0;
        let mut ok = true;
        for (name, w) in ops {
            let table = &c.op(name).unwrap().table;
            let mut g = PartialOp::new(w.arity());
            for t in all_tuples(c.len(), w.arity()) {
                g.insert(t.iter().map(|&x| e.apply(x)).collect(), e.apply(table.get(&t)))?;
            }
            match random_extension(&cand, w, &g, 2, rng) {
                Ok(t) => cand.set_op(name, Operation { property: Some(w.clone()), table: t })?,
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            b = Some((cand, e));
            break;
        }
    }
    // A itself always contains C
    let (mut b, c_in_b) = b.unwrap_or_else(|| (a.clone(), c_in_a.clone()));
    let shared_in = |len: usize, map: &[usize]| {
        let mut v = vec![None; len];
        for (ci, &x) in map.iter().enumerate() {
            v[x] = Some(ci);
        }
        v
    };
    let (sa, sb) = (shared_in(a.len(), &c_in_a.map), shared_in(b.len(), &c_in_b.map));
    rename(&mut a, &sa, "a");
    rename(&mut b, &sb, "b");
    let own: Vec<Option<usize>> = (0..c.len()).map(Some).collect();
    rename(&mut c, &own, "c");
    AmalgamationInstance::new(a, b, c)
}
