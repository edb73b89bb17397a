use crate::error::{BoundKind, Error, Result};
use crate::order::{all_tuples, OpTable, Order};

use super::check::{check_necessary, pattern_leq, verify_property};
use super::property::{PropertySpec, UnaryCase};
use super::PartialOp;

/// Options for [`extend_with`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ExtendOptions {
    /// For A1e/A2e use the top outside the domain (largest extension); for A1c/A2c the
    /// bottom (smallest extension).
    pub extremal: bool,
}

/// Extends `g` to a total operation with property `w`, using the canonical constructions.
pub fn extend<O: Order + ?Sized>(host: &O, w: &PropertySpec, g: &PartialOp) -> Result<OpTable> {
    extend_with(host, w, g, ExtendOptions::default())
}

pub fn extend_with<O: Order + ?Sized>(
    host: &O,
    w: &PropertySpec,
    g: &PartialOp,
    opts: ExtendOptions,
) -> Result<OpTable> {
    if let Some(v) = check_necessary(host, w, g)? {
        return Err(Error::Condition(v.describe(host)));
    }
    let k = construct(host, w, g, opts)?;
    confirm(host, w, g, &k)?;
    Ok(k)
}

pub(crate) fn confirm<O: Order + ?Sized>(host: &O, w: &PropertySpec, g: &PartialOp, k: &OpTable) -> Result<()> {
    if !g.extended_by(k) {
        return Err(Error::Internal(format!("{w} construction does not extend the partial operation")));
    }
    if let Some(v) = verify_property(host, w, k) {
        return Err(Error::Internal(format!("{w} construction: {}", v.describe(host))));
    }
    Ok(())
}

pub(crate) fn meet_required<O: Order + ?Sized>(host: &O, set: &mut Vec<usize>) -> Result<usize> {
    set.sort_unstable();
    set.dedup();
    host.meet_of(set).ok_or_else(|| Error::MissingBound {
        kind: BoundKind::Meet,
        subset: set.iter().map(|&x| host.label(x)).collect(),
    })
}

pub(crate) fn join_required<O: Order + ?Sized>(host: &O, set: &mut Vec<usize>) -> Result<usize> {
    set.sort_unstable();
    set.dedup();
    host.join_of(set).ok_or_else(|| Error::MissingBound {
        kind: BoundKind::Join,
        subset: set.iter().map(|&x| host.label(x)).collect(),
    })
}

/// The construction for `w` without checking its precondition.
pub(crate) fn construct<O: Order + ?Sized>(
    host: &O,
    w: &PropertySpec,
    g: &PartialOp,
    opts: ExtendOptions,
) -> Result<OpTable> {
    let n = host.len();
    match w {
        PropertySpec::Unary(c) => {
            let dom: Vec<(usize, usize)> = g.entries().map(|(k, v)| (k[0], v)).collect();
            let mut gv: Vec<Option<usize>> = vec![None; n];
            for &(a, ga) in &dom {
                gv[a] = Some(ga);
            }
            let mut in_range = vec![false; n];
            for &(_, ga) in &dom {
                in_range[ga] = true;
            }
            let values: Result<Vec<usize>> = (0..n)
                .map(|x| unary_value(host, *c, x, &dom, &gv, &in_range, opts))
                .collect();
            let mut k = OpTable::unary(values?)?;
            if *c == UnaryCase::B2 {
                k = iterate_orbits(&k);
            }
            Ok(k)
        }
        PropertySpec::Mixed(m) => {
            let entries: Vec<(&Vec<usize>, usize)> = g.entries().collect();
            let mut out = Vec::with_capacity(n.pow(m.n as u32));
            for x in all_tuples(n, m.n) {
                let mut set: Vec<usize> =
                    entries.iter().filter(|(b, _)| pattern_leq(host, m, &x, b)).map(|&(_, v)| v).collect();
                out.push(meet_required(host, &mut set)?);
            }
            OpTable::new(m.n, n, out)
        }
    }
}

fn unary_value<O: Order + ?Sized>(
    host: &O,
    c: UnaryCase,
    x: usize,
    dom: &[(usize, usize)],
    gv: &[Option<usize>],
    in_range: &[bool],
    opts: ExtendOptions,
) -> Result<usize> {
    let top = || meet_required(host, &mut Vec::new());
    let bottom = || join_required(host, &mut Vec::new());
    let meet_where = |pred: &dyn Fn(usize, usize) -> bool| {
        let mut set: Vec<usize> = dom.iter().filter(|&&(b, gb)| pred(b, gb)).map(|&(_, gb)| gb).collect();
        meet_required(host, &mut set)
    };
    let join_where = |pred: &dyn Fn(usize, usize) -> bool| {
        let mut set: Vec<usize> = dom.iter().filter(|&&(b, gb)| pred(b, gb)).map(|&(_, gb)| gb).collect();
        join_required(host, &mut set)
    };
    use UnaryCase::*;
    match c {
        A1e | A1c | A2 | A2e | A2c => {
            if let Some(gx) = gv[x] {
                return Ok(gx);
            }
            let keep = matches!(c, A2 | A2e | A2c) && in_range[x];
            match (c, opts.extremal && !keep) {
                (A1e | A2e, true) => top(),
                (A1c | A2c, true) => bottom(),
                _ => Ok(x),
            }
        }
        A3 => {
            if let Some(gx) = gv[x] {
                return Ok(gx);
            }
            Ok(dom.iter().find(|&&(_, gb)| gb == x).map(|&(b, _)| b).unwrap_or(x))
        }
        B1 | B1e => meet_where(&|b, _| host.leq(x, b)),
        B1c => join_where(&|b, _| host.leq(b, x)),
        B2 => meet_where(&|b, gb| host.leq(x, b) || host.leq(x, gb)),
        B3 => meet_where(&|_, gb| host.leq(x, gb)),
        B4 => join_where(&|_, gb| host.leq(gb, x)),
        B5 => meet_where(&|b, _| host.leq(b, x)),
    }
}

/// Per-element eventual value of `h(x), h(h(x)), ...`; assumes `h` isotone with `hh ≤ h`.
fn iterate_orbits(h: &OpTable) -> OpTable {
    let n = h.size();
    let values = (0..n)
        .map(|x| {
            let mut y = h.apply(x);
            let mut steps = 0;
            while h.apply(y) != y && steps <= n {
                y = h.apply(y);
                steps += 1;
            }
            y
        })
        .collect();
    OpTable::unary(values).expect("values stay in the carrier")
}

/// The largest isotone idempotent operation below `h`; `h` must be isotone with `hh ≤ h`.
pub fn iterate_idempotent<O: Order + ?Sized>(host: &O, h: &OpTable) -> Result<OpTable> {
    if h.arity() != 1 {
        return Err(Error::Arity { expected: 1, found: h.arity() });
    }
    if h.size() != host.len() {
        return Err(Error::Invalid("operation table does not match the carrier".into()));
    }
    if let Some(v) = verify_property(host, &UnaryCase::B1.into(), h) {
        return Err(Error::Rejected(v.describe(host)));
    }
    for a in 0..host.len() {
        let b = h.apply(a);
        let c = h.apply(b);
        if !host.leq(c, b) {
            return Err(Error::Rejected(format!(
                "h(h({})) = {} is not below h({}) = {}",
                host.label(a),
                host.label(c),
                host.label(a),
                host.label(b)
            )));
        }
    }
    Ok(iterate_orbits(h))
}

/// The largest isotone idempotent operation below every member of `ks`.
pub fn meet_idempotent_family<O: Order + ?Sized>(host: &O, ks: &[OpTable]) -> Result<OpTable> {
    let n = host.len();
    for (i, k) in ks.iter().enumerate() {
        if k.arity() != 1 || k.size() != n {
            return Err(Error::Invalid(format!("member {i} is not a unary operation on the carrier")));
        }
        if let Some(v) = verify_property(host, &UnaryCase::B2.into(), k) {
            return Err(Error::Rejected(format!("member {i}: {}", v.describe(host))));
        }
    }
    let values: Result<Vec<usize>> = (0..n)
        .map(|x| {
            let mut set: Vec<usize> = ks.iter().map(|k| k.apply(x)).collect();
            meet_required(host, &mut set)
        })
        .collect();
    let h = OpTable::unary(values?)?;
    iterate_idempotent(host, &h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::{FinitePoset, OrderedStructure, StructureKind};

    fn chain(n: usize) -> OrderedStructure {
        OrderedStructure::from_poset(StructureKind::Lattice, FinitePoset::chain(n)).unwrap()
    }

    #[test]
    fn closure_on_dpq_chain() {
        let p = chain(3);
        let g = PartialOp::unary(&[(0, 0)]).unwrap();
        let k = extend(&p, &UnaryCase::B3.into(), &g).unwrap();
        assert_eq!(k.values(), &[0, 2, 2]);
    }

    #[test]
    fn idempotent_on_diamond_with_bottom() {
        // 0 < c < a, b < 1
        let p = FinitePoset::from_pairs(5, &[(0, 1), (1, 2), (1, 3), (2, 4), (3, 4)]).unwrap();
        let s = OrderedStructure::from_poset(StructureKind::Lattice, p).unwrap();
        let g = PartialOp::unary(&[(0, 0), (4, 0), (2, 2), (3, 3)]).unwrap();
        let k = extend(&s, &UnaryCase::A2.into(), &g).unwrap();
        assert_eq!(k.apply(1), 1);
    }

    #[test]
    fn total_operation_is_returned_unchanged() {
        let p = chain(3);
        let t = OpTable::unary(vec![1, 1, 2]).unwrap();
        for c in [UnaryCase::B1, UnaryCase::B1e, UnaryCase::B2, UnaryCase::B3] {
            assert_eq!(extend(&p, &c.into(), &PartialOp::from_table(&t)).unwrap(), t);
        }
    }

    #[test]
    fn iterate_rejects_non_shrinking() {
        let p = chain(3);
        let h = OpTable::unary(vec![1, 2, 2]).unwrap();
        let err = iterate_idempotent(&p, &h).unwrap_err().to_string();
        assert!(err.contains("h(h(e0)) = e2 is not below h(e0) = e1"), "{err}");
    }

    #[test]
    fn iterate_collapses_to_bottom() {
        let p = chain(3);
        let h = OpTable::unary(vec![0, 0, 1]).unwrap();
        assert_eq!(iterate_idempotent(&p, &h).unwrap().values(), &[0, 0, 0]);
        let id = OpTable::identity(3);
        assert_eq!(iterate_idempotent(&p, &id).unwrap(), id);
    }

    #[test]
    fn family_meet_examples() {
        let p = chain(3);
        let k1 = OpTable::unary(vec![1, 1, 2]).unwrap();
        let k2 = OpTable::unary(vec![0, 2, 2]).unwrap();
        assert_eq!(meet_idempotent_family(&p, &[k1.clone(), k2]).unwrap(), OpTable::identity(3));
        assert_eq!(meet_idempotent_family(&p, std::slice::from_ref(&k1)).unwrap(), k1);
        let two = chain(2);
        let bottom = OpTable::constant(1, 2, 0);
        assert_eq!(meet_idempotent_family(&two, &[OpTable::identity(2), bottom.clone()]).unwrap(), bottom);
    }

    #[test]
    fn missing_bound_names_the_subset() {
        // antichain {a, b} plus an element below both: no meet of the empty range set
        let p = FinitePoset::antichain(2);
        let s = OrderedStructure::new(StructureKind::Poset, vec!["a".into(), "b".into()], p).unwrap();
        let g = PartialOp::unary(&[(0, 0)]).unwrap();
        match extend(&s, &UnaryCase::B3.into(), &g) {
            Err(Error::MissingBound { kind: BoundKind::Meet, subset }) => assert!(subset.is_empty()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn extremal_variants() {
        let p = chain(3);
        let g = PartialOp::unary(&[(0, 1)]).unwrap();
        let opts = ExtendOptions { extremal: true };
        assert_eq!(extend_with(&p, &UnaryCase::A1e.into(), &g, opts).unwrap().values(), &[1, 2, 2]);
        assert_eq!(extend_with(&p, &UnaryCase::A2e.into(), &g, opts).unwrap().values(), &[1, 1, 2]);
        let g = PartialOp::unary(&[(2, 1)]).unwrap();
        assert_eq!(extend_with(&p, &UnaryCase::A1c.into(), &g, opts).unwrap().values(), &[0, 0, 1]);
        assert_eq!(extend_with(&p, &UnaryCase::A2c.into(), &g, opts).unwrap().values(), &[0, 1, 1]);
    }
}
