use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::order::{FinitePoset, OpTable, Order};

use super::check::{check_necessary, verify_property};
use super::extend::{confirm, construct, iterate_idempotent, join_required, meet_required, ExtendOptions};
use super::property::{PropertySpec, UnaryCase};
use super::PartialOp;

/// An indexed family of partial operations with comparabilities between members:
/// `index.leq(z, z')` requires `G_z ≤ G_z'` pointwise, before and after extension.
#[derive(Clone, Debug)]
pub struct ComparabilitySpec {
    pub names: Vec<String>,
    pub index: FinitePoset,
    pub ops: Vec<PartialOp>,
}

impl ComparabilitySpec {
    /// A family with no comparabilities.
    pub fn unrelated(names: Vec<String>, ops: Vec<PartialOp>) -> Self {
        let index = FinitePoset::antichain(ops.len());
        ComparabilitySpec { names, index, ops }
    }

    fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let m = self.ops.len();
        (0..m).flat_map(move |z| (0..m).map(move |z2| (z, z2))).filter(|&(z, z2)| z != z2 && self.index.leq(z, z2))
    }
}

/// Extends every member of the family to an operation with property `w`, keeping all
/// declared comparabilities. Members must share one domain.
pub fn extend_family<O: Order + ?Sized>(
    host: &O,
    w: &PropertySpec,
    spec: &ComparabilitySpec,
) -> Result<BTreeMap<String, OpTable>> {
    let m = spec.ops.len();
    if spec.names.len() != m || spec.index.len() != m {
        return Err(Error::Invalid("family names, index order and members differ in length".into()));
    }
    if m == 0 {
        return Ok(BTreeMap::new());
    }
    let domain: Vec<&Vec<usize>> = spec.ops[0].domain().collect();
    for (name, g) in spec.names.iter().zip(&spec.ops) {
        if let Some(v) = check_necessary(host, w, g)? {
            return Err(Error::Condition(format!("{name}: {}", v.describe(host))));
        }
        if g.domain().ne(domain.iter().copied()) {
            return Err(Error::Rejected(format!(
                "{name} is defined on a different domain from {}",
                spec.names[0]
            )));
        }
    }
    for (z, z2) in spec.pairs() {
        for args in &domain {
            let (a, b) = (spec.ops[z].get(args).unwrap(), spec.ops[z2].get(args).unwrap());
            if !host.leq(a, b) {
                return Err(Error::Rejected(format!(
                    "{} <= {} fails at {}: {} is not below {}",
                    spec.names[z],
                    spec.names[z2],
                    tuple_label(host, args),
                    host.label(a),
                    host.label(b)
                )));
            }
        }
    }
    if w.unary_case() == Some(UnaryCase::A3) {
        let inside: Vec<usize> = domain.iter().map(|a| a[0]).collect();
        for (name, g) in spec.names.iter().zip(&spec.ops) {
            if let Some((a, v)) = g.entries().find(|(_, v)| !inside.contains(v)) {
                return Err(Error::Rejected(format!(
                    "{name} maps {} outside the common domain (to {})",
                    host.label(a[0]),
                    host.label(v)
                )));
            }
        }
    }

    let naive: Vec<OpTable> = spec
        .ops
        .iter()
        .map(|g| construct(host, w, g, ExtendOptions::default()))
        .collect::<Result<_>>()?;
    let n = host.len();
    let above = |z: usize| (0..m).filter(move |&z2| spec.index.leq(z, z2));
    let below = |z: usize| (0..m).filter(move |&z2| spec.index.leq(z2, z));
    let meet_over = |z: usize| -> Result<OpTable> {
        let vals = (0..n)
            .map(|x| meet_required(host, &mut above(z).map(|z2| naive[z2].apply(x)).collect()))
            .collect::<Result<Vec<_>>>()?;
        OpTable::unary(vals)
    };
    let result: Vec<OpTable> = match w.unary_case() {
        Some(UnaryCase::B3) => (0..m).map(meet_over).collect::<Result<_>>()?,
        Some(UnaryCase::B4) => (0..m)
            .map(|z| {
                let vals = (0..n)
                    .map(|x| join_required(host, &mut below(z).map(|z2| naive[z2].apply(x)).collect()))
                    .collect::<Result<Vec<_>>>()?;
                OpTable::unary(vals)
            })
            .collect::<Result<_>>()?,
        Some(UnaryCase::B2) => (0..m)
            .map(|z| {
                let h = meet_over(z)?;
                iterate_idempotent(host, &h).map_err(|e| Error::Internal(e.to_string()))
            })
            .collect::<Result<_>>()?,
        _ => naive,
    };

    for ((name, g), k) in spec.names.iter().zip(&spec.ops).zip(&result) {
        confirm(host, w, g, k).map_err(|e| Error::Internal(format!("{name}: {e}")))?;
        debug_assert!(verify_property(host, w, k).is_none());
    }
    for (z, z2) in spec.pairs() {
        let (k, k2) = (&result[z], &result[z2]);
        if let Some(args) = k.tuples().find(|t| !host.leq(k.get(t), k2.get(t))) {
            return Err(Error::Internal(format!(
                "extensions of {} and {} are not comparable at {}",
                spec.names[z],
                spec.names[z2],
                tuple_label(host, &args)
            )));
        }
    }
    Ok(spec.names.iter().cloned().zip(result).collect())
}

fn tuple_label<O: Order + ?Sized>(host: &O, args: &[usize]) -> String {
    let parts: Vec<String> = args.iter().map(|&a| host.label(a)).collect();
    parts.join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::{OrderedStructure, StructureKind};

    fn chain(n: usize) -> OrderedStructure {
        OrderedStructure::from_poset(StructureKind::Lattice, FinitePoset::chain(n)).unwrap()
    }

    fn two(g1: PartialOp, g2: PartialOp) -> ComparabilitySpec {
        ComparabilitySpec {
            names: vec!["f".into(), "g".into()],
            index: FinitePoset::chain(2),
            ops: vec![g1, g2],
        }
    }

    #[test]
    fn closure_family_keeps_order() {
        let p = chain(4);
        let f = PartialOp::unary(&[(0, 1), (2, 3)]).unwrap();
        let g = PartialOp::unary(&[(0, 3), (2, 3)]).unwrap();
        let out = extend_family(&p, &UnaryCase::B3.into(), &two(f, g)).unwrap();
        for x in 0..4 {
            assert!(out["f"].apply(x) <= out["g"].apply(x));
        }
    }

    #[test]
    fn interior_family_keeps_order() {
        let p = chain(4);
        let f = PartialOp::unary(&[(1, 0), (3, 0)]).unwrap();
        let g = PartialOp::unary(&[(1, 1), (3, 3)]).unwrap();
        let out = extend_family(&p, &UnaryCase::B4.into(), &two(f, g)).unwrap();
        for x in 0..4 {
            assert!(out["f"].apply(x) <= out["g"].apply(x));
        }
    }

    #[test]
    fn incomparable_input_rejected() {
        let p = chain(3);
        let f = PartialOp::unary(&[(0, 2)]).unwrap();
        let g = PartialOp::unary(&[(0, 1)]).unwrap();
        assert!(matches!(extend_family(&p, &UnaryCase::B1.into(), &two(f, g)), Err(Error::Rejected(_))));
    }

    #[test]
    fn different_domains_rejected() {
        let p = chain(3);
        let f = PartialOp::unary(&[(0, 0)]).unwrap();
        let g = PartialOp::unary(&[(1, 1)]).unwrap();
        assert!(matches!(extend_family(&p, &UnaryCase::B1.into(), &two(f, g)), Err(Error::Rejected(_))));
    }

    #[test]
    fn involution_family_needs_closed_domain() {
        let p = chain(3);
        let f = PartialOp::unary(&[(0, 2)]).unwrap();
        let g = PartialOp::unary(&[(0, 2)]).unwrap();
        assert!(matches!(extend_family(&p, &UnaryCase::A3.into(), &two(f, g)), Err(Error::Rejected(_))));
    }
}
