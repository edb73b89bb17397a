use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::order::{macneille_completion, Embedding, FinitePoset, OpTable, Operation, OrderedStructure, StructureKind};
use crate::partial_ext::{check_necessary, extend, extend_family, ComparabilitySpec, PartialOp, PropertySpec};

use super::instance::{verify_superamalgam, AmalgamationInstance, SuperamalgamResult};
use super::jonsson::amalgamate;

/// A declared comparability `lower ≤ upper` between two added operations with the same
/// property, required pointwise in A, B and the amalgam.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comparability {
    pub lower: String,
    pub upper: String,
}

/// Amalgamates structures with added operations: amalgamate the reducts, complete when an
/// operation needs meets the amalgam lacks, glue the operations of A and B into partial
/// operations on D, check the extension condition and extend.
pub fn amalgamate_expanded(inst: &AmalgamationInstance, comparabilities: &[Comparability]) -> Result<SuperamalgamResult> {
    let kind = inst.kind();
    let mut sig: Vec<(String, PropertySpec)> = Vec::new();
    for (name, op) in inst.a().ops() {
        let w = op.property.clone().ok_or_else(|| {
            Error::Invalid(format!("operation {name} has no declared property"))
        })?;
        if matches!(w, PropertySpec::Mixed(ref m) if matches!(m.bound, crate::partial_ext::MixedBound::Term(_)))
            && !kind.is_lattice()
        {
            return Err(Error::Unsupported(format!("{name}: term bounds need a lattice kind")));
        }
        sig.push((name.clone(), w));
    }
    for cmp in comparabilities {
        let find = |n: &str| sig.iter().find(|(k, _)| k == n).map(|(_, w)| w.clone());
        match (find(&cmp.lower), find(&cmp.upper)) {
            (Some(w1), Some(w2)) if w1 == w2 => {}
            (Some(_), Some(_)) => {
                return Err(Error::Invalid(format!(
                    "{} and {} have different properties",
                    cmp.lower, cmp.upper
                )))
            }
            _ => return Err(Error::Invalid(format!("unknown operation in {} <= {}", cmp.lower, cmp.upper))),
        }
    }

    let base = amalgamate(inst, kind)?;
    let glue = |d: &OrderedStructure| -> Result<BTreeMap<String, PartialOp>> {
        let mut out = BTreeMap::new();
        for (name, w) in &sig {
            let mut g = PartialOp::new(w.arity());
            for (host, f) in [(inst.a(), &base.a_into_d), (inst.b(), &base.b_into_d)] {
                let table = &host.op(name).unwrap().table;
                for args in table.tuples() {
                    let image: Vec<usize> = args.iter().map(|&x| f.apply(x)).collect();
                    g.insert(image, f.apply(table.get(&args)))
                        .map_err(|e| Error::Internal(format!("{name}: A and B disagree on C: {e}")))?;
                }
            }
            g.check_carrier(d.len())?;
            out.insert(name.clone(), g);
        }
        Ok(out)
    };
    let mut d = base.d.clone();
    let mut glued = glue(&d)?;
    // Posets stay as they are when every glued operation is already total (into union).
    let total = glued.values().all(|g| g.len() == d.len().pow(g.arity() as u32));
    if kind == StructureKind::Poset && !total {
        let (m, _) = macneille_completion(&d);
        d = m.retag(StructureKind::Poset)?;
        glued = glue(&d)?;
    }

    for (name, w) in &sig {
        if let Some(v) = check_necessary(&d, w, &glued[name])? {
            return Err(Error::Condition(format!("glued {name}: {}", v.describe(&d))));
        }
    }

    let mut tables: BTreeMap<String, OpTable> = BTreeMap::new();
    let mut grouped: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (name, w) in &sig {
        grouped.entry(w.to_string()).or_default().push(name.clone());
    }
    for members in grouped.values() {
        let related: Vec<&Comparability> = comparabilities
            .iter()
            .filter(|c| members.contains(&c.lower) && members.contains(&c.upper))
            .collect();
        let w = &sig.iter().find(|(k, _)| k == &members[0]).unwrap().1;
        if related.is_empty() {
            for name in members {
                tables.insert(name.clone(), extend(&d, w, &glued[name])?);
            }
            continue;
        }
        let pos = |n: &str| members.iter().position(|m| m == n).unwrap();
        let pairs: Vec<(usize, usize)> = related.iter().map(|c| (pos(&c.lower), pos(&c.upper))).collect();
        let index = FinitePoset::from_pairs(members.len(), &pairs)?;
        let spec = ComparabilitySpec {
            names: members.clone(),
            index,
            ops: members.iter().map(|n| glued[n].clone()).collect(),
        };
        tables.extend(extend_family(&d, w, &spec)?);
    }

    for (name, w) in sig {
        let table = tables.remove(&name).expect("every operation was extended");
        d.set_op(&name, Operation { property: Some(w), table })?;
    }
    let report = d.validate();
    if !report.is_valid() {
        return Err(Error::Internal(format!("expanded amalgam is invalid: {report}")));
    }
    for c in comparabilities {
        let (lo, up) = (&d.op(&c.lower).unwrap().table, &d.op(&c.upper).unwrap().table);
        if let Some(args) = lo.tuples().find(|t| !crate::order::Order::leq(&d, lo.get(t), up.get(t))) {
            return Err(Error::Internal(format!("{} <= {} fails at {args:?}", c.lower, c.upper)));
        }
    }
    let r = SuperamalgamResult { d, a_into_d: base.a_into_d, b_into_d: base.b_into_d, interpolants: base.interpolants };
    let report = verify_superamalgam(inst, &r);
    if !report.is_ok() {
        return Err(Error::Internal(format!("expanded amalgam check failed: {report}")));
    }
    Ok(r)
}

/// Restricts an embedding target's operation back along `f`; used to confirm that D's
/// operations agree with a side's.
pub fn restricts_to(d: &OrderedStructure, side: &OrderedStructure, f: &Embedding) -> bool {
    side.ops().iter().all(|(name, op)| {
        d.op(name).is_some_and(|dop| {
            op.table.tuples().all(|args| {
                let image: Vec<usize> = args.iter().map(|&x| f.apply(x)).collect();
                dop.table.get(&image) == f.apply(op.table.get(&args))
            })
        })
    })
}
